#include "onda/error.hpp"
#include "onda/model_io.hpp"

#include "json_support.hpp"

#include <cmath>
#include <initializer_list>

namespace onda {

namespace {

using json = nlohmann::json;
using detail::ojson;

[[noreturn]] void schema_error(const std::string& pointer, const std::string& message)
{
    throw ParseError("SCHEMA", (pointer.empty() ? std::string("/") : pointer) + ": " + message, 0, 0, pointer);
}

/// Read-only cursor over a parsed value that knows its JSON pointer.
class Node
{
  public:
    Node(const json& value, std::string pointer) : v_(value), ptr_(std::move(pointer)) {}

    const json& value() const { return v_; }
    const std::string& pointer() const { return ptr_; }

    void expect_object(std::initializer_list<std::string_view> allowed) const
    {
        if (!v_.is_object())
            schema_error(ptr_, "expected an object");
        for (const auto& [key, _] : v_.items()) {
            bool known = false;
            for (auto k : allowed)
                known = known || key == k;
            if (!known)
                schema_error(ptr_ + "/" + key, "unknown field '" + key + "'");
        }
    }

    bool has(std::string_view key) const { return v_.contains(key); }

    Node at(const std::string& key) const
    {
        auto it = v_.find(key);
        if (it == v_.end())
            schema_error(ptr_, "missing field '" + key + "'");
        return Node(*it, ptr_ + "/" + key);
    }

    std::vector<Node> elements() const
    {
        if (!v_.is_array())
            schema_error(ptr_, "expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < v_.size(); ++i)
            out.emplace_back(v_[i], ptr_ + "/" + std::to_string(i));
        return out;
    }

    std::string str() const
    {
        if (!v_.is_string())
            schema_error(ptr_, "expected a string");
        return v_.get<std::string>();
    }

    bool boolean() const
    {
        if (!v_.is_boolean())
            schema_error(ptr_, "expected true or false");
        return v_.get<bool>();
    }

    long long integer() const
    {
        if (!v_.is_number_integer())
            schema_error(ptr_, "expected an integer");
        if (v_.is_number_unsigned() && v_.get<unsigned long long>() > 1'000'000'000ULL)
            schema_error(ptr_, "integer out of range");
        return v_.get<long long>();
    }

    int small_int(long long lo, long long hi) const
    {
        const long long x = integer();
        if (x < lo || x > hi)
            schema_error(ptr_, "integer " + std::to_string(x) + " out of range");
        return static_cast<int>(x);
    }

    double number() const
    {
        if (!v_.is_number())
            schema_error(ptr_, "expected a number");
        return v_.get<double>();
    }

  private:
    const json& v_;
    std::string ptr_;
};

bool opt_bool(const Node& n, const std::string& key)
{
    return n.has(key) ? n.at(key).boolean() : false;
}

constexpr long long kMaxParam = 1'000'000;

LogicalType read_type(const Node& n)
{
    n.expect_object({"kind", "length", "precision", "scale"});
    const std::string kind = n.at("kind").str();
    auto k = type_kind_from_name(kind);
    if (!k)
        schema_error(n.pointer() + "/kind", "unknown type kind '" + kind + "'");
    LogicalType t;
    t.kind = *k;
    if (n.has("length"))
        t.length = n.at("length").small_int(-kMaxParam, kMaxParam);
    if (n.has("precision"))
        t.precision = n.at("precision").small_int(-kMaxParam, kMaxParam);
    if (n.has("scale"))
        t.scale = n.at("scale").small_int(-kMaxParam, kMaxParam);
    return t;
}

std::vector<Attribute> read_attributes(const Node& n)
{
    std::vector<Attribute> out;
    for (const auto& a : n.elements()) {
        a.expect_object({"name", "type", "pk", "pid", "mandatory", "unique", "auto", "check"});
        Attribute attr;
        attr.name = a.at("name").str();
        attr.type = read_type(a.at("type"));
        attr.is_pk = opt_bool(a, "pk");
        attr.is_partial_id = opt_bool(a, "pid");
        attr.mandatory = opt_bool(a, "mandatory");
        attr.unique = opt_bool(a, "unique");
        attr.auto_increment = opt_bool(a, "auto");
        if (a.has("check"))
            attr.check_sql = a.at("check").str();
        out.push_back(std::move(attr));
    }
    return out;
}

RelEnd read_end(const Node& n)
{
    n.expect_object({"entity", "min", "max", "role"});
    RelEnd end;
    end.entity_id = n.at("entity").str();
    end.min_card = n.at("min").small_int(0, 1);
    const std::string max = n.at("max").str();
    if (max == "1")
        end.max_card = MaxCard::One;
    else if (max == "N")
        end.max_card = MaxCard::Many;
    else
        schema_error(n.pointer() + "/max", "max must be \"1\" or \"N\"");
    if (n.has("role"))
        end.role = n.at("role").str();
    return end;
}

Diagram read_diagram(const Node& n)
{
    n.expect_object({"name", "entities", "relationships", "hierarchies", "geometry"});
    Diagram d;
    d.name = n.at("name").str();
    for (const auto& e : n.at("entities").elements()) {
        e.expect_object({"id", "name", "weak", "attributes"});
        Entity entity;
        entity.id = e.at("id").str();
        entity.name = e.at("name").str();
        entity.is_weak = opt_bool(e, "weak");
        if (e.has("attributes"))
            entity.attributes = read_attributes(e.at("attributes"));
        d.entities.push_back(std::move(entity));
    }
    for (const auto& r : n.at("relationships").elements()) {
        r.expect_object({"id", "name", "ends", "attributes"});
        Relationship rel;
        rel.id = r.at("id").str();
        rel.name = r.at("name").str();
        const auto ends = r.at("ends").elements();
        if (ends.size() != 2)
            schema_error(r.pointer() + "/ends", "a relationship has exactly two ends");
        rel.end_a = read_end(ends[0]);
        rel.end_b = read_end(ends[1]);
        if (r.has("attributes"))
            rel.attributes = read_attributes(r.at("attributes"));
        d.relationships.push_back(std::move(rel));
    }
    for (const auto& h : n.at("hierarchies").elements()) {
        h.expect_object({"id", "super", "subs", "strategy"});
        Hierarchy hier;
        hier.id = h.at("id").str();
        hier.super_id = h.at("super").str();
        for (const auto& s : h.at("subs").elements())
            hier.sub_ids.push_back(s.str());
        const std::string strategy = h.at("strategy").str();
        auto st = strategy_from_name(strategy);
        if (!st)
            schema_error(h.pointer() + "/strategy", "unknown strategy '" + strategy + "'");
        hier.strategy = *st;
        d.hierarchies.push_back(std::move(hier));
    }
    if (n.has("geometry")) {
        const Node g = n.at("geometry");
        if (!g.value().is_object())
            schema_error(g.pointer(), "expected an object");
        for (const auto& [id, _] : g.value().items()) {
            const Node p = g.at(id);
            p.expect_object({"x", "y"});
            CanvasPoint pt{p.at("x").number(), p.at("y").number()};
            if (!std::isfinite(pt.x) || !std::isfinite(pt.y))
                schema_error(p.pointer(), "coordinates must be finite");
            d.geometry.emplace(id, pt);
        }
    }
    return d;
}

void line_and_column(std::string_view text, std::size_t offset, std::size_t& line, std::size_t& column)
{
    line = 1;
    column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

ojson attributes_to_json(const std::vector<Attribute>& attrs)
{
    ojson out = ojson::array();
    for (const auto& a : attrs) {
        ojson j = ojson::object();
        j["name"] = a.name;
        j["type"] = detail::type_to_json(a.type);
        j["pk"] = a.is_pk;
        j["pid"] = a.is_partial_id;
        j["mandatory"] = a.mandatory;
        j["unique"] = a.unique;
        j["auto"] = a.auto_increment;
        if (a.check_sql)
            j["check"] = *a.check_sql;
        out.push_back(std::move(j));
    }
    return out;
}

ojson end_to_json(const RelEnd& end)
{
    ojson j = ojson::object();
    j["entity"] = end.entity_id;
    j["min"] = end.min_card;
    j["max"] = end.max_card == MaxCard::One ? "1" : "N";
    if (end.role)
        j["role"] = *end.role;
    return j;
}

} // namespace

ProjectDocument parse_project(std::string_view bytes)
{
    json root;
    try {
        root = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 0, column = 0;
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        line_and_column(bytes, offset, line, column);
        throw ParseError("PARSE",
                         "malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column),
                         line, column);
    }

    const Node top(root, "");
    if (!root.is_object())
        schema_error("", "expected an object");
    const Node version = top.at("format_version");
    const long long v = version.integer();
    if (v > kFormatVersion)
        throw VersionError(v, kFormatVersion);
    if (v < 1)
        schema_error("/format_version", "format_version must be at least 1");
    top.expect_object({"format_version", "meta", "diagram"});

    ProjectDocument doc;
    doc.format_version = static_cast<int>(v);
    if (top.has("meta")) {
        const Node meta = top.at("meta");
        if (!meta.value().is_object())
            schema_error("/meta", "expected an object");
        for (const auto& [key, _] : meta.value().items())
            doc.meta.emplace(key, meta.at(key).str());
    }
    doc.diagram = read_diagram(top.at("diagram"));
    doc.diagram.format_version = doc.format_version;
    return doc;
}

std::string emit_project(const ProjectDocument& doc)
{
    const Diagram& d = doc.diagram;
    ojson root = ojson::object();
    root["format_version"] = doc.format_version;
    ojson meta = ojson::object();
    for (const auto& [k, v] : doc.meta)
        meta[k] = v;
    root["meta"] = std::move(meta);

    ojson diagram = ojson::object();
    diagram["name"] = d.name;
    ojson entities = ojson::array();
    for (const auto& e : d.entities) {
        ojson j = ojson::object();
        j["id"] = e.id;
        j["name"] = e.name;
        j["weak"] = e.is_weak;
        j["attributes"] = attributes_to_json(e.attributes);
        entities.push_back(std::move(j));
    }
    diagram["entities"] = std::move(entities);
    ojson rels = ojson::array();
    for (const auto& r : d.relationships) {
        ojson j = ojson::object();
        j["id"] = r.id;
        j["name"] = r.name;
        j["ends"] = ojson::array({end_to_json(r.end_a), end_to_json(r.end_b)});
        j["attributes"] = attributes_to_json(r.attributes);
        rels.push_back(std::move(j));
    }
    diagram["relationships"] = std::move(rels);
    ojson hiers = ojson::array();
    for (const auto& h : d.hierarchies) {
        ojson j = ojson::object();
        j["id"] = h.id;
        j["super"] = h.super_id;
        j["subs"] = h.sub_ids;
        j["strategy"] = std::string(strategy_name(h.strategy));
        hiers.push_back(std::move(j));
    }
    diagram["hierarchies"] = std::move(hiers);
    ojson geometry = ojson::object();
    for (const auto& [id, p] : d.geometry)
        geometry[id] = ojson{{"x", p.x}, {"y", p.y}};
    diagram["geometry"] = std::move(geometry);
    root["diagram"] = std::move(diagram);
    return detail::dump_canonical(root);
}

} // namespace onda
