#include "onda/er_model.hpp"

#include "onda/error.hpp"
#include "onda/transform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <set>
#include <tuple>

namespace onda {

namespace {

constexpr std::array<std::pair<TypeKind, std::string_view>, 9> kTypeNames{{
    {TypeKind::Integer, "integer"},
    {TypeKind::BigInt, "bigint"},
    {TypeKind::Float, "float"},
    {TypeKind::Numeric, "numeric"},
    {TypeKind::Varchar, "varchar"},
    {TypeKind::Text, "text"},
    {TypeKind::Boolean, "boolean"},
    {TypeKind::Date, "date"},
    {TypeKind::Timestamp, "timestamp"},
}};

template <typename Range, typename Id>
auto find_by_id(Range& range, Id id) -> decltype(&*range.begin())
{
    auto it = std::find_if(range.begin(), range.end(), [&](const auto& e) { return e.id == id; });
    return it == range.end() ? nullptr : &*it;
}

} // namespace

bool LogicalType::well_formed() const
{
    switch (kind) {
    case TypeKind::Varchar:
        return length && *length >= 1 && !precision && !scale;
    case TypeKind::Numeric:
        return !length && precision && *precision >= 1 && (!scale || (*scale >= 0 && *scale <= *precision));
    default:
        return !length && !precision && !scale;
    }
}

std::string_view type_kind_name(TypeKind kind)
{
    for (const auto& [k, name] : kTypeNames)
        if (k == kind)
            return name;
    return "integer";
}

std::optional<TypeKind> type_kind_from_name(std::string_view name)
{
    for (const auto& [k, n] : kTypeNames)
        if (n == name)
            return k;
    return std::nullopt;
}

std::string_view strategy_name(Strategy s)
{
    switch (s) {
    case Strategy::Complete:
        return "complete";
    case Strategy::Concrete:
        return "concrete";
    case Strategy::Single:
        return "single";
    }
    return "complete";
}

std::optional<Strategy> strategy_from_name(std::string_view name)
{
    if (name == "complete")
        return Strategy::Complete;
    if (name == "concrete")
        return Strategy::Concrete;
    if (name == "single")
        return Strategy::Single;
    return std::nullopt;
}

std::string_view mode_name(GenerationMode mode)
{
    return mode == GenerationMode::Normal ? "normal" : "simplified";
}

std::optional<GenerationMode> mode_from_name(std::string_view name)
{
    if (name == "normal")
        return GenerationMode::Normal;
    if (name == "simplified")
        return GenerationMode::Simplified;
    return std::nullopt;
}

std::string_view severity_name(Severity s)
{
    return s == Severity::Error ? "ERROR" : "WARNING";
}

const Entity* Diagram::find_entity(std::string_view id) const { return find_by_id(entities, id); }
Entity* Diagram::find_entity(std::string_view id) { return find_by_id(entities, id); }
const Relationship* Diagram::find_relationship(std::string_view id) const { return find_by_id(relationships, id); }
const Hierarchy* Diagram::find_hierarchy(std::string_view id) const { return find_by_id(hierarchies, id); }

std::string sql_name(std::string_view display)
{
    std::string out;
    out.reserve(display.size());
    bool pending_sep = false;
    for (unsigned char c : display) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (!keep) {
            pending_sep = true;
            continue;
        }
        if (pending_sep && !out.empty())
            out.push_back('_');
        pending_sep = false;
        out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
    return out;
}

bool is_valid_sql_name(std::string_view name)
{
    if (name.empty() || name.front() < 'a' || name.front() > 'z')
        return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

bool ValidationReport::is_valid() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const
{
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                  [](const Finding& f) { return f.severity == Severity::Error; }));
}

bool ValidationReport::has(std::string_view code) const
{
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; });
}

namespace {

bool is_owner_link(const Relationship& rel, std::string_view weak_id, std::string* owner)
{
    if (rel.is_self())
        return false;
    const RelEnd* other = nullptr;
    if (rel.end_a.entity_id == weak_id)
        other = &rel.end_b;
    else if (rel.end_b.entity_id == weak_id)
        other = &rel.end_a;
    if (!other || other->min_card != 1 || other->max_card != MaxCard::One)
        return false;
    if (owner)
        *owner = other->entity_id;
    return true;
}

std::vector<std::pair<std::string, std::string>> owner_candidates(const Diagram& d, std::string_view weak_id)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& rel : d.relationships) {
        std::string owner;
        if (is_owner_link(rel, weak_id, &owner))
            out.emplace_back(rel.id, owner);
    }
    return out;
}

/// Whether a relationship would inline its FK under the given mode.
bool inlines_under(const Relationship& rel, GenerationMode mode)
{
    const bool a_one = rel.end_a.max_card == MaxCard::One;
    const bool b_one = rel.end_b.max_card == MaxCard::One;
    if (!a_one && !b_one)
        return false;
    bool mandatory;
    if (a_one && b_one)
        mandatory = rel.end_a.min_card == 1 || rel.end_b.min_card == 1;
    else
        mandatory = (a_one ? rel.end_a : rel.end_b).min_card == 1;
    return mandatory || mode == GenerationMode::Simplified;
}

class Validator
{
  public:
    Validator(const Diagram& d, std::optional<GenerationMode> mode) : d_(d), mode_(mode) {}

    ValidationReport run()
    {
        check_ids();
        index_hierarchies();
        check_entities();
        check_relationships();
        check_hierarchies();
        check_weak_entities();
        check_geometry();
        if (report_.is_valid())
            check_lowered();

        auto& f = report_.findings;
        std::sort(f.begin(), f.end(), [](const Finding& x, const Finding& y) {
            const std::string& xi = x.element_path.empty() ? std::string() : x.element_path.front();
            const std::string& yi = y.element_path.empty() ? std::string() : y.element_path.front();
            return std::tie(xi, x.code, x.element_path, x.message) < std::tie(yi, y.code, y.element_path, y.message);
        });
        f.erase(std::unique(f.begin(), f.end()), f.end());
        return std::move(report_);
    }

  private:
    void error(std::string code, std::vector<std::string> path, std::string message)
    {
        report_.findings.push_back({Severity::Error, std::move(code), std::move(path), std::move(message)});
    }

    void warning(std::string code, std::vector<std::string> path, std::string message)
    {
        report_.findings.push_back({Severity::Warning, std::move(code), std::move(path), std::move(message)});
    }

    void check_ids()
    {
        std::set<std::string> seen;
        auto visit = [&](const std::string& id, const char* what) {
            if (id.empty())
                error("BAD_NAME", {id}, std::string(what) + " has an empty id");
            if (!seen.insert(id).second)
                error("DUP_ID", {id}, "id '" + id + "' is used by more than one element");
        };
        for (const auto& e : d_.entities)
            visit(e.id, "entity");
        for (const auto& r : d_.relationships)
            visit(r.id, "relationship");
        for (const auto& h : d_.hierarchies)
            visit(h.id, "hierarchy");
    }

    void index_hierarchies()
    {
        for (const auto& h : d_.hierarchies) {
            supers_.insert(h.super_id);
            if (h.strategy == Strategy::Concrete)
                concrete_supers_.insert(h.super_id);
            for (const auto& s : h.sub_ids)
                subs_.insert(s);
        }
    }

    void check_attribute_list(const std::string& owner_id, const std::vector<Attribute>& attrs)
    {
        std::set<std::string> names;
        for (const auto& a : attrs) {
            const std::string sql = sql_name(a.name);
            std::vector<std::string> path{owner_id, a.name};
            if (!is_valid_sql_name(sql))
                error("BAD_NAME", path, "attribute name '" + a.name + "' does not yield a valid SQL name");
            else if (!names.insert(sql).second)
                error("DUP_ATTR", path, "attribute '" + a.name + "' is declared more than once");
            if (!a.type.well_formed())
                error("BAD_TYPE", path,
                      "type parameters of '" + a.name + "' do not fit " + std::string(type_kind_name(a.type.kind)));
            if ((a.is_pk || a.is_partial_id) && !a.mandatory)
                error("PK_NULLABLE", path, "identifier attribute '" + a.name + "' must be mandatory");
            if (a.is_pk && a.is_partial_id)
                error("PK_PARTIAL_CONFLICT", path, "attribute '" + a.name + "' cannot be both pk and partial id");
            if (a.auto_increment && a.type.kind != TypeKind::Integer && a.type.kind != TypeKind::BigInt)
                error("AUTOINC_TYPE", path, "auto-increment requires integer or bigint");
            if (a.check_sql && a.check_sql->find_first_not_of(" \t\r\n") == std::string::npos)
                error("EMPTY_CHECK", path, "check constraint of '" + a.name + "' is empty");
        }
    }

    void check_entities()
    {
        std::map<std::string, std::string> table_names;
        for (const auto& e : d_.entities) {
            const std::string sql = sql_name(e.name);
            if (!is_valid_sql_name(sql))
                error("BAD_NAME", {e.id}, "entity name '" + e.name + "' does not yield a valid SQL name");
            else if (auto [it, fresh] = table_names.emplace(sql, e.id); !fresh)
                error("DUP_NAME", {e.id}, "entity '" + e.name + "' maps to table '" + sql + "' already used by '" +
                                              it->second + "'");

            check_attribute_list(e.id, e.attributes);

            const auto pk_count = std::count_if(e.attributes.begin(), e.attributes.end(),
                                                [](const Attribute& a) { return a.is_pk; });
            const bool is_sub = subs_.count(e.id) > 0;
            for (const auto& a : e.attributes) {
                std::vector<std::string> path{e.id, a.name};
                if (e.is_weak && a.is_pk)
                    error("WEAK_HAS_PK", path, "weak entity '" + e.name + "' cannot declare a primary key");
                if (!e.is_weak && a.is_partial_id)
                    error("PID_NOT_WEAK", path, "partial identifiers are only allowed on weak entities");
                if (a.auto_increment && !a.is_pk)
                    error("AUTOINC_NOT_PK", path, "auto-increment is only allowed on the primary key");
                if (a.auto_increment && a.is_pk && pk_count > 1)
                    error("AUTOINC_COMPOSITE", path, "auto-increment is not allowed on a composite primary key");
                if (is_sub && a.is_pk)
                    error("SUB_HAS_PK", path, "sub-entity '" + e.name + "' inherits its identifier");
            }
            if (!e.is_weak && !is_sub && pk_count == 0)
                error("MISSING_IDENTIFIER", {e.id}, "entity '" + e.name + "' has no primary key attribute");
            if (e.is_weak && (is_sub || supers_.count(e.id)))
                error("WEAK_IN_HIERARCHY", {e.id}, "weak entity '" + e.name + "' cannot take part in a hierarchy");
        }
    }

    void check_relationships()
    {
        for (const auto& r : d_.relationships) {
            for (const auto* end : {&r.end_a, &r.end_b}) {
                const char* label = end == &r.end_a ? "end_a" : "end_b";
                if (!d_.find_entity(end->entity_id)) {
                    error("DANGLING_REF", {r.id, label},
                          "relationship '" + r.name + "' references unknown entity '" + end->entity_id + "'");
                }
                if (end->min_card != 0 && end->min_card != 1)
                    error("BAD_CARD", {r.id, label}, "min cardinality must be 0 or 1");
                if (end->role && !is_valid_sql_name(sql_name(*end->role)))
                    error("BAD_NAME", {r.id, label}, "role '" + *end->role + "' does not yield a valid SQL name");
                if (concrete_supers_.count(end->entity_id))
                    error("CONCRETE_SUPER_REL", {r.id, label},
                          "relationship '" + r.name + "' targets '" + end->entity_id +
                              "', the super-entity of a concrete hierarchy");
            }
            if (r.is_self()) {
                const auto& ra = r.end_a.role;
                const auto& rb = r.end_b.role;
                if (!ra || !rb || ra->empty() || rb->empty() || sql_name(*ra) == sql_name(*rb))
                    error("SELF_REL_ROLES", {r.id}, "self-relationship '" + r.name + "' needs two distinct roles");
            }
            check_attribute_list(r.id, r.attributes);
            for (const auto& a : r.attributes) {
                if (a.is_pk || a.is_partial_id || a.auto_increment)
                    error("REL_ATTR_KEY", {r.id, a.name}, "relationship attributes cannot be keys or auto-increment");
                if (!a.mandatory)
                    error("REL_ATTR_OPTIONAL", {r.id, a.name},
                          "relationship attribute '" + a.name + "' must be mandatory");
            }
        }
    }

    void check_hierarchies()
    {
        std::map<std::string, std::string> parent_of;
        std::map<std::string, std::string> hierarchy_of_super;
        for (const auto& h : d_.hierarchies) {
            if (!d_.find_entity(h.super_id))
                error("DANGLING_REF", {h.id, "super"}, "hierarchy super '" + h.super_id + "' does not exist");
            else if (auto [it, fresh] = hierarchy_of_super.emplace(h.super_id, h.id); !fresh)
                error("HIERARCHY_SHARED_SUPER", {h.id},
                      "entity '" + h.super_id + "' is already the super of hierarchy '" + it->second + "'");
            if (h.sub_ids.empty())
                error("HIERARCHY_EMPTY", {h.id}, "hierarchy has no sub-entities");
            std::set<std::string> seen;
            for (const auto& s : h.sub_ids) {
                if (!d_.find_entity(s))
                    error("DANGLING_REF", {h.id, s}, "hierarchy sub '" + s + "' does not exist");
                if (s == h.super_id)
                    error("HIERARCHY_SELF", {h.id, s}, "entity '" + s + "' cannot be its own sub-entity");
                if (!seen.insert(s).second)
                    error("HIERARCHY_DUP_SUB", {h.id, s}, "sub-entity '" + s + "' is listed twice");
                else if (auto [it, fresh] = parent_of.emplace(s, h.super_id); !fresh)
                    error("HIERARCHY_MULTI_PARENT", {h.id, s},
                          "entity '" + s + "' is already a sub-entity of '" + it->second + "'");
            }
        }
        // Walk sub -> super links; any revisit inside one walk is a cycle.
        std::set<std::string> reported;
        for (const auto& h : d_.hierarchies) {
            std::set<std::string> path;
            std::string cur = h.super_id;
            while (true) {
                if (!path.insert(cur).second) {
                    if (reported.insert(h.id).second)
                        error("HIERARCHY_CYCLE", {h.id}, "hierarchy '" + h.id + "' is part of an inheritance cycle");
                    break;
                }
                auto it = parent_of.find(cur);
                if (it == parent_of.end())
                    break;
                cur = it->second;
            }
        }
    }

    void check_weak_entities()
    {
        std::map<std::string, std::string> owner_of;
        for (const auto& e : d_.entities) {
            if (!e.is_weak)
                continue;
            auto cands = owner_candidates(d_, e.id);
            if (cands.size() != 1) {
                error("WEAK_WITHOUT_OWNER", {e.id},
                      "weak entity '" + e.name + "' needs exactly one relationship that is (1,1) at its owner; found " +
                          std::to_string(cands.size()));
                continue;
            }
            owner_of[e.id] = cands.front().second;
            if (const auto* rel = d_.find_relationship(cands.front().first); rel && !rel->attributes.empty())
                error("REL_ATTRS_INLINE", {rel->id},
                      "identifying relationship '" + rel->name + "' cannot carry attributes");
        }
        for (const auto& [weak, owner] : owner_of) {
            std::set<std::string> seen{weak};
            std::string cur = owner;
            std::size_t depth = 1;
            bool cycle = false;
            while (true) {
                auto it = owner_of.find(cur);
                if (it == owner_of.end())
                    break;
                if (!seen.insert(cur).second) {
                    cycle = true;
                    break;
                }
                cur = it->second;
                ++depth;
                if (cur == weak) {
                    cycle = true;
                    break;
                }
            }
            if (cycle)
                error("WEAK_CYCLE", {weak}, "weak entity '" + weak + "' is part of an ownership cycle");
            else if (depth > 2)
                warning("WEAK_CHAIN_DEPTH", {weak},
                        "weak entity '" + weak + "' is owned through a chain of " + std::to_string(depth) +
                            " weak entities; only one level of chaining is expected");
        }
    }

    void check_geometry()
    {
        for (const auto& [id, p] : d_.geometry) {
            const bool known = d_.find_entity(id) || d_.find_relationship(id) || d_.find_hierarchy(id);
            if (!known)
                error("BAD_GEOMETRY", {id}, "geometry refers to unknown element '" + id + "'");
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                error("BAD_GEOMETRY", {id}, "geometry of '" + id + "' is not finite");
        }
    }

    /// Rules that need the hierarchy-lowered view: merged attribute clashes and
    /// which relationships end up inlined.
    void check_lowered()
    {
        const LoweredDiagram lowered = lower_hierarchies(d_);
        for (const auto& e : lowered.diagram.entities) {
            std::set<std::string> names;
            for (const auto& a : e.attributes)
                if (!names.insert(sql_name(a.name)).second)
                    error("HIERARCHY_ATTR_CLASH", {e.id, a.name},
                          "hierarchy lowering gives '" + e.name + "' two attributes named '" + a.name + "'");
        }
        std::set<std::string> identifying;
        for (const auto& e : d_.entities)
            if (e.is_weak)
                if (auto owner = weak_owner_of(d_, e.id))
                    identifying.insert(owner->first);
        for (const auto& r : lowered.diagram.relationships) {
            if (r.attributes.empty() || identifying.count(r.id))
                continue;
            const bool normal = inlines_under(r, GenerationMode::Normal);
            const bool simplified = inlines_under(r, GenerationMode::Simplified);
            if (mode_) {
                if (inlines_under(r, *mode_))
                    error("REL_ATTRS_INLINE", {r.id},
                          "relationship '" + r.name + "' is lowered to an inline foreign key in " +
                              std::string(mode_name(*mode_)) + " mode, so its attributes have no table");
            } else if (normal && simplified) {
                error("REL_ATTRS_INLINE", {r.id},
                      "relationship '" + r.name + "' is always lowered to an inline foreign key, so its attributes "
                                                  "have no table");
            } else if (simplified) {
                warning("REL_ATTRS_INLINE", {r.id},
                        "relationship '" + r.name + "' has attributes and cannot be lowered in simplified mode");
            }
        }
    }

    const Diagram& d_;
    std::optional<GenerationMode> mode_;
    ValidationReport report_;
    std::set<std::string> supers_;
    std::set<std::string> concrete_supers_;
    std::set<std::string> subs_;
};

} // namespace

ValidationReport validate(const Diagram& diagram, std::optional<GenerationMode> mode)
{
    return Validator(diagram, mode).run();
}

std::optional<std::pair<std::string, std::string>> weak_owner_of(const Diagram& diagram, std::string_view entity_id)
{
    const Entity* e = diagram.find_entity(entity_id);
    if (!e)
        throw LookupError("unknown entity '" + std::string(entity_id) + "'");
    if (!e->is_weak)
        throw LookupError("entity '" + std::string(entity_id) + "' is not weak");
    auto cands = owner_candidates(diagram, entity_id);
    if (cands.size() != 1)
        return std::nullopt;
    return cands.front();
}

} // namespace onda
