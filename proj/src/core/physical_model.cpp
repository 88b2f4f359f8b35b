#include "onda/physical_model.hpp"

#include "json_support.hpp"

#include <algorithm>

namespace onda {

namespace detail {

ojson type_to_json(const LogicalType& type)
{
    ojson j = ojson::object();
    j["kind"] = std::string(type_kind_name(type.kind));
    if (type.length)
        j["length"] = *type.length;
    if (type.precision)
        j["precision"] = *type.precision;
    if (type.scale)
        j["scale"] = *type.scale;
    return j;
}

std::string dump_canonical(const ojson& value)
{
    return value.dump(2, ' ', false, nlohmann::json::error_handler_t::strict) + "\n";
}

} // namespace detail

std::string_view origin_kind_name(Origin::Kind kind)
{
    switch (kind) {
    case Origin::Kind::Entity:
        return "entity";
    case Origin::Kind::Relationship:
        return "relationship";
    case Origin::Kind::Hierarchy:
        return "hierarchy";
    }
    return "entity";
}

const Column* Table::find_column(std::string_view column) const
{
    auto it = std::find_if(columns.begin(), columns.end(), [&](const Column& c) { return c.name == column; });
    return it == columns.end() ? nullptr : &*it;
}

const ForeignKey* Table::find_foreign_key(std::string_view fk) const
{
    auto it = std::find_if(foreign_keys.begin(), foreign_keys.end(), [&](const ForeignKey& f) { return f.name == fk; });
    return it == foreign_keys.end() ? nullptr : &*it;
}

const Table* PhysicalModel::find_table(std::string_view name) const
{
    auto it = std::find_if(tables.begin(), tables.end(), [&](const Table& t) { return t.name == name; });
    return it == tables.end() ? nullptr : &*it;
}

bool PhysicalModel::is_deferred(std::string_view table, std::string_view fk) const
{
    return std::any_of(deferred.begin(), deferred.end(),
                       [&](const DeferredForeignKey& d) { return d.table == table && d.name == fk; });
}

namespace {

detail::ojson origin_to_json(const Origin& o)
{
    detail::ojson j = detail::ojson::object();
    j["kind"] = std::string(origin_kind_name(o.kind));
    j["id"] = o.id;
    return j;
}

} // namespace

std::string physical_model_to_json(const PhysicalModel& model)
{
    using detail::ojson;
    ojson root = ojson::object();
    root["source_name"] = model.source_name;
    root["mode"] = std::string(mode_name(model.mode));
    ojson tables = ojson::array();
    for (const auto& t : model.tables) {
        ojson jt = ojson::object();
        jt["name"] = t.name;
        jt["origin"] = origin_to_json(t.origin);
        ojson cols = ojson::array();
        for (const auto& c : t.columns) {
            ojson jc = ojson::object();
            jc["name"] = c.name;
            jc["type"] = detail::type_to_json(c.type);
            jc["nullable"] = c.nullable;
            jc["auto"] = c.auto_increment;
            if (c.check_sql)
                jc["check"] = *c.check_sql;
            cols.push_back(std::move(jc));
        }
        jt["columns"] = std::move(cols);
        jt["primary_key"] = t.primary_key;
        jt["uniques"] = t.uniques;
        jt["checks"] = t.checks;
        ojson fks = ojson::array();
        for (const auto& fk : t.foreign_keys) {
            ojson jf = ojson::object();
            jf["name"] = fk.name;
            jf["columns"] = fk.columns;
            jf["target_table"] = fk.target_table;
            jf["target_columns"] = fk.target_columns;
            jf["origin"] = origin_to_json(fk.origin);
            fks.push_back(std::move(jf));
        }
        jt["foreign_keys"] = std::move(fks);
        tables.push_back(std::move(jt));
    }
    root["tables"] = std::move(tables);
    ojson deferred = ojson::array();
    for (const auto& d : model.deferred)
        deferred.push_back(ojson{{"table", d.table}, {"name", d.name}});
    root["deferred_foreign_keys"] = std::move(deferred);
    return detail::dump_canonical(root);
}

} // namespace onda
