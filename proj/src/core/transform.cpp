#include "onda/transform.hpp"

#include "onda/error.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace onda {

namespace {

std::set<std::string> identifying_relationships(const Diagram& d)
{
    std::set<std::string> out;
    for (const auto& e : d.entities)
        if (e.is_weak)
            if (auto owner = weak_owner_of(d, e.id))
                out.insert(owner->first);
    return out;
}

template <typename T>
void erase_by_id(std::vector<T>& v, std::string_view id)
{
    v.erase(std::remove_if(v.begin(), v.end(), [&](const T& x) { return x.id == id; }), v.end());
}

void lower_complete(LoweredDiagram& out, const Hierarchy& h)
{
    for (const auto& sub : h.sub_ids)
        out.inherits_from[sub] = Inheritance{h.super_id, h.id};
}

void lower_concrete(LoweredDiagram& out, const Hierarchy& h)
{
    Diagram& d = out.diagram;
    const Entity super = *d.find_entity(h.super_id);
    for (const auto& r : d.relationships)
        if (r.end_a.entity_id == super.id || r.end_b.entity_id == super.id)
            throw ContractError("relationship '" + r.id + "' targets concrete super-entity '" + super.id + "'");

    const auto super_checks = out.table_checks[super.id];
    for (const auto& sub_id : h.sub_ids) {
        Entity* sub = d.find_entity(sub_id);
        sub->attributes.insert(sub->attributes.begin(), super.attributes.begin(), super.attributes.end());
        auto& checks = out.table_checks[sub_id];
        checks.insert(checks.begin(), super_checks.begin(), super_checks.end());
        if (checks.empty())
            out.table_checks.erase(sub_id);
    }
    // A parent hierarchy listing the removed super now lists its subs instead.
    for (auto& other : d.hierarchies) {
        auto it = std::find(other.sub_ids.begin(), other.sub_ids.end(), super.id);
        if (it == other.sub_ids.end())
            continue;
        it = other.sub_ids.erase(it);
        other.sub_ids.insert(it, h.sub_ids.begin(), h.sub_ids.end());
    }
    out.table_checks.erase(super.id);
    out.table_origins.erase(super.id);
    d.geometry.erase(super.id);
    erase_by_id(d.entities, super.id);
}

void lower_single(LoweredDiagram& out, const Hierarchy& h)
{
    Diagram& d = out.diagram;
    const auto identifying = identifying_relationships(d);
    const std::set<std::string> subs(h.sub_ids.begin(), h.sub_ids.end());

    Entity* super = d.find_entity(h.super_id);
    const std::string super_sql = sql_name(super->name);
    std::string allowed = "'" + super_sql + "'";
    auto& super_checks = out.table_checks[h.super_id];
    for (const auto& sub_id : h.sub_ids) {
        const Entity* sub = d.find_entity(sub_id);
        for (Attribute a : sub->attributes) {
            a.mandatory = false;
            super->attributes.push_back(std::move(a));
        }
        allowed += ", '" + sql_name(sub->name) + "'";
        if (auto it = out.table_checks.find(sub_id); it != out.table_checks.end()) {
            super_checks.insert(super_checks.end(), it->second.begin(), it->second.end());
            out.table_checks.erase(it);
        }
    }
    const std::string discriminator = super_sql + "_type";
    super->attributes.push_back(Attribute{discriminator, LogicalType::varchar(30), false, false, true, false, false, {}});
    super_checks.push_back(discriminator + " IN (" + allowed + ")");
    out.table_origins[h.super_id] = Origin{Origin::Kind::Hierarchy, h.id};

    for (auto& [from, into] : out.merged_into)
        if (subs.count(into))
            into = h.super_id;
    for (auto& [sub, inh] : out.inherits_from)
        if (subs.count(inh.super_id))
            inh.super_id = h.super_id;
    for (auto& r : d.relationships) {
        for (RelEnd* end : {&r.end_a, &r.end_b}) {
            if (!subs.count(end->entity_id))
                continue;
            end->entity_id = h.super_id;
            // The merged table also holds rows that never were this sub.
            if (!identifying.count(r.id))
                end->min_card = 0;
        }
    }
    for (const auto& sub_id : h.sub_ids) {
        out.merged_into[sub_id] = h.super_id;
        out.table_origins.erase(sub_id);
        d.geometry.erase(sub_id);
        erase_by_id(d.entities, sub_id);
    }
}

} // namespace

LoweredDiagram lower_hierarchy(const LoweredDiagram& state, const Hierarchy& h)
{
    LoweredDiagram out = state;
    Diagram& d = out.diagram;
    if (!d.find_hierarchy(h.id) || !d.find_entity(h.super_id))
        throw ContractError("hierarchy '" + h.id + "' does not belong to the diagram");
    for (const auto& s : h.sub_ids)
        if (!d.find_entity(s))
            throw ContractError("hierarchy '" + h.id + "' references unknown sub-entity '" + s + "'");
    for (const auto& other : d.hierarchies)
        if (other.id != h.id && std::find(h.sub_ids.begin(), h.sub_ids.end(), other.super_id) != h.sub_ids.end())
            throw ContractError("hierarchy '" + other.id + "' below '" + h.id + "' is not lowered yet");

    erase_by_id(d.hierarchies, h.id);
    d.geometry.erase(h.id);
    switch (h.strategy) {
    case Strategy::Complete:
        lower_complete(out, h);
        break;
    case Strategy::Concrete:
        lower_concrete(out, h);
        break;
    case Strategy::Single:
        lower_single(out, h);
        break;
    }
    return out;
}

LoweredDiagram lower_hierarchy(const Diagram& diagram, const Hierarchy& h)
{
    return lower_hierarchy(LoweredDiagram{diagram, {}, {}, {}, {}}, h);
}

LoweredDiagram lower_hierarchies(const Diagram& diagram)
{
    std::map<std::string, std::string> parent_of;
    for (const auto& h : diagram.hierarchies)
        for (const auto& s : h.sub_ids)
            parent_of[s] = h.super_id;
    auto depth = [&](const Hierarchy& h) {
        std::size_t n = 0;
        for (auto it = parent_of.find(h.super_id); it != parent_of.end() && n <= parent_of.size();
             it = parent_of.find(it->second))
            ++n;
        return n;
    };
    std::vector<std::pair<std::size_t, std::string>> order;
    for (const auto& h : diagram.hierarchies)
        order.emplace_back(depth(h), h.id);
    std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
    });

    LoweredDiagram state{diagram, {}, {}, {}, {}};
    for (const auto& [_, id] : order) {
        const Hierarchy h = *state.diagram.find_hierarchy(id);
        state = lower_hierarchy(state, h);
    }
    return state;
}

RelationalAction map_relationship(const Relationship& rel, GenerationMode mode, std::string_view table_a,
                                  std::string_view table_b)
{
    const bool a_one = rel.end_a.max_card == MaxCard::One;
    const bool b_one = rel.end_b.max_card == MaxCard::One;
    RelationalAction action;
    if (!a_one && !b_one)
        return action; // many-to-many: association keyed by both sides

    if (a_one && b_one) {
        action.one_to_one = true;
        const bool a_min = rel.end_a.min_card == 1;
        const bool b_min = rel.end_b.min_card == 1;
        if (a_min != b_min)
            action.dependent_end = a_min ? 0 : 1;
        else
            action.dependent_end = table_a <= table_b ? 0 : 1;
    } else {
        action.dependent_end = a_one ? 0 : 1;
    }
    const RelEnd& dep = action.dependent_end == 0 ? rel.end_a : rel.end_b;
    if (dep.min_card == 1) {
        action.kind = RelationalAction::Kind::InlineForeignKey;
    } else if (mode == GenerationMode::Simplified) {
        action.kind = RelationalAction::Kind::InlineForeignKey;
        action.nullable = true;
    } else {
        action.kind = RelationalAction::Kind::AssociationTable;
        action.key_is_dependent = true;
    }
    return action;
}

namespace {

std::string next_free(const std::set<std::string>& taken, const std::string& base)
{
    if (!taken.count(base))
        return base;
    for (int i = 2;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!taken.count(candidate))
            return candidate;
    }
}

std::set<std::string> column_names(const Table& t)
{
    std::set<std::string> out;
    for (const auto& c : t.columns)
        out.insert(c.name);
    return out;
}

std::string fk_name(const Table& host, const std::string& target)
{
    std::set<std::string> taken;
    for (const auto& fk : host.foreign_keys)
        taken.insert(fk.name);
    return next_free(taken, "fk_" + host.name + "_" + target);
}

Column column_from(const Attribute& a)
{
    return Column{sql_name(a.name), a.type, !(a.mandatory || a.is_pk || a.is_partial_id), a.auto_increment,
                  a.check_sql};
}

/// Key columns of `target` copied into a referencing table, with their generated names.
struct KeyCopy
{
    std::vector<Column> columns;
    std::vector<std::string> target_columns;
};

KeyCopy copy_key(const Table& target, std::set<std::string>& taken, const std::string& prefix, bool nullable,
                 bool keep_names)
{
    KeyCopy out;
    for (const auto& pk : target.primary_key) {
        const Column* src = target.find_column(pk);
        const std::string base = keep_names ? pk : prefix + target.name + "_" + pk;
        Column c{next_free(taken, base), src->type, nullable, false, {}};
        taken.insert(c.name);
        out.columns.push_back(std::move(c));
        out.target_columns.push_back(pk);
    }
    return out;
}

std::vector<std::string> names_of(const std::vector<Column>& cols)
{
    std::vector<std::string> out;
    for (const auto& c : cols)
        out.push_back(c.name);
    return out;
}

class Lowerer
{
  public:
    Lowerer(const LoweredDiagram& ld, GenerationMode mode) : ld_(ld), mode_(mode)
    {
        for (const auto& e : ld_.diagram.entities)
            if (e.is_weak)
                if (auto owner = weak_owner_of(ld_.diagram, e.id)) {
                    owner_of_[e.id] = *owner;
                    identifying_.insert(owner->first);
                }
    }

    PhysicalModel run()
    {
        PhysicalModel model;
        model.mode = mode_;
        model.source_name = ld_.diagram.name;
        for (const auto& e : ld_.diagram.entities) {
            entity_table(e.id);
            table_names_.insert(sql_name(e.name));
        }
        for (const auto& r : ld_.diagram.relationships)
            if (!identifying_.count(r.id))
                lower_relationship(r);
        for (const auto& e : ld_.diagram.entities)
            model.tables.push_back(std::move(tables_.at(e.id)));
        for (auto& t : relationship_tables_)
            model.tables.push_back(std::move(t));
        return order_tables(std::move(model));
    }

  private:
    Table& entity_table(const std::string& id)
    {
        if (auto it = tables_.find(id); it != tables_.end())
            return it->second;
        if (!in_progress_.insert(id).second)
            throw ContractError("cyclic key dependency through '" + id + "'");
        const Entity& e = *ld_.diagram.find_entity(id);

        Table t;
        t.name = sql_name(e.name);
        if (auto it = ld_.table_origins.find(id); it != ld_.table_origins.end())
            t.origin = it->second;
        else
            t.origin = Origin{Origin::Kind::Entity, id};

        std::vector<Column> own;
        std::set<std::string> taken;
        for (const auto& a : e.attributes) {
            own.push_back(column_from(a));
            taken.insert(own.back().name);
        }

        std::vector<Column> generated;
        if (auto inh = ld_.inherits_from.find(id); inh != ld_.inherits_from.end()) {
            const Table& super = entity_table(inh->second.super_id);
            KeyCopy key = copy_key(super, taken, "", false, true);
            t.primary_key = names_of(key.columns);
            t.foreign_keys.push_back(ForeignKey{"fk_" + t.name + "_" + super.name, t.primary_key, super.name,
                                                key.target_columns,
                                                Origin{Origin::Kind::Hierarchy, inh->second.hierarchy_id}});
            generated = std::move(key.columns);
        } else if (e.is_weak) {
            const auto& [rel_id, owner_id] = owner_of_.at(id);
            const Table& owner = entity_table(owner_id);
            KeyCopy key = copy_key(owner, taken, "", false, false);
            t.primary_key = names_of(key.columns);
            t.foreign_keys.push_back(ForeignKey{"fk_" + t.name + "_" + owner.name, t.primary_key, owner.name,
                                                key.target_columns, Origin{Origin::Kind::Relationship, rel_id}});
            generated = std::move(key.columns);
            bool has_partial = false;
            for (const auto& a : e.attributes)
                if (a.is_partial_id) {
                    t.primary_key.push_back(sql_name(a.name));
                    has_partial = true;
                }
            if (!has_partial) {
                Column seq{next_free(taken, "seq"), LogicalType::integer(), false, false, {}};
                t.primary_key.push_back(seq.name);
                generated.push_back(std::move(seq));
            }
        } else {
            for (const auto& a : e.attributes)
                if (a.is_pk)
                    t.primary_key.push_back(sql_name(a.name));
        }

        t.columns = std::move(generated);
        t.columns.insert(t.columns.end(), own.begin(), own.end());
        for (const auto& a : e.attributes)
            if (a.unique && !(t.primary_key.size() == 1 && t.primary_key.front() == sql_name(a.name)))
                t.uniques.push_back({sql_name(a.name)});
        if (auto it = ld_.table_checks.find(id); it != ld_.table_checks.end())
            t.checks = it->second;

        in_progress_.erase(id);
        return tables_.emplace(id, std::move(t)).first->second;
    }

    void lower_relationship(const Relationship& r)
    {
        Table& ta = tables_.at(r.end_a.entity_id);
        Table& tb = tables_.at(r.end_b.entity_id);
        const bool self = r.end_a.entity_id == r.end_b.entity_id;
        const RelationalAction action = map_relationship(r, mode_, ta.name, tb.name);
        auto prefix_for = [&](const RelEnd& end) {
            return self && end.role ? sql_name(*end.role) + "_" : std::string();
        };
        const Origin origin{Origin::Kind::Relationship, r.id};

        if (action.kind == RelationalAction::Kind::InlineForeignKey) {
            const RelEnd& other_end = action.dependent_end == 0 ? r.end_b : r.end_a;
            Table& host = action.dependent_end == 0 ? ta : tb;
            const Table target = action.dependent_end == 0 ? tb : ta;
            auto taken = column_names(host);
            KeyCopy key = copy_key(target, taken, prefix_for(other_end), action.nullable, false);
            auto cols = names_of(key.columns);
            host.columns.insert(host.columns.end(), key.columns.begin(), key.columns.end());
            if (action.one_to_one)
                host.uniques.push_back(cols);
            host.foreign_keys.push_back(
                ForeignKey{fk_name(host, target.name), cols, target.name, key.target_columns, origin});
            return;
        }

        Table t;
        t.name = next_free_table(ta.name + "_" + tb.name);
        t.origin = origin;
        std::set<std::string> taken;
        for (const auto& a : r.attributes)
            taken.insert(sql_name(a.name));
        KeyCopy ka = copy_key(ta, taken, prefix_for(r.end_a), false, false);
        KeyCopy kb = copy_key(tb, taken, prefix_for(r.end_b), false, false);
        const auto cols_a = names_of(ka.columns);
        const auto cols_b = names_of(kb.columns);
        t.columns = ka.columns;
        t.columns.insert(t.columns.end(), kb.columns.begin(), kb.columns.end());
        for (const auto& a : r.attributes)
            t.columns.push_back(column_from(a));

        if (action.key_is_dependent) {
            t.primary_key = action.dependent_end == 0 ? cols_a : cols_b;
            if (action.one_to_one)
                t.uniques.push_back(action.dependent_end == 0 ? cols_b : cols_a);
        } else {
            t.primary_key = cols_a;
            t.primary_key.insert(t.primary_key.end(), cols_b.begin(), cols_b.end());
        }
        for (const auto& a : r.attributes)
            if (a.unique)
                t.uniques.push_back({sql_name(a.name)});
        t.foreign_keys.push_back(ForeignKey{fk_name(t, ta.name), cols_a, ta.name, ka.target_columns, origin});
        t.foreign_keys.push_back(ForeignKey{fk_name(t, tb.name), cols_b, tb.name, kb.target_columns, origin});
        table_names_.insert(t.name);
        relationship_tables_.push_back(std::move(t));
    }

    std::string next_free_table(const std::string& base)
    {
        if (!table_names_.count(base))
            return base;
        return next_free(table_names_, base + "_rel");
    }

    const LoweredDiagram& ld_;
    GenerationMode mode_;
    std::map<std::string, std::pair<std::string, std::string>> owner_of_;
    std::set<std::string> identifying_;
    std::map<std::string, Table> tables_;
    std::set<std::string> in_progress_;
    std::set<std::string> table_names_;
    std::vector<Table> relationship_tables_;
};

} // namespace

PhysicalModel transform(const Diagram& diagram, GenerationMode mode)
{
    const ValidationReport report = validate(diagram, mode);
    if (!report.is_valid()) {
        const auto first = std::find_if(report.findings.begin(), report.findings.end(),
                                        [](const Finding& f) { return f.severity == Severity::Error; });
        throw ContractError("transform requires a valid diagram: " + first->code + " " + first->message);
    }
    return Lowerer(lower_hierarchies(diagram), mode).run();
}

} // namespace onda
