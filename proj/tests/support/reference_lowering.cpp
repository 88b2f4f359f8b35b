#include "reference_lowering.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace onda::testkit {

namespace {

struct KeyColumn
{
    std::string name;
    LogicalType type;
};

std::string with_suffix(const std::string& base, const std::set<std::string>& taken)
{
    if (!taken.count(base))
        return base;
    for (int i = 2;; ++i)
        if (!taken.count(base + "_" + std::to_string(i)))
            return base + "_" + std::to_string(i);
}

class Reference
{
  public:
    Reference(const Diagram& d, GenerationMode mode) : d_(d), mode_(mode)
    {
        if (d.hierarchies.size() > 1)
            throw std::logic_error("reference lowering handles at most one hierarchy");
        if (!d.hierarchies.empty())
            h_ = &d.hierarchies.front();
        for (const auto& e : d.entities)
            if (e.is_weak)
                for (const auto& r : d.relationships) {
                    if (r.end_a.entity_id == r.end_b.entity_id)
                        continue;
                    const RelEnd* other = r.end_a.entity_id == e.id   ? &r.end_b
                                          : r.end_b.entity_id == e.id ? &r.end_a
                                                                      : nullptr;
                    if (other && other->min_card == 1 && other->max_card == MaxCard::One) {
                        owner_[e.id] = other->entity_id;
                        owner_rel_[e.id] = r.id;
                        identifying_.insert(r.id);
                    }
                }
    }

    PhysicalModel run()
    {
        PhysicalModel m;
        m.mode = mode_;
        m.source_name = d_.name;
        for (const auto& e : d_.entities)
            if (has_table(e.id))
                tables_.push_back(entity_table(e));
        for (const auto& r : d_.relationships)
            if (!identifying_.count(r.id))
                relationship(r);
        m.tables = tables_;
        order(m);
        return m;
    }

  private:
    bool is_sub(const std::string& id, Strategy s) const
    {
        return h_ && h_->strategy == s && std::count(h_->sub_ids.begin(), h_->sub_ids.end(), id);
    }

    bool is_super(const std::string& id, Strategy s) const { return h_ && h_->strategy == s && h_->super_id == id; }

    bool has_table(const std::string& id) const
    {
        return !is_super(id, Strategy::Concrete) && !is_sub(id, Strategy::Single);
    }

    /// Entity whose table holds rows of `id`.
    std::string home(const std::string& id) const { return is_sub(id, Strategy::Single) ? h_->super_id : id; }

    const Entity& entity(const std::string& id) const { return *d_.find_entity(id); }

    std::string table_name(const std::string& id) const { return sql_name(entity(home(id)).name); }

    std::vector<KeyColumn> key_of(const std::string& raw_id) const
    {
        const std::string id = home(raw_id);
        const Entity& e = entity(id);
        std::vector<KeyColumn> key;
        if (is_sub(id, Strategy::Complete))
            return key_of(h_->super_id);
        if (e.is_weak) {
            std::set<std::string> own;
            for (const auto& a : e.attributes)
                own.insert(sql_name(a.name));
            const std::string owner = owner_.at(id);
            for (const auto& k : key_of(owner)) {
                const std::string n = with_suffix(table_name(owner) + "_" + k.name, own);
                own.insert(n);
                key.push_back({n, k.type});
            }
            bool pid = false;
            for (const auto& a : e.attributes)
                if (a.is_partial_id) {
                    key.push_back({sql_name(a.name), a.type});
                    pid = true;
                }
            if (!pid)
                key.push_back({with_suffix("seq", own), LogicalType::integer()});
            return key;
        }
        std::vector<const Attribute*> attrs;
        if (is_sub(id, Strategy::Concrete))
            for (const auto& a : entity(h_->super_id).attributes)
                attrs.push_back(&a);
        for (const auto& a : e.attributes)
            attrs.push_back(&a);
        for (const auto* a : attrs)
            if (a->is_pk)
                key.push_back({sql_name(a->name), a->type});
        return key;
    }

    static Column column(const Attribute& a, bool force_optional = false)
    {
        return Column{sql_name(a.name), a.type, force_optional || !(a.mandatory || a.is_pk || a.is_partial_id),
                      a.auto_increment, a.check_sql};
    }

    Table entity_table(const Entity& e) const
    {
        Table t;
        t.name = sql_name(e.name);
        t.origin = Origin{Origin::Kind::Entity, e.id};
        std::vector<std::string> key_names;
        for (const auto& k : key_of(e.id))
            key_names.push_back(k.name);

        std::vector<Attribute> attrs;
        if (is_sub(e.id, Strategy::Complete)) {
            for (const auto& k : key_of(h_->super_id))
                t.columns.push_back(Column{k.name, k.type, false, false, {}});
            t.primary_key = key_names;
            const Entity& super = entity(h_->super_id);
            t.foreign_keys.push_back(ForeignKey{"fk_" + t.name + "_" + sql_name(super.name), key_names,
                                                sql_name(super.name), key_names,
                                                Origin{Origin::Kind::Hierarchy, h_->id}});
            attrs = e.attributes;
        } else if (e.is_weak) {
            const std::string owner = owner_.at(e.id);
            const auto owner_key = key_of(owner);
            std::vector<std::string> fk_cols, target_cols;
            const auto key = key_of(e.id);
            for (std::size_t i = 0; i < owner_key.size(); ++i) {
                t.columns.push_back(Column{key[i].name, key[i].type, false, false, {}});
                fk_cols.push_back(key[i].name);
                target_cols.push_back(owner_key[i].name);
            }
            const bool has_pid =
                std::any_of(e.attributes.begin(), e.attributes.end(), [](const Attribute& a) { return a.is_partial_id; });
            if (!has_pid)
                t.columns.push_back(Column{key.back().name, LogicalType::integer(), false, false, {}});
            t.primary_key = key_names;
            t.foreign_keys.push_back(ForeignKey{"fk_" + t.name + "_" + table_name(owner), fk_cols, table_name(owner),
                                                target_cols, Origin{Origin::Kind::Relationship, owner_rel_.at(e.id)}});
            attrs = e.attributes;
        } else {
            if (is_sub(e.id, Strategy::Concrete))
                attrs = entity(h_->super_id).attributes;
            attrs.insert(attrs.end(), e.attributes.begin(), e.attributes.end());
            t.primary_key = key_names;
        }

        std::vector<Column> cols;
        for (const auto& a : attrs)
            cols.push_back(column(a));
        std::vector<const Attribute*> unique_source;
        for (const auto& a : attrs)
            unique_source.push_back(&a);

        if (is_super(e.id, Strategy::Single)) {
            std::string allowed = "'" + t.name + "'";
            for (const auto& sid : h_->sub_ids) {
                for (const auto& a : entity(sid).attributes) {
                    cols.push_back(column(a, true));
                    unique_source.push_back(&a);
                }
                allowed += ", '" + sql_name(entity(sid).name) + "'";
            }
            cols.push_back(Column{t.name + "_type", LogicalType::varchar(30), false, false, {}});
            t.checks.push_back(t.name + "_type IN (" + allowed + ")");
            t.origin = Origin{Origin::Kind::Hierarchy, h_->id};
        }
        t.columns.insert(t.columns.end(), cols.begin(), cols.end());
        for (const auto* a : unique_source) {
            const std::string n = sql_name(a->name);
            if (a->unique && t.primary_key != std::vector<std::string>{n})
                t.uniques.push_back({n});
        }
        return t;
    }

    Table& table(const std::string& name)
    {
        for (auto& t : tables_)
            if (t.name == name)
                return t;
        throw std::logic_error("no table " + name);
    }

    static std::string fk_name(const Table& host, const std::string& target)
    {
        std::set<std::string> taken;
        for (const auto& fk : host.foreign_keys)
            taken.insert(fk.name);
        return with_suffix("fk_" + host.name + "_" + target, taken);
    }

    void relationship(const Relationship& r)
    {
        RelEnd a = r.end_a, b = r.end_b;
        for (RelEnd* end : {&a, &b})
            if (is_sub(end->entity_id, Strategy::Single)) {
                end->entity_id = h_->super_id;
                end->min_card = 0;
            }
        const bool self = a.entity_id == b.entity_id;
        const std::string ta = table_name(a.entity_id), tb = table_name(b.entity_id);
        auto prefix = [&](const RelEnd& end) { return self && end.role ? sql_name(*end.role) + "_" : std::string(); };
        const Origin origin{Origin::Kind::Relationship, r.id};

        const bool a_one = a.max_card == MaxCard::One, b_one = b.max_card == MaxCard::One;
        int dep = -1; // -1: many-to-many
        if (a_one && !b_one)
            dep = 0;
        else if (b_one && !a_one)
            dep = 1;
        else if (a_one && b_one)
            dep = a.min_card != b.min_card ? (a.min_card == 1 ? 0 : 1) : (ta <= tb ? 0 : 1);
        const bool one_to_one = a_one && b_one;
        const RelEnd* dep_end = dep == 0 ? &a : dep == 1 ? &b : nullptr;
        const bool inline_fk = dep_end && (dep_end->min_card == 1 || mode_ == GenerationMode::Simplified);

        if (inline_fk) {
            const RelEnd& other = dep == 0 ? b : a;
            Table& host = table(dep == 0 ? ta : tb);
            const std::string target = dep == 0 ? tb : ta;
            std::set<std::string> taken;
            for (const auto& c : host.columns)
                taken.insert(c.name);
            std::vector<std::string> cols, target_cols;
            for (const auto& k : key_of(other.entity_id)) {
                const std::string n = with_suffix(prefix(other) + target + "_" + k.name, taken);
                taken.insert(n);
                host.columns.push_back(Column{n, k.type, dep_end->min_card == 0, false, {}});
                cols.push_back(n);
                target_cols.push_back(k.name);
            }
            if (one_to_one)
                host.uniques.push_back(cols);
            host.foreign_keys.push_back(ForeignKey{fk_name(host, target), cols, target, target_cols, origin});
            return;
        }

        Table t;
        std::set<std::string> names;
        for (const auto& x : tables_)
            names.insert(x.name);
        const std::string base = ta + "_" + tb;
        t.name = !names.count(base) ? base : with_suffix(base + "_rel", names);
        t.origin = origin;
        std::set<std::string> taken;
        for (const auto& at : r.attributes)
            taken.insert(sql_name(at.name));
        auto copy = [&](const RelEnd& end, const std::string& target, std::vector<std::string>& cols,
                        std::vector<std::string>& target_cols) {
            for (const auto& k : key_of(end.entity_id)) {
                const std::string n = with_suffix(prefix(end) + target + "_" + k.name, taken);
                taken.insert(n);
                t.columns.push_back(Column{n, k.type, false, false, {}});
                cols.push_back(n);
                target_cols.push_back(k.name);
            }
        };
        std::vector<std::string> cols_a, cols_b, tgt_a, tgt_b;
        copy(a, ta, cols_a, tgt_a);
        copy(b, tb, cols_b, tgt_b);
        for (const auto& at : r.attributes)
            t.columns.push_back(column(at));
        if (dep_end) {
            t.primary_key = dep == 0 ? cols_a : cols_b;
            if (one_to_one)
                t.uniques.push_back(dep == 0 ? cols_b : cols_a);
        } else {
            t.primary_key = cols_a;
            t.primary_key.insert(t.primary_key.end(), cols_b.begin(), cols_b.end());
        }
        for (const auto& at : r.attributes)
            if (at.unique)
                t.uniques.push_back({sql_name(at.name)});
        t.foreign_keys.push_back(ForeignKey{fk_name(t, ta), cols_a, ta, tgt_a, origin});
        t.foreign_keys.push_back(ForeignKey{fk_name(t, tb), cols_b, tb, tgt_b, origin});
        tables_.push_back(std::move(t));
    }

    /// Kahn's algorithm over the kept edges; empty result when they still form a cycle.
    static std::vector<std::string> kahn(const std::vector<Table>& tables,
                                         const std::set<std::pair<std::string, std::string>>& deferred)
    {
        std::set<std::string> placed, remaining;
        for (const auto& t : tables)
            remaining.insert(t.name);
        std::vector<std::string> out;
        while (!remaining.empty()) {
            std::string next;
            for (const auto& name : remaining) { // ascending
                const Table* t = nullptr;
                for (const auto& x : tables)
                    if (x.name == name)
                        t = &x;
                bool ready = true;
                for (const auto& fk : t->foreign_keys)
                    if (fk.target_table != name && !deferred.count({name, fk.name}) && !placed.count(fk.target_table))
                        ready = false;
                if (ready) {
                    next = name;
                    break;
                }
            }
            if (next.empty())
                return {};
            out.push_back(next);
            placed.insert(next);
            remaining.erase(next);
        }
        return out;
    }

    static void order(PhysicalModel& m)
    {
        std::vector<std::pair<std::string, std::string>> edges;
        for (const auto& t : m.tables)
            for (const auto& fk : t.foreign_keys)
                if (fk.target_table != t.name)
                    edges.emplace_back(t.name, fk.name);
        std::sort(edges.begin(), edges.end());
        if (edges.size() > 20)
            throw std::logic_error("too many edges for exhaustive deferral search");

        std::vector<std::pair<std::string, std::string>> best;
        std::vector<std::string> best_order;
        bool found = false;
        for (unsigned mask = 0; mask < (1u << edges.size()); ++mask) {
            std::vector<std::pair<std::string, std::string>> chosen;
            for (std::size_t i = 0; i < edges.size(); ++i)
                if (mask & (1u << i))
                    chosen.push_back(edges[i]);
            if (found && (chosen.size() > best.size() || (chosen.size() == best.size() && chosen >= best)))
                continue;
            auto ord = kahn(m.tables, {chosen.begin(), chosen.end()});
            if (ord.empty() && !m.tables.empty())
                continue;
            best = chosen;
            best_order = ord;
            found = true;
        }
        std::vector<Table> sorted;
        for (const auto& name : best_order)
            for (const auto& t : m.tables)
                if (t.name == name)
                    sorted.push_back(t);
        m.tables = sorted;
        m.deferred.clear();
        for (const auto& [table, name] : best)
            m.deferred.push_back(DeferredForeignKey{table, name});
    }

    const Diagram& d_;
    GenerationMode mode_;
    const Hierarchy* h_ = nullptr;
    std::map<std::string, std::string> owner_, owner_rel_;
    std::set<std::string> identifying_;
    std::vector<Table> tables_;
};

} // namespace

PhysicalModel reference_lowering(const Diagram& diagram, GenerationMode mode)
{
    return Reference(diagram, mode).run();
}

void enumerate_small_diagrams(const std::function<void(const Diagram&)>& visit)
{
    const LogicalType alphabet[2] = {LogicalType::integer(), LogicalType::varchar(20)};

    struct RelSpec
    {
        int a, b, min_a, min_b;
        bool many_a, many_b;
    };

    for (int n = 1; n <= 3; ++n) {
        std::vector<RelSpec> specs;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < 16; ++c)
                    specs.push_back(RelSpec{a, b, c & 1, (c >> 1) & 1, ((c >> 2) & 1) != 0, ((c >> 3) & 1) != 0});
        std::vector<std::vector<int>> rel_sets{{}};
        for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
            rel_sets.push_back({i});
            for (int j = i; j < static_cast<int>(specs.size()); ++j)
                rel_sets.push_back({i, j});
        }

        // hierarchy: -1 none, otherwise super * 2^n * 3 + subs mask * 3 + strategy
        std::vector<std::tuple<int, int, int>> hierarchies{{-1, 0, 0}};
        for (int super = 0; super < n; ++super)
            for (int subs = 1; subs < (1 << n); ++subs)
                if (!(subs & (1 << super)))
                    for (int s = 0; s < 3; ++s)
                        hierarchies.emplace_back(super, subs, s);

        for (int t = 0; t < 2; ++t)
            for (const auto& [super, subs, strategy] : hierarchies) {
                const int members = super < 0 ? 0 : (subs | (1 << super));
                for (int weak = 0; weak < (1 << n); ++weak) {
                    if (weak & members)
                        continue;
                    Diagram base;
                    base.name = "small";
                    for (int i = 0; i < n; ++i) {
                        Entity e;
                        e.name = "E" + std::to_string(i + 1);
                        e.id = e.name;
                        e.is_weak = (weak >> i) & 1;
                        const LogicalType& key_type = alphabet[(i + t) % 2];
                        const bool sub = (subs >> i) & 1 && super >= 0;
                        if (sub)
                            e.attributes.push_back(
                                Attribute{"s" + std::to_string(i + 1), alphabet[(i + t + 1) % 2], false, false, true,
                                          false, false, {}});
                        else if (e.is_weak) {
                            if (t == 0)
                                e.attributes.push_back(
                                    Attribute{"p" + std::to_string(i + 1), key_type, false, true, true, false, false, {}});
                        } else
                            e.attributes.push_back(
                                Attribute{"k" + std::to_string(i + 1), key_type, true, false, true, false, false, {}});
                        base.entities.push_back(std::move(e));
                    }
                    if (super >= 0) {
                        Hierarchy h;
                        h.super_id = base.entities[super].id;
                        h.id = h.super_id + "_isa";
                        h.strategy = static_cast<Strategy>(strategy);
                        for (int i = 0; i < n; ++i)
                            if ((subs >> i) & 1)
                                h.sub_ids.push_back(base.entities[i].id);
                        base.hierarchies.push_back(std::move(h));
                    }
                    for (const auto& set : rel_sets) {
                        Diagram d = base;
                        int k = 0;
                        for (int idx : set) {
                            const RelSpec& s = specs[idx];
                            Relationship r;
                            r.name = "R" + std::to_string(++k);
                            r.id = r.name;
                            r.end_a = RelEnd{d.entities[s.a].id, s.min_a, s.many_a ? MaxCard::Many : MaxCard::One, {}};
                            r.end_b = RelEnd{d.entities[s.b].id, s.min_b, s.many_b ? MaxCard::Many : MaxCard::One, {}};
                            if (s.a == s.b) {
                                r.end_a.role = "x";
                                r.end_b.role = "y";
                            }
                            if (s.many_a && s.many_b)
                                r.attributes.push_back(Attribute{"r" + std::to_string(k), alphabet[(k + t) % 2], false,
                                                                 false, true, false, false, {}});
                            d.relationships.push_back(std::move(r));
                        }
                        visit(d);
                    }
                }
            }
    }
}

} // namespace onda::testkit
