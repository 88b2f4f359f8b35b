#include "random_diagram.hpp"

#include <map>
#include <set>

namespace onda::testkit {

namespace {

class Generator
{
  public:
    Generator(std::mt19937_64& rng, const GeneratorOptions& o) : rng_(rng), o_(o) {}

    Diagram run()
    {
        Diagram d;
        d.name = "Random " + std::to_string(uniform(1, 9999));
        const int n = uniform(o_.min_entities, o_.max_entities);

        // Roles first: hierarchy membership, then weakness.
        std::vector<int> parent(n, -1);
        std::vector<bool> weak(n, false);
        for (int i = 1; i < n; ++i) {
            if (!chance(o_.sub_probability))
                continue;
            std::vector<int> candidates;
            for (int j = 0; j < i; ++j)
                if (!weak[j])
                    candidates.push_back(j);
            if (!candidates.empty())
                parent[i] = pick(candidates);
        }
        std::map<int, Strategy> strategy;
        for (int i = 0; i < n; ++i)
            if (parent[i] >= 0 && !strategy.count(parent[i])) {
                // A CONCRETE super merged by an outer SINGLE would duplicate its attributes.
                const int p = parent[i];
                const bool in_single = parent[p] >= 0 && strategy.at(parent[p]) == Strategy::Single;
                strategy[p] = in_single ? (chance(0.5) ? Strategy::Complete : Strategy::Single)
                                        : static_cast<Strategy>(uniform(0, 2));
            }
        auto concrete_super = [&](int i) {
            auto it = strategy.find(i);
            return it != strategy.end() && it->second == Strategy::Concrete;
        };
        std::vector<int> owner(n, -1);
        for (int i = 1; i < n; ++i) {
            if (parent[i] >= 0 || strategy.count(i) || !chance(o_.weak_probability))
                continue;
            std::vector<int> candidates;
            for (int j = 0; j < i; ++j)
                if (!concrete_super(j) && !(weak[j] && owner[j] >= 0 && weak[owner[j]]))
                    candidates.push_back(j);
            if (candidates.empty())
                continue;
            weak[i] = true;
            owner[i] = pick(candidates);
        }

        for (int i = 0; i < n; ++i) {
            Entity e;
            e.name = entity_name(i);
            e.id = e.name;
            e.is_weak = weak[i];
            if (parent[i] < 0 && !weak[i]) {
                const int pks = chance(0.75) ? 1 : 2;
                for (int k = 0; k < pks; ++k) {
                    Attribute a = attribute(true);
                    a.is_pk = true;
                    a.mandatory = true;
                    a.unique = false;
                    if (pks == 1 && chance(0.3)) {
                        a.type = chance(0.7) ? LogicalType::integer() : LogicalType::bigint();
                        a.auto_increment = true;
                        a.check_sql.reset();
                    }
                    e.attributes.push_back(std::move(a));
                }
            }
            if (weak[i]) {
                const int pids = uniform(0, 2);
                for (int k = 0; k < pids; ++k) {
                    Attribute a = attribute(true);
                    a.is_partial_id = true;
                    a.mandatory = true;
                    a.unique = false;
                    e.attributes.push_back(std::move(a));
                }
            }
            const int extra = uniform(0, 3);
            for (int k = 0; k < extra; ++k)
                e.attributes.push_back(attribute(false));
            d.entities.push_back(std::move(e));
        }

        for (const auto& [super, st] : strategy) {
            Hierarchy h;
            h.super_id = d.entities[super].id;
            h.id = h.super_id + "_isa";
            h.strategy = st;
            for (int i = 0; i < n; ++i)
                if (parent[i] == super)
                    h.sub_ids.push_back(d.entities[i].id);
            d.hierarchies.push_back(std::move(h));
        }

        int rel_counter = 0;
        std::vector<Relationship> rels;
        for (int i = 0; i < n; ++i) {
            if (!weak[i])
                continue;
            Relationship r;
            r.name = "Own" + std::to_string(++rel_counter);
            r.id = r.name;
            RelEnd owner_end{d.entities[owner[i]].id, 1, MaxCard::One, {}};
            RelEnd weak_end{d.entities[i].id, uniform(0, 1), MaxCard::Many, {}};
            if (chance(0.5)) {
                r.end_a = owner_end;
                r.end_b = weak_end;
            } else {
                r.end_a = weak_end;
                r.end_b = owner_end;
            }
            rels.push_back(std::move(r));
        }

        std::vector<int> relatable;
        for (int i = 0; i < n; ++i)
            if (!concrete_super(i))
                relatable.push_back(i);
        std::poisson_distribution<int> count_dist(o_.relationships_per_entity * n);
        const int m = relatable.empty() ? 0 : count_dist(rng_);
        for (int k = 0; k < m; ++k) {
            const int a = pick(relatable);
            const int b = pick(relatable);
            Relationship r;
            r.name = "Rel" + std::to_string(++rel_counter);
            r.id = r.name;
            r.end_a = RelEnd{d.entities[a].id, uniform(0, 1), chance(0.5) ? MaxCard::One : MaxCard::Many, {}};
            r.end_b = RelEnd{d.entities[b].id, uniform(0, 1), chance(0.5) ? MaxCard::One : MaxCard::Many, {}};
            // Only identifying relationships may be (1,1) opposite a weak entity.
            auto fix = [&](int weak_side, RelEnd& other) {
                if (weak[weak_side] && other.min_card == 1 && other.max_card == MaxCard::One)
                    other.min_card = 0;
            };
            fix(a, r.end_b);
            fix(b, r.end_a);
            if (a == b) {
                r.end_a.role = "src";
                r.end_b.role = "dst";
            }
            if (r.end_a.max_card == MaxCard::Many && r.end_b.max_card == MaxCard::Many) {
                const int attrs = chance(0.4) ? uniform(1, 2) : 0;
                for (int j = 0; j < attrs; ++j) {
                    Attribute at = attribute(false);
                    at.mandatory = true;
                    r.attributes.push_back(std::move(at));
                }
            }
            rels.push_back(std::move(r));
        }
        std::shuffle(rels.begin(), rels.end(), rng_);
        d.relationships = std::move(rels);

        if (o_.geometry) {
            auto place = [&](const std::string& id) {
                d.geometry[id] = CanvasPoint{uniform(-400, 4000) * 0.5, uniform(-400, 4000) * 0.25};
            };
            for (const auto& e : d.entities)
                place(e.id);
            for (const auto& r : d.relationships)
                if (chance(0.7))
                    place(r.id);
            for (const auto& h : d.hierarchies)
                place(h.id);
        }
        return d;
    }

  private:
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    template <typename T>
    const T& pick(const std::vector<T>& v)
    {
        return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
    }

    std::string entity_name(int i)
    {
        static const char* words[] = {"Person", "Course", "Order", "Line", "Item", "Student", "Room", "Team"};
        if (o_.fancy_names && chance(0.4))
            return std::string(words[uniform(0, 7)]) + " " + words[uniform(0, 7)] + " " + std::to_string(i);
        return "E" + std::to_string(i);
    }

    LogicalType random_type(bool key)
    {
        switch (uniform(0, key ? 5 : 8)) {
        case 0:
            return LogicalType::integer();
        case 1:
            return LogicalType::bigint();
        case 2:
            return LogicalType::varchar(uniform(1, 255));
        case 3: {
            const int p = uniform(1, 18);
            return chance(0.2) ? LogicalType::numeric(p) : LogicalType::numeric(p, uniform(0, p));
        }
        case 4:
            return LogicalType::date();
        case 5:
            return LogicalType::timestamp();
        case 6:
            return LogicalType::boolean();
        case 7:
            return LogicalType::text();
        default:
            return LogicalType::floating();
        }
    }

    Attribute attribute(bool key)
    {
        Attribute a;
        a.name = (o_.fancy_names && chance(0.2) ? "Attr " : "a") + std::to_string(++attr_counter_);
        a.type = random_type(key);
        a.mandatory = chance(0.5);
        a.unique = !key && chance(0.15);
        if (a.type.kind == TypeKind::Integer && chance(0.3))
            a.check_sql = sql_name(a.name) + " >= 0";
        return a;
    }

    std::mt19937_64& rng_;
    const GeneratorOptions& o_;
    int attr_counter_ = 0;
};

} // namespace

Diagram random_diagram(std::mt19937_64& rng, const GeneratorOptions& options)
{
    return Generator(rng, options).run();
}

ProjectDocument random_document(std::mt19937_64& rng, GeneratorOptions options)
{
    options.geometry = true;
    ProjectDocument doc;
    doc.diagram = random_diagram(rng, options);
    const int metas = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < metas; ++i)
        doc.meta["key" + std::to_string(i)] = "value \"" + std::to_string(i) + "\" é";
    return doc;
}

} // namespace onda::testkit
