#include "onda/model_io.hpp"
#include "onda/transform.hpp"

#include "random_diagram.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <set>

namespace onda {
namespace {

struct Mutation
{
    const char* code;
    /// Returns false when the diagram offers nothing to mutate.
    std::function<bool(Diagram&, std::mt19937_64&)> apply;
};

Entity* pick_entity(Diagram& d, std::mt19937_64& rng, const std::function<bool(const Entity&)>& pred)
{
    std::vector<Entity*> candidates;
    for (auto& e : d.entities)
        if (pred(e))
            candidates.push_back(&e);
    if (candidates.empty())
        return nullptr;
    return candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
}

bool has_pk(const Entity& e)
{
    for (const auto& a : e.attributes)
        if (a.is_pk)
            return true;
    return false;
}

const std::vector<Mutation>& mutations()
{
    static const std::vector<Mutation> all{
        {"MISSING_IDENTIFIER",
         [](Diagram& d, std::mt19937_64& rng) {
             Entity* e = pick_entity(d, rng, has_pk);
             if (!e)
                 return false;
             std::erase_if(e->attributes, [](const Attribute& a) { return a.is_pk; });
             return true;
         }},
        {"DUP_ATTR",
         [](Diagram& d, std::mt19937_64& rng) {
             Entity* e = pick_entity(d, rng, [](const Entity& x) { return !x.attributes.empty(); });
             if (!e)
                 return false;
             Attribute copy = e->attributes.back();
             copy.is_pk = copy.is_partial_id = copy.auto_increment = false;
             e->attributes.push_back(copy);
             return true;
         }},
        {"DANGLING_REF",
         [](Diagram& d, std::mt19937_64&) {
             if (d.relationships.empty())
                 return false;
             d.relationships.back().end_b.entity_id = "Nowhere";
             return true;
         }},
        {"WEAK_HAS_PK",
         [](Diagram& d, std::mt19937_64& rng) {
             Entity* e = pick_entity(d, rng, [](const Entity& x) { return x.is_weak; });
             if (!e)
                 return false;
             Attribute a{"extra_key", LogicalType::integer(), true, false, true, false, false, {}};
             e->attributes.push_back(a);
             return true;
         }},
        {"HIERARCHY_SELF",
         [](Diagram& d, std::mt19937_64&) {
             if (d.hierarchies.empty())
                 return false;
             d.hierarchies[0].sub_ids.push_back(d.hierarchies[0].super_id);
             return true;
         }},
        {"BAD_CARD",
         [](Diagram& d, std::mt19937_64&) {
             if (d.relationships.empty())
                 return false;
             d.relationships[0].end_a.min_card = 2;
             return true;
         }},
        {"DUP_ID",
         [](Diagram& d, std::mt19937_64&) {
             if (d.entities.size() < 2)
                 return false;
             d.entities[1].id = d.entities[0].id;
             return true;
         }},
        {"BAD_TYPE",
         [](Diagram& d, std::mt19937_64& rng) {
             Entity* e = pick_entity(d, rng, [](const Entity& x) { return !x.attributes.empty(); });
             if (!e)
                 return false;
             e->attributes.front().type.length = -1;
             return true;
         }},
        {"AUTOINC_NOT_PK",
         [](Diagram& d, std::mt19937_64& rng) {
             Entity* e = pick_entity(d, rng, [](const Entity& x) { return !x.is_weak; });
             if (!e)
                 return false;
             e->attributes.push_back(Attribute{"counter", LogicalType::integer(), false, false, false, false, true, {}});
             return true;
         }},
    };
    return all;
}

TEST(Properties, InjectedViolationsAreReported)
{
    std::mt19937_64 rng(17);
    std::map<std::string, int> applied;
    for (int i = 0; i < 400; ++i) {
        Diagram d = testkit::random_diagram(rng);
        ASSERT_TRUE(validate(d).is_valid());
        const auto& m = mutations()[static_cast<std::size_t>(i) % mutations().size()];
        if (!m.apply(d, rng))
            continue;
        ++applied[m.code];
        const auto report = validate(d);
        EXPECT_TRUE(report.has(m.code)) << m.code << "\n" << emit_dsl(d).text;
        EXPECT_FALSE(report.is_valid()) << m.code;
    }
    for (const auto& m : mutations())
        EXPECT_GT(applied[m.code], 0) << m.code;
}

/// Structural invariants every lowered model must satisfy.
void check_model(const PhysicalModel& m)
{
    std::set<std::string> seen;
    for (const auto& t : m.tables) {
        ASSERT_TRUE(seen.insert(t.name).second) << t.name;
        EXPECT_FALSE(t.primary_key.empty()) << t.name;
        std::set<std::string> cols;
        for (const auto& c : t.columns)
            EXPECT_TRUE(cols.insert(c.name).second) << t.name << "." << c.name;
        for (const auto& k : t.primary_key)
            EXPECT_FALSE(t.find_column(k)->nullable) << t.name << "." << k;
        for (const auto& fk : t.foreign_keys) {
            const Table* target = m.find_table(fk.target_table);
            ASSERT_TRUE(target) << fk.name;
            EXPECT_EQ(fk.target_columns, target->primary_key) << fk.name;
            ASSERT_EQ(fk.columns.size(), fk.target_columns.size());
            for (std::size_t i = 0; i < fk.columns.size(); ++i) {
                const Column* c = t.find_column(fk.columns[i]);
                ASSERT_TRUE(c) << fk.name;
                EXPECT_EQ(c->type, target->find_column(fk.target_columns[i])->type) << fk.name;
                EXPECT_FALSE(c->auto_increment) << fk.name;
            }
        }
    }
}

TEST(Properties, LoweredModelsAreWellFormed)
{
    std::mt19937_64 rng(23);
    testkit::GeneratorOptions opts;
    opts.fancy_names = true;
    for (int i = 0; i < 300; ++i) {
        const Diagram d = testkit::random_diagram(rng, opts);
        for (auto mode : {GenerationMode::Normal, GenerationMode::Simplified}) {
            const auto m = transform(d, mode);
            check_model(m);
            EXPECT_EQ(order_tables(m), m);
            EXPECT_EQ(transform(d, mode), m);
        }
    }
}

TEST(Properties, SimplifiedNeverHasMoreTables)
{
    std::mt19937_64 rng(29);
    for (int i = 0; i < 300; ++i) {
        const Diagram d = testkit::random_diagram(rng);
        EXPECT_LE(transform(d, GenerationMode::Simplified).tables.size(),
                  transform(d, GenerationMode::Normal).tables.size());
    }
}

TEST(Properties, GeneratorIsValidInBothModes)
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 300; ++i) {
        const Diagram d = testkit::random_diagram(rng);
        ASSERT_TRUE(validate(d, GenerationMode::Normal).is_valid()) << emit_dsl(d).text;
        ASSERT_TRUE(validate(d, GenerationMode::Simplified).is_valid()) << emit_dsl(d).text;
    }
}

} // namespace
} // namespace onda
