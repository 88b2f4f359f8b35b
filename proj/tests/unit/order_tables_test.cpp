#include "onda/transform.hpp"

#include <gtest/gtest.h>

#include <map>

namespace onda {
namespace {

Table table(std::string name, std::vector<std::string> targets)
{
    Table t;
    t.name = name;
    t.columns.push_back(Column{"id", LogicalType::integer(), false, false, {}});
    t.primary_key = {"id"};
    int n = 0;
    for (auto& target : targets) {
        const std::string col = target + "_id" + (n ? "_" + std::to_string(n + 1) : "");
        t.columns.push_back(Column{col, LogicalType::integer(), true, false, {}});
        t.foreign_keys.push_back(ForeignKey{"fk_" + name + "_" + std::to_string(n++), {col}, target, {"id"}, {}});
    }
    return t;
}

std::vector<std::string> names(const PhysicalModel& m)
{
    std::vector<std::string> out;
    for (const auto& t : m.tables)
        out.push_back(t.name);
    return out;
}

/// Every non-deferred FK points at a table created earlier or at itself.
bool creation_safe(const PhysicalModel& m)
{
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < m.tables.size(); ++i)
        pos[m.tables[i].name] = i;
    for (std::size_t i = 0; i < m.tables.size(); ++i)
        for (const auto& fk : m.tables[i].foreign_keys)
            if (!m.is_deferred(m.tables[i].name, fk.name) && pos.at(fk.target_table) > i)
                return false;
    return true;
}

TEST(OrderTables, TargetsFirstTiesByName)
{
    PhysicalModel m;
    m.tables = {table("c", {"a"}), table("b", {}), table("a", {}), table("d", {"c", "b"})};
    const auto out = order_tables(m);
    EXPECT_EQ(names(out), (std::vector<std::string>{"a", "b", "c", "d"}));
    EXPECT_TRUE(out.deferred.empty());

    m.tables = {table("a", {"z"}), table("z", {})};
    EXPECT_EQ(names(order_tables(m)), (std::vector<std::string>{"z", "a"}));
}

TEST(OrderTables, TwoTableCycleDefersOne)
{
    PhysicalModel m;
    m.tables = {table("emp", {"dept"}), table("dept", {"emp"})};
    const auto out = order_tables(m);
    ASSERT_EQ(out.deferred.size(), 1u);
    EXPECT_EQ(out.deferred[0], (DeferredForeignKey{"dept", "fk_dept_0"}));
    EXPECT_EQ(names(out), (std::vector<std::string>{"dept", "emp"}));
    EXPECT_TRUE(creation_safe(out));
}

TEST(OrderTables, SelfReferenceNeedsNoDeferral)
{
    PhysicalModel m;
    m.tables = {table("node", {"node"})};
    EXPECT_TRUE(order_tables(m).deferred.empty());
}

TEST(OrderTables, MinimumDeferralSet)
{
    // a->b->c->a and a->c->a share the edge c->a; one deferral breaks both.
    PhysicalModel m;
    m.tables = {table("a", {"b", "c"}), table("b", {"c"}), table("c", {"a"})};
    const auto out = order_tables(m);
    ASSERT_EQ(out.deferred.size(), 1u);
    EXPECT_EQ(out.deferred[0], (DeferredForeignKey{"c", "fk_c_0"}));
    EXPECT_TRUE(creation_safe(out));
}

TEST(OrderTables, IndependentCycles)
{
    PhysicalModel m;
    m.tables = {table("p", {"q"}), table("q", {"p"}), table("x", {"y"}), table("y", {"x"}), table("z", {"p", "x"})};
    const auto out = order_tables(m);
    EXPECT_EQ(out.deferred.size(), 2u);
    EXPECT_TRUE(std::is_sorted(out.deferred.begin(), out.deferred.end()));
    EXPECT_TRUE(creation_safe(out));
    EXPECT_EQ(out.tables.back().name, "z");
}

TEST(OrderTables, PermutationInvariant)
{
    std::vector<Table> base{table("a", {"b"}), table("b", {"c"}), table("c", {"a", "d"}), table("d", {}), table("e", {"a"})};
    PhysicalModel first;
    first.tables = base;
    const auto expected = order_tables(first);
    std::sort(base.begin(), base.end(), [](const Table& x, const Table& y) { return x.name < y.name; });
    do {
        PhysicalModel m;
        m.tables = base;
        ASSERT_EQ(order_tables(m), expected);
    } while (std::next_permutation(base.begin(), base.end(),
                                   [](const Table& x, const Table& y) { return x.name < y.name; }));
}

TEST(OrderTables, LargeComponentStaysSafe)
{
    // A complete digraph on 6 tables has 30 edges, beyond the exact search.
    const std::vector<std::string> all{"t0", "t1", "t2", "t3", "t4", "t5"};
    PhysicalModel m;
    for (const auto& n : all) {
        std::vector<std::string> others;
        for (const auto& o : all)
            if (o != n)
                others.push_back(o);
        m.tables.push_back(table(n, others));
    }
    const auto out = order_tables(m);
    EXPECT_TRUE(creation_safe(out));
    EXPECT_EQ(out.deferred.size(), 15u);
}

} // namespace
} // namespace onda
