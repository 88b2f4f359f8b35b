#include "onda/transform.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace onda {

namespace {

struct Edge
{
    std::size_t from; // referencing table
    std::size_t to;   // referenced table
    DeferredForeignKey id;
};

bool acyclic(std::size_t n, const std::vector<Edge>& edges, const std::vector<bool>& removed)
{
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (removed[i])
            continue;
        out[edges[i].to].push_back(edges[i].from);
        ++indegree[edges[i].from];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0)
            ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        const std::size_t v = ready.back();
        ready.pop_back();
        ++seen;
        for (auto w : out[v])
            if (--indegree[w] == 0)
                ready.push_back(w);
    }
    return seen == n;
}

/// Tarjan's algorithm; returns the component index of every vertex.
std::vector<std::size_t> strongly_connected(std::size_t n, const std::vector<Edge>& edges, std::size_t& count)
{
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : edges)
        adj[e.from].push_back(e.to);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack, comp(n, 0);
    int counter = 0;
    count = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = count;
            } while (w != v);
            ++count;
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0)
            visit(v);
    return comp;
}

constexpr std::size_t kExactLimit = 16;

/// Smallest set of edges whose removal makes the component acyclic; among
/// equally small sets the lexicographically first by (table, fk name).
std::vector<std::size_t> minimum_deferral(std::size_t n, const std::vector<Edge>& edges)
{
    const std::size_t m = edges.size();
    std::vector<bool> removed(m, false);
    if (m <= kExactLimit) {
        for (std::size_t k = 1; k <= m; ++k) {
            std::vector<std::size_t> pick(k);
            for (std::size_t i = 0; i < k; ++i)
                pick[i] = i;
            while (true) {
                std::fill(removed.begin(), removed.end(), false);
                for (auto i : pick)
                    removed[i] = true;
                if (acyclic(n, edges, removed))
                    return pick;
                // next combination in lexicographic order
                std::size_t i = k;
                while (i > 0 && pick[i - 1] == m - k + i - 1)
                    --i;
                if (i == 0)
                    break;
                ++pick[i - 1];
                for (std::size_t j = i; j < k; ++j)
                    pick[j] = pick[j - 1] + 1;
            }
        }
        return {};
    }
    // FIXME: large components fall back to greedy removal plus pruning, which is not guaranteed minimal.
    for (std::size_t i = 0; i < m && !acyclic(n, edges, removed); ++i)
        removed[i] = true;
    for (std::size_t i = m; i-- > 0;) {
        if (!removed[i])
            continue;
        removed[i] = false;
        if (!acyclic(n, edges, removed))
            removed[i] = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i)
        if (removed[i])
            out.push_back(i);
    return out;
}

} // namespace

PhysicalModel order_tables(PhysicalModel model)
{
    auto& tables = model.tables;
    std::sort(tables.begin(), tables.end(), [](const Table& a, const Table& b) { return a.name < b.name; });
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < tables.size(); ++i)
        index.emplace(tables[i].name, i);

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (const auto& fk : tables[i].foreign_keys) {
            auto it = index.find(fk.target_table);
            if (it != index.end() && it->second != i)
                edges.push_back(Edge{i, it->second, DeferredForeignKey{tables[i].name, fk.name}});
        }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });

    std::size_t components = 0;
    const auto comp = strongly_connected(tables.size(), edges, components);
    std::vector<std::vector<std::size_t>> internal(components);
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (comp[edges[i].from] == comp[edges[i].to])
            internal[comp[edges[i].from]].push_back(i);

    std::vector<bool> deferred(edges.size(), false);
    for (const auto& members : internal) {
        if (members.empty())
            continue;
        std::vector<Edge> local;
        for (auto i : members)
            local.push_back(edges[i]);
        for (auto j : minimum_deferral(tables.size(), local))
            deferred[members[j]] = true;
    }

    // Kahn's algorithm, always taking the smallest ready name.
    std::vector<int> indegree(tables.size(), 0);
    std::vector<std::vector<std::size_t>> dependents(tables.size());
    model.deferred.clear();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (deferred[i]) {
            model.deferred.push_back(edges[i].id);
            continue;
        }
        dependents[edges[i].to].push_back(edges[i].from);
        ++indegree[edges[i].from];
    }
    std::set<std::size_t> ready; // indices follow name order
    for (std::size_t v = 0; v < tables.size(); ++v)
        if (indegree[v] == 0)
            ready.insert(v);
    std::vector<Table> ordered;
    ordered.reserve(tables.size());
    while (!ready.empty()) {
        const std::size_t v = *ready.begin();
        ready.erase(ready.begin());
        ordered.push_back(std::move(tables[v]));
        for (auto w : dependents[v])
            if (--indegree[w] == 0)
                ready.insert(w);
    }
    tables = std::move(ordered);
    return model;
}

} // namespace onda
