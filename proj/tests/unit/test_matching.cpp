#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "cpd/matching.hpp"
#include "support.hpp"

using namespace cpd;

namespace {

std::vector<std::vector<int>> adjacency_of(int n, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    return adj;
}

int matched_pairs(const std::vector<int>& mate) {
    int count = 0;
    for (std::size_t v = 0; v < mate.size(); ++v)
        if (mate[v] > static_cast<int>(v)) ++count;
    return count;
}

bool respects(int n, const std::vector<Edge>& chosen, const std::vector<Edge>& edges, std::span<const int> cap) {
    std::vector<int> deg(n, 0);
    for (const Edge& e : chosen) {
        if (std::find(edges.begin(), edges.end(), e) == edges.end()) return false;
        ++deg[e.a];
        ++deg[e.b];
    }
    for (int v = 0; v < n; ++v)
        if (cap[v] != kUnboundedCapacity && deg[v] > cap[v]) return false;
    return std::adjacent_find(chosen.begin(), chosen.end()) == chosen.end();
}

}  // namespace

TEST_CASE("four-cycle has a perfect matching of size 2", "[matching]") {
    const std::vector<Edge> c4{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
    CHECK(testing::brute_force_matching_size(4, c4) == 2);
    const std::vector<int> order{0, 1, 2, 3};
    CHECK(matched_pairs(maximum_matching(adjacency_of(4, c4), order)) == 2);
    std::mt19937_64 rng(3);
    const std::vector<int> cap(4, 1);
    CHECK(maximum_b_matching(4, c4, cap, rng).size() == 2);
}

TEST_CASE("blossom: odd cycle with a pendant", "[matching]") {
    // Greedy picking the triangle first strands vertex 3; blossom handling must find size 3 on 6 nodes.
    const std::vector<Edge> g{{0, 1}, {1, 2}, {0, 2}, {2, 3}, {0, 4}, {1, 5}};
    const std::vector<int> order{0, 1, 2, 3, 4, 5};
    CHECK(matched_pairs(maximum_matching(adjacency_of(6, g), order)) == 3);
}

TEST_CASE("maximum matching equals brute force on random graphs", "[matching]") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 9)(rng);
        std::vector<Edge> edges;
        std::bernoulli_distribution coin(0.35);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (coin(rng) && edges.size() < 16) edges.push_back({i, j});
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const auto mate = maximum_matching(adjacency_of(n, edges), order);
        for (int v = 0; v < n; ++v)
            if (mate[v] >= 0) REQUIRE(mate[mate[v]] == v);
        REQUIRE(matched_pairs(mate) == testing::brute_force_matching_size(n, edges));
    }
}

TEST_CASE("b-matching with capacities and unbounded vertices", "[matching]") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 8)(rng);
        std::vector<Edge> edges;
        std::bernoulli_distribution coin(0.4);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (coin(rng) && edges.size() < 14) edges.push_back({i, j});
        std::vector<int> cap(n);
        for (int& c : cap) c = std::uniform_int_distribution<int>(-1, 2)(rng);

        // exhaustive optimum
        int best = 0;
        for (std::uint32_t mask = 0; mask < (1u << edges.size()); ++mask) {
            std::vector<Edge> chosen;
            for (std::size_t k = 0; k < edges.size(); ++k)
                if (mask & (1u << k)) chosen.push_back(edges[k]);
            if (respects(n, chosen, edges, cap)) best = std::max(best, static_cast<int>(chosen.size()));
        }
        auto max_b = maximum_b_matching(n, edges, cap, rng);
        std::sort(max_b.begin(), max_b.end());
        REQUIRE(respects(n, max_b, edges, cap));
        REQUIRE(static_cast<int>(max_b.size()) == best);

        auto greedy = greedy_b_matching(n, edges, cap, rng);
        std::sort(greedy.begin(), greedy.end());
        REQUIRE(respects(n, greedy, edges, cap));
        REQUIRE(static_cast<int>(greedy.size()) <= best);
        // maximal: no remaining edge fits
        std::vector<int> deg(n, 0);
        for (const Edge& e : greedy) ++deg[e.a], ++deg[e.b];
        for (const Edge& e : edges) {
            if (std::binary_search(greedy.begin(), greedy.end(), e)) continue;
            const bool a_full = cap[e.a] != kUnboundedCapacity && deg[e.a] >= cap[e.a];
            const bool b_full = cap[e.b] != kUnboundedCapacity && deg[e.b] >= cap[e.b];
            REQUIRE((a_full || b_full));
        }
    }
}
