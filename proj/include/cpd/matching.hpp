#pragma once

#include <random>
#include <span>
#include <vector>

#include "cpd/scenario.hpp"

namespace cpd {

// Capacity value meaning "no limit besides the number of incident edges".
inline constexpr int kUnboundedCapacity = -1;

// Maximum-cardinality matching on a general graph (Edmonds' blossom algorithm).
// Returns mate[v] or -1. `order` fixes the sequence in which free vertices are augmented.
std::vector<int> maximum_matching(const std::vector<std::vector<int>>& adjacency, std::span<const int> order);

// Greedy maximal b-matching: scan edges in a random order, keep an edge when both endpoints have spare capacity.
std::vector<Edge> greedy_b_matching(int node_count, std::span<const Edge> edges, std::span<const int> capacity,
                                    std::mt19937_64& rng);

// Maximum-cardinality b-matching through the vertex-splitting reduction to ordinary matching.
// Ties between maximum solutions are broken by `rng`.
std::vector<Edge> maximum_b_matching(int node_count, std::span<const Edge> edges, std::span<const int> capacity,
                                     std::mt19937_64& rng);

}  // namespace cpd
