#pragma once

// Fixtures and independent reference computations for the unit tests.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cpd/contact_plan.hpp"
#include "cpd/scenario.hpp"

namespace testing {

// Scenario built straight from edge lists. Stations are the last `stations` nodes.
inline cpd::Scenario make_scenario(int sats, int stations, std::vector<std::vector<cpd::Edge>> visibility,
                                   std::vector<std::vector<int>> requirements = {}, cpd::Budgets budgets = {1000, 1000},
                                   int cap = 1) {
    cpd::Scenario s;
    const int n = sats + stations;
    for (int i = 0; i < n; ++i)
        s.nodes.push_back({i, i < sats ? cpd::NodeKind::Satellite : cpd::NodeKind::GroundStation});
    s.grid.step_count = static_cast<int>(visibility.size());
    s.grid.step_seconds = 60.0;
    for (auto& step : visibility) std::sort(step.begin(), step.end());
    s.visibility = cpd::VisibilityTensor(n, sats, std::move(visibility));
    if (requirements.empty()) requirements.assign(sats, {});
    s.requirements = std::move(requirements);
    s.budgets = budgets;
    s.per_step_degree_cap = cap;
    s.validate();
    return s;
}

// Random visibility over `steps` steps; ground-to-ground pairs are never visible.
inline cpd::Scenario random_scenario(std::mt19937_64& rng, int max_nodes = 10, int max_steps = 20) {
    const int n = std::uniform_int_distribution<int>(2, max_nodes)(rng);
    const int sats = std::uniform_int_distribution<int>(1, n)(rng);
    const int steps = std::uniform_int_distribution<int>(1, max_steps)(rng);
    const double density = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    std::bernoulli_distribution coin(density);
    std::vector<std::vector<cpd::Edge>> vis(steps);
    for (int t = 0; t < steps; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (i < sats && coin(rng)) vis[t].push_back({i, j});
    std::vector<std::vector<int>> req(sats);
    std::bernoulli_distribution want(0.5);
    for (int i = 0; i < sats; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i && want(rng)) req[i].push_back(j);
    const int cap = std::uniform_int_distribution<int>(1, 2)(rng);
    const cpd::Budgets budgets{std::uniform_int_distribution<int>(0, 2 * steps)(rng),
                               std::uniform_int_distribution<int>(0, steps)(rng)};
    return make_scenario(sats, n - sats, std::move(vis), std::move(req), budgets, cap);
}

// Random subset of visible slots, not necessarily respecting budgets or caps.
inline cpd::ContactPlan random_subplan(const cpd::Scenario& s, std::mt19937_64& rng, double keep = 0.5) {
    cpd::ContactPlan plan(s.node_count(), s.step_count());
    std::bernoulli_distribution coin(keep);
    for (int t = 0; t < s.step_count(); ++t)
        for (const cpd::Edge& e : s.visibility.edges(t))
            if (coin(rng)) plan.activate(t, e);
    return plan;
}

// Earliest arrival by repeated relaxation over the time-expanded graph: reach[t][v] is true when a message
// injected at (source, t_start) can sit at v at step t. Returns nullopt when destination is never held.
inline std::optional<int> reference_delivery(const cpd::ContactPlan& plan, int source, int destination, int t_start) {
    const int n = plan.node_count();
    const int steps = plan.step_count();
    std::vector<std::vector<char>> reach(steps, std::vector<char>(n, 0));
    reach[t_start][source] = 1;
    for (int t = t_start; t + 1 < steps; ++t) {
        for (int v = 0; v < n; ++v)
            if (reach[t][v]) reach[t + 1][v] = 1;
        for (const cpd::Edge& e : plan.edges(t)) {
            if (reach[t][e.a]) reach[t + 1][e.b] = 1;
            if (reach[t][e.b]) reach[t + 1][e.a] = 1;
        }
    }
    for (int t = t_start; t < steps; ++t)
        if (reach[t][destination]) return t;
    return std::nullopt;
}

// Objective summed directly from reference_delivery, in minutes.
inline double reference_objective_minutes(const cpd::ContactPlan& plan, const cpd::Scenario& s, int stride = 1) {
    const int steps = s.step_count();
    const double minutes = s.grid.step_minutes();
    double total = 0.0;
    for (int t = 0; t < steps; t += stride)
        for (int i = 0; i < s.satellite_count(); ++i)
            for (int j : s.requirements[i]) {
                const auto d = reference_delivery(plan, i, j, t);
                total += d ? (*d - t) * minutes : ((steps - 1 - t) + steps) * minutes;
            }
    return total;
}

// Largest matching size by exhaustive search over edge subsets.
inline int brute_force_matching_size(int node_count, const std::vector<cpd::Edge>& edges) {
    int best = 0;
    const std::uint32_t limit = 1u << edges.size();
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        std::vector<int> used(node_count, 0);
        bool ok = true;
        int size = 0;
        for (std::size_t k = 0; k < edges.size() && ok; ++k)
            if (mask & (1u << k)) {
                ok = !used[edges[k].a]++ && !used[edges[k].b]++;
                ++size;
            }
        if (ok) best = std::max(best, size);
    }
    return best;
}

}  // namespace testing
