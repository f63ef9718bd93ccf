#include "cpd/contact_plan.hpp"

#include <algorithm>

#include "cpd/error.hpp"
#include "cpd/matching.hpp"
#include "json_util.hpp"

namespace cpd {

ContactPlan::ContactPlan(int node_count, int step_count) : node_count_(node_count) {
    if (node_count < 0 || step_count < 0) throw DimensionError("contact plan: negative dimensions");
    steps_.resize(step_count);
}

void ContactPlan::check_index(int t, Edge e) const {
    if (t < 0 || t >= step_count()) throw DimensionError("contact plan: step " + std::to_string(t) + " out of range");
    if (e.a < 0 || e.b >= node_count_ || e.a >= e.b)
        throw DimensionError("contact plan: invalid edge [" + std::to_string(e.a) + "," + std::to_string(e.b) + "]");
}

bool ContactPlan::active(int t, Edge e) const {
    const auto& list = steps_[t];
    return std::binary_search(list.begin(), list.end(), e);
}

bool ContactPlan::activate(int t, Edge e) {
    check_index(t, e);
    auto& list = steps_[t];
    auto it = std::lower_bound(list.begin(), list.end(), e);
    if (it != list.end() && *it == e) return false;
    list.insert(it, e);
    return true;
}

bool ContactPlan::deactivate(int t, Edge e) {
    check_index(t, e);
    auto& list = steps_[t];
    auto it = std::lower_bound(list.begin(), list.end(), e);
    if (it == list.end() || *it != e) return false;
    list.erase(it);
    return true;
}

std::size_t ContactPlan::active_count() const {
    std::size_t total = 0;
    for (const auto& list : steps_) total += list.size();
    return total;
}

void apply_move(ContactPlan& plan, const MoveRecord& move) {
    if (move.kind == MoveRecord::Kind::Deactivate) {
        plan.deactivate(move.step, move.edge);
        return;
    }
    for (const StepEdge& s : move.cascade) plan.deactivate(s.step, s.edge);
    plan.activate(move.step, move.edge);
}

void revert_move(ContactPlan& plan, const MoveRecord& move) {
    if (move.kind == MoveRecord::Kind::Deactivate) {
        plan.activate(move.step, move.edge);
        return;
    }
    plan.deactivate(move.step, move.edge);
    for (auto it = move.cascade.rbegin(); it != move.cascade.rend(); ++it) plan.activate(it->step, it->edge);
}

std::string_view to_string(ConstraintFamily family) {
    switch (family) {
        case ConstraintFamily::Symmetry: return "symmetry";
        case ConstraintFamily::Visibility: return "visibility";
        case ConstraintFamily::IslBudget: return "isl_budget";
        case ConstraintFamily::GslBudget: return "gsl_budget";
        case ConstraintFamily::DegreeCap: return "degree_cap";
    }
    return "unknown";
}

std::string_view to_string(MatchingMode mode) { return mode == MatchingMode::Maximum ? "maximum" : "greedy"; }

namespace {

std::string edge_text(Edge e) { return "[" + std::to_string(e.a) + "," + std::to_string(e.b) + "]"; }

void check_dimensions(const ContactPlan& plan, const Scenario& scenario) {
    if (plan.node_count() != scenario.node_count() || plan.step_count() != scenario.step_count())
        throw DimensionError("plan is " + std::to_string(plan.node_count()) + " nodes x " +
                             std::to_string(plan.step_count()) + " steps, scenario is " +
                             std::to_string(scenario.node_count()) + " x " + std::to_string(scenario.step_count()));
}

bool is_isl(const Scenario& scenario, Edge e) { return scenario.is_satellite(e.a) && scenario.is_satellite(e.b); }

// Horizon link-slot counts per satellite.
struct SlotCounts {
    std::vector<int> isl;
    std::vector<int> gsl;
};

SlotCounts count_slots(const ContactPlan& plan, const Scenario& scenario) {
    const int ns = scenario.satellite_count();
    SlotCounts counts{std::vector<int>(ns, 0), std::vector<int>(ns, 0)};
    for (int t = 0; t < plan.step_count(); ++t) {
        for (const Edge& e : plan.edges(t)) {
            if (is_isl(scenario, e)) {
                ++counts.isl[e.a];
                ++counts.isl[e.b];
            } else {
                ++counts.gsl[e.a];
            }
        }
    }
    return counts;
}

int step_degree(const ContactPlan& plan, int t, int node) {
    int degree = 0;
    for (const Edge& e : plan.edges(t))
        if (e.a == node || e.b == node) ++degree;
    return degree;
}

bool activatable(const Scenario& scenario, Edge e) {
    const bool isl = is_isl(scenario, e);
    const int budget = isl ? scenario.budgets.isl : scenario.budgets.gsl;
    for (int v : {e.a, e.b}) {
        if (!scenario.is_satellite(v)) continue;
        if (scenario.per_step_degree_cap < 1 || budget < 1) return false;
    }
    return true;
}

}  // namespace

FeasibilityReport check_feasible(const ContactPlan& plan, const Scenario& scenario) {
    check_dimensions(plan, scenario);
    FeasibilityReport report;
    auto& out = report.violations;
    const int ns = scenario.satellite_count();

    for (int t = 0; t < plan.step_count(); ++t) {
        for (const Edge& e : plan.edges(t)) {
            if (!scenario.visibility.visible(t, e.a, e.b))
                out.push_back({ConstraintFamily::Visibility, t, -1, e,
                               "edge " + edge_text(e) + " active at step " + std::to_string(t) + " but not visible"});
        }
    }
    for (int t = 0; t < plan.step_count(); ++t) {
        std::vector<int> degree(ns, 0);
        for (const Edge& e : plan.edges(t)) {
            if (e.a < ns) ++degree[e.a];
            if (e.b < ns) ++degree[e.b];
        }
        for (int v = 0; v < ns; ++v)
            if (degree[v] > scenario.per_step_degree_cap)
                out.push_back({ConstraintFamily::DegreeCap, t, v, {},
                               "satellite " + std::to_string(v) + " has " + std::to_string(degree[v]) +
                                   " links at step " + std::to_string(t)});
    }
    const SlotCounts counts = count_slots(plan, scenario);
    for (int v = 0; v < ns; ++v) {
        if (counts.isl[v] > scenario.budgets.isl)
            out.push_back({ConstraintFamily::IslBudget, -1, v, {},
                           "satellite " + std::to_string(v) + " uses " + std::to_string(counts.isl[v]) +
                               " ISL slots, budget " + std::to_string(scenario.budgets.isl)});
        if (counts.gsl[v] > scenario.budgets.gsl)
            out.push_back({ConstraintFamily::GslBudget, -1, v, {},
                           "satellite " + std::to_string(v) + " uses " + std::to_string(counts.gsl[v]) +
                               " GSL slots, budget " + std::to_string(scenario.budgets.gsl)});
    }
    return report;
}

FeasibilityReport check_feasible_dense(std::span<const std::vector<std::uint8_t>> matrices, const Scenario& scenario) {
    const int n = scenario.node_count();
    if (static_cast<int>(matrices.size()) != scenario.step_count())
        throw DimensionError("dense plan has " + std::to_string(matrices.size()) + " steps, scenario has " +
                             std::to_string(scenario.step_count()));
    ContactPlan plan(n, scenario.step_count());
    std::vector<Violation> asymmetric;
    for (int t = 0; t < scenario.step_count(); ++t) {
        const auto& m = matrices[t];
        if (static_cast<int>(m.size()) != n * n) throw DimensionError("dense plan matrix has wrong size");
        for (int i = 0; i < n; ++i) {
            if (m[i * n + i] != 0)
                asymmetric.push_back({ConstraintFamily::Visibility, t, i, {},
                                      "self-link on node " + std::to_string(i) + " at step " + std::to_string(t)});
            for (int j = i + 1; j < n; ++j) {
                const bool up = m[i * n + j] != 0;
                const bool down = m[j * n + i] != 0;
                if (up != down)
                    asymmetric.push_back({ConstraintFamily::Symmetry, t, -1, Edge{i, j},
                                          "U(" + std::to_string(i) + "," + std::to_string(j) + ") != U(" +
                                              std::to_string(j) + "," + std::to_string(i) + ") at step " +
                                              std::to_string(t)});
                if (up || down) plan.activate(t, Edge{i, j});
            }
        }
    }
    FeasibilityReport report = check_feasible(plan, scenario);
    report.violations.insert(report.violations.begin(), asymmetric.begin(), asymmetric.end());
    return report;
}

ContactPlan initial_plan(const Scenario& scenario, std::uint64_t seed, MatchingMode mode) {
    const int n = scenario.node_count();
    const int ns = scenario.satellite_count();
    std::mt19937_64 rng(seed);
    ContactPlan plan(n, scenario.step_count());

    std::vector<int> capacity(n, kUnboundedCapacity);
    for (int v = 0; v < ns; ++v) capacity[v] = scenario.per_step_degree_cap;

    for (int t = 0; t < scenario.step_count(); ++t) {
        std::vector<Edge> candidates;
        for (const Edge& e : scenario.visibility.edges(t))
            if (activatable(scenario, e)) candidates.push_back(e);
        const auto chosen = mode == MatchingMode::Maximum ? maximum_b_matching(n, candidates, capacity, rng)
                                                          : greedy_b_matching(n, candidates, capacity, rng);
        for (const Edge& e : chosen) plan.activate(t, e);
    }

    // Budget repair: a satellite over budget loses uniformly drawn slots of the offending kind.
    SlotCounts counts = count_slots(plan, scenario);
    for (int v = 0; v < ns; ++v) {
        for (const bool isl : {true, false}) {
            auto& count = isl ? counts.isl : counts.gsl;
            const int budget = isl ? scenario.budgets.isl : scenario.budgets.gsl;
            while (count[v] > budget) {
                std::vector<StepEdge> own;
                for (int t = 0; t < plan.step_count(); ++t)
                    for (const Edge& e : plan.edges(t))
                        if ((e.a == v || e.b == v) && is_isl(scenario, e) == isl) own.push_back({t, e});
                std::uniform_int_distribution<std::size_t> pick(0, own.size() - 1);
                const StepEdge victim = own[pick(rng)];
                plan.deactivate(victim.step, victim.edge);
                if (isl) {
                    --count[victim.edge.a];
                    --count[victim.edge.b];
                } else {
                    --count[victim.edge.a];
                }
            }
        }
    }
    return plan;
}

std::optional<MoveRecord> activate_with_repair(ContactPlan& plan, const Scenario& scenario, StepEdge slot) {
    check_dimensions(plan, scenario);
    const int t = slot.step;
    const Edge e = slot.edge;
    if (!scenario.visibility.visible(t, e.a, e.b) || plan.active(t, e) || !activatable(scenario, e)) return std::nullopt;

    MoveRecord move{MoveRecord::Kind::Activate, t, e, {}};
    plan.activate(t, e);

    const bool isl = is_isl(scenario, e);
    const int budget = isl ? scenario.budgets.isl : scenario.budgets.gsl;
    auto remove = [&](StepEdge victim) {
        plan.deactivate(victim.step, victim.edge);
        move.cascade.push_back(victim);
    };

    for (bool changed = true; changed;) {
        changed = false;
        for (int v : {e.a, e.b}) {
            if (!scenario.is_satellite(v)) continue;
            if (step_degree(plan, t, v) > scenario.per_step_degree_cap) {
                for (const Edge& other : plan.edges(t)) {
                    if (other != e && (other.a == v || other.b == v)) {
                        remove({t, other});
                        changed = true;
                        break;
                    }
                }
            }
            if (changed) break;
        }
        if (changed) continue;
        for (int v : {e.a, e.b}) {
            if (!scenario.is_satellite(v)) continue;
            int used = 0;
            std::optional<StepEdge> oldest;
            for (int s = 0; s < plan.step_count(); ++s) {
                for (const Edge& other : plan.edges(s)) {
                    if ((other.a != v && other.b != v) || is_isl(scenario, other) != isl) continue;
                    ++used;
                    if (!oldest && !(s == t && other == e)) oldest = StepEdge{s, other};
                }
            }
            if (used > budget && oldest) {
                remove(*oldest);
                changed = true;
                break;
            }
        }
    }
    return move;
}

std::optional<MoveRecord> apply_random_move(ContactPlan& plan, const Scenario& scenario, std::mt19937_64& rng) {
    check_dimensions(plan, scenario);
    std::vector<std::size_t> prefix(scenario.step_count() + 1, 0);
    for (int t = 0; t < scenario.step_count(); ++t) {
        std::size_t count = 0;
        for (const Edge& e : scenario.visibility.edges(t))
            if (plan.active(t, e) || activatable(scenario, e)) ++count;
        prefix[t + 1] = prefix[t] + count;
    }
    if (prefix.back() == 0) return std::nullopt;

    std::uniform_int_distribution<std::size_t> pick(0, prefix.back() - 1);
    const std::size_t index = pick(rng);
    const int t = static_cast<int>(std::upper_bound(prefix.begin(), prefix.end(), index) - prefix.begin()) - 1;
    std::size_t offset = index - prefix[t];
    Edge chosen{};
    for (const Edge& e : scenario.visibility.edges(t)) {
        if (!(plan.active(t, e) || activatable(scenario, e))) continue;
        if (offset-- == 0) {
            chosen = e;
            break;
        }
    }

    if (plan.active(t, chosen)) {
        plan.deactivate(t, chosen);
        return MoveRecord{MoveRecord::Kind::Deactivate, t, chosen, {}};
    }
    return activate_with_repair(plan, scenario, {t, chosen});
}

std::optional<Neighbor> random_neighbor(const ContactPlan& plan, const Scenario& scenario, std::mt19937_64& rng) {
    Neighbor next{plan, {}};
    auto move = apply_random_move(next.plan, scenario, rng);
    if (!move) return std::nullopt;
    next.move = std::move(*move);
    return next;
}

std::vector<Contact> to_contacts(const ContactPlan& plan) {
    std::vector<Contact> out;
    std::map<Edge, int> open;  // edge -> start step of the running interval
    for (int t = 0; t <= plan.step_count(); ++t) {
        std::span<const Edge> now = t < plan.step_count() ? plan.edges(t) : std::span<const Edge>{};
        for (auto it = open.begin(); it != open.end();) {
            if (!std::binary_search(now.begin(), now.end(), it->first)) {
                out.push_back({it->first.a, it->first.b, it->second, t});
                it = open.erase(it);
            } else {
                ++it;
            }
        }
        for (const Edge& e : now) open.emplace(e, t);
    }
    std::sort(out.begin(), out.end(), [](const Contact& x, const Contact& y) {
        return std::tie(x.t_start, x.a, x.b) < std::tie(y.t_start, y.a, y.b);
    });
    return out;
}

ContactPlan from_contacts(std::span<const Contact> contacts, int node_count, int step_count) {
    ContactPlan plan(node_count, step_count);
    for (const Contact& c : contacts) {
        if (c.t_start < 0 || c.t_end > step_count || c.t_start >= c.t_end)
            throw DimensionError("contact interval out of range");
        for (int t = c.t_start; t < c.t_end; ++t) plan.activate(t, make_edge(c.a, c.b));
    }
    return plan;
}

std::string plan_to_json(const ContactPlan& plan, const std::map<std::string, std::string>& metadata) {
    detail::json doc;
    doc["version"] = 1;
    doc["steps"] = plan.step_count();
    detail::json contacts = detail::json::array();
    for (int t = 0; t < plan.step_count(); ++t)
        for (const Edge& e : plan.edges(t)) contacts.push_back({t, e.a, e.b});
    doc["contacts"] = std::move(contacts);
    if (!metadata.empty()) doc["metadata"] = metadata;
    return doc.dump() + "\n";
}

ContactPlan plan_from_json(std::string_view text, int node_count) {
    using namespace detail;
    const json doc = parse_json(text, "plan");
    const long long version = require_int(doc, "version", "");
    if (version != 1) throw ParseError("version: unsupported plan version " + std::to_string(version));
    const long long steps = require_int(doc, "steps", "");
    if (steps < 1) throw ParseError("steps: must be >= 1");
    const json& contacts = require(doc, "contacts", "");
    if (!contacts.is_array()) throw ParseError("contacts: expected array of [t,i,j]");
    ContactPlan plan(node_count, static_cast<int>(steps));
    for (std::size_t k = 0; k < contacts.size(); ++k) {
        const std::string path = "contacts[" + std::to_string(k) + "]";
        const json& triple = contacts[k];
        if (!triple.is_array() || triple.size() != 3) throw ParseError(path + ": expected [t,i,j]");
        const auto t = as_int(triple[0], path + "[0]");
        const auto i = as_int(triple[1], path + "[1]");
        const auto j = as_int(triple[2], path + "[2]");
        if (!(i < j)) throw ParseError(path + ": edges must satisfy i<j");
        if (t < 0 || t >= steps) throw ParseError(path + ": step " + std::to_string(t) + " out of range");
        if (i < 0 || j >= node_count) throw ParseError(path + ": node index out of range");
        plan.activate(static_cast<int>(t), Edge{static_cast<int>(i), static_cast<int>(j)});
    }
    return plan;
}

void save_plan(const ContactPlan& plan, const std::filesystem::path& path,
               const std::map<std::string, std::string>& metadata) {
    detail::write_file(path.string(), plan_to_json(plan, metadata));
}

ContactPlan load_plan(const std::filesystem::path& path, int node_count) {
    return plan_from_json(detail::read_file(path.string()), node_count);
}

}  // namespace cpd
