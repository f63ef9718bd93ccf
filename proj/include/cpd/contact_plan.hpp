#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/scenario.hpp"

namespace cpd {

// Sequence of symmetric 0/1 matrices U_t, stored as one sorted edge list per step.
class ContactPlan {
public:
    ContactPlan() = default;
    ContactPlan(int node_count, int step_count);

    int node_count() const { return node_count_; }
    int step_count() const { return static_cast<int>(steps_.size()); }

    std::span<const Edge> edges(int t) const { return steps_[t]; }
    bool active(int t, Edge e) const;

    // Both return false when the plan already had the requested state.
    bool activate(int t, Edge e);
    bool deactivate(int t, Edge e);

    std::size_t active_count() const;
    bool empty() const { return active_count() == 0; }

    bool operator==(const ContactPlan&) const = default;

private:
    void check_index(int t, Edge e) const;

    int node_count_ = 0;
    std::vector<std::vector<Edge>> steps_;
};

struct StepEdge {
    int step = 0;
    Edge edge;

    auto operator<=>(const StepEdge&) const = default;
};

// Maximal interval [t_start, t_end) during which edge (a, b) is active.
struct Contact {
    int a = 0;
    int b = 0;
    int t_start = 0;
    int t_end = 0;

    bool operator==(const Contact&) const = default;
};

struct MoveRecord {
    enum class Kind { Activate, Deactivate };

    Kind kind = Kind::Activate;
    int step = 0;
    Edge edge;
    std::vector<StepEdge> cascade;  // slots removed by repair, in removal order
};

void apply_move(ContactPlan& plan, const MoveRecord& move);
void revert_move(ContactPlan& plan, const MoveRecord& move);

enum class ConstraintFamily {
    Symmetry,    // U_t(i,j) = U_t(j,i)
    Visibility,  // U_t(i,j) <= V_t(i,j)
    IslBudget,   // horizon ISL slots per satellite <= M_s
    GslBudget,   // horizon GSL slots per satellite <= M_g
    DegreeCap,   // per-step satellite degree <= per_step_degree_cap
};

std::string_view to_string(ConstraintFamily family);

struct Violation {
    ConstraintFamily family = ConstraintFamily::Visibility;
    int step = -1;  // -1 for horizon-wide budgets
    int node = -1;
    Edge edge;
    std::string message;
};

struct FeasibilityReport {
    std::vector<Violation> violations;

    bool feasible() const { return violations.empty(); }
};

// Throws DimensionError when the plan does not match the scenario's roster or grid.
FeasibilityReport check_feasible(const ContactPlan& plan, const Scenario& scenario);

// Same check for plans given as dense row-major n x n matrices, one per step; this is the only
// representation in which asymmetric entries can occur.
FeasibilityReport check_feasible_dense(std::span<const std::vector<std::uint8_t>> matrices, const Scenario& scenario);

enum class MatchingMode { Maximum, Greedy };

std::string_view to_string(MatchingMode mode);

// Per-step b-matching of the visibility graph (satellite capacity = degree cap, ground stations
// unbounded) followed by random deactivation until every budget holds.
ContactPlan initial_plan(const Scenario& scenario, std::uint64_t seed, MatchingMode mode = MatchingMode::Maximum);

// Draws one (step, candidate edge) uniformly, toggles it in place and repairs. Returns nullopt when
// no legal move exists. Candidates are visible slots that are either active or activatable.
std::optional<MoveRecord> apply_random_move(ContactPlan& plan, const Scenario& scenario, std::mt19937_64& rng);

struct Neighbor {
    ContactPlan plan;
    MoveRecord move;
};

std::optional<Neighbor> random_neighbor(const ContactPlan& plan, const Scenario& scenario, std::mt19937_64& rng);

// Activates `slot` and deactivates conflicting slots until the plan is feasible again: while a constraint
// is violated, the active slot (other than the new one) whose removal resolves it goes first, ordered
// by oldest step and then lowest edge. Returns nullopt, leaving the plan untouched, when the slot is
// invisible, already active, or cannot be made feasible.
std::optional<MoveRecord> activate_with_repair(ContactPlan& plan, const Scenario& scenario, StepEdge slot);

// Sorted by (t_start, a, b).
std::vector<Contact> to_contacts(const ContactPlan& plan);
ContactPlan from_contacts(std::span<const Contact> contacts, int node_count, int step_count);

std::string plan_to_json(const ContactPlan& plan, const std::map<std::string, std::string>& metadata = {});
ContactPlan plan_from_json(std::string_view text, int node_count);
void save_plan(const ContactPlan& plan, const std::filesystem::path& path,
               const std::map<std::string, std::string>& metadata = {});
ContactPlan load_plan(const std::filesystem::path& path, int node_count);

}  // namespace cpd
