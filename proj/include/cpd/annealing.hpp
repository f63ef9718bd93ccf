#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cpd/contact_plan.hpp"
#include "cpd/objective.hpp"
#include "cpd/scenario.hpp"

namespace cpd {

enum class CoolingPolicy {
    EveryIteration,  // T <- r T after every iteration
    OnWorseAccept,   // T <- r T only when a worse candidate is accepted
};

std::string_view to_string(CoolingPolicy policy);

struct SaConfig {
    double initial_temperature = 10.0;
    double cooling_rate = 0.95;
    int iterations = 100;
    std::uint64_t seed = 1;
    CoolingPolicy cooling = CoolingPolicy::EveryIteration;
    MatchingMode matching = MatchingMode::Maximum;
    bool record_trajectory = false;

    void validate() const;
};

// Metropolis rule on the summed objective in minutes: improvements always pass, a worse candidate passes with
// probability exp(-delta / T).
class MetropolisAcceptor {
public:
    explicit MetropolisAcceptor(std::uint64_t seed) : rng_(seed) {}

    bool accept(double delta, double temperature);

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

struct IterationRecord {
    int iter = 0;
    double f_cand = 0.0;  // normalized objective as reported by the run's evaluator
    double f_curr = 0.0;
    double f_best = 0.0;
    bool accepted = false;
    double temperature = 0.0;
    double eval_ms = 0.0;
    std::string move;
    std::optional<double> f_exact;  // exact objective of the current plan, filled by reevaluate_history
};

struct RunHistory {
    std::vector<IterationRecord> rows;  // row 0 is the initial plan
    std::map<std::string, std::string> metadata;
};

struct SaResult {
    ContactPlan best_plan;
    double best_objective = 0.0;
    RunHistory history;
    std::vector<ContactPlan> trajectory;  // current plan after each row, when recorded
    std::optional<std::string> abort_reason;

    bool aborted() const { return abort_reason.has_value(); }
};

using IterationCallback = std::function<void(const IterationRecord&)>;

// Simulated annealing from initial_plan. A rejected candidate resets the current plan to the best plan.
// An evaluator failure stops the run; the history gathered so far is returned with abort_reason set.
SaResult optimize(const Scenario& scenario, Evaluator& evaluator, const SaConfig& config,
                  const IterationCallback& on_iteration = {});

// Fills f_exact for every row from the matching trajectory plan.
void reevaluate_history(RunHistory& history, std::span<const ContactPlan> plans, Evaluator& exact);

std::string history_to_csv(const RunHistory& history);
RunHistory history_from_csv(std::string_view text);
void save_history(const RunHistory& history, const std::filesystem::path& path);
RunHistory load_history(const std::filesystem::path& path);

}  // namespace cpd
