#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cpd/contact_plan.hpp"
#include "cpd/routing.hpp"
#include "cpd/scenario.hpp"

namespace cpd {

// Sum of d(i,j,t) over sampled t, satellites i and j in C_i, plus its normalisation.
struct ObjectiveValue {
    double raw_minutes = 0.0;
    double normalized = 0.0;  // raw / (triple_count * horizon_minutes)
    std::optional<long long> triple_count;       // not provided by remote evaluators
    std::optional<long long> unreachable_count;  // not provided by remote evaluators
};

enum class EvaluatorKind { ExactCgr, Surrogate, Oracle };

std::string_view to_string(EvaluatorKind kind);

// d(i,j,t) for an unreachable pair, in steps: the rest of the horizon after t plus one full horizon.
// Steps are 0-based and the last reachable arrival is N_t - 1.
inline int unreachable_penalty_steps(int step_count, int t) { return (step_count - 1 - t) + step_count; }

struct ExactOptions {
    int sample_stride = 1;
    int workers = 1;
    RoutingOptions routing;
};

// Throws InfeasiblePlanError for plans failing check_feasible, InvalidSpecError for stride < 1.
ObjectiveValue evaluate_exact(const ContactPlan& plan, const Scenario& scenario, const ExactOptions& options = {});

// Same sum built from oracle_bdt, one time-expanded sweep per triple. For verification only.
ObjectiveValue evaluate_oracle(const ContactPlan& plan, const Scenario& scenario, int sample_stride = 1);

class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual ObjectiveValue evaluate(const ContactPlan& plan) = 0;
    virtual EvaluatorKind kind() const = 0;
};

class ExactEvaluator : public Evaluator {
public:
    ExactEvaluator(const Scenario& scenario, ExactOptions options = {}) : scenario_(scenario), options_(options) {}

    ObjectiveValue evaluate(const ContactPlan& plan) override { return evaluate_exact(plan, scenario_, options_); }
    EvaluatorKind kind() const override { return EvaluatorKind::ExactCgr; }

private:
    const Scenario& scenario_;
    ExactOptions options_;
};

class OracleEvaluator : public Evaluator {
public:
    OracleEvaluator(const Scenario& scenario, int sample_stride = 1) : scenario_(scenario), stride_(sample_stride) {}

    ObjectiveValue evaluate(const ContactPlan& plan) override { return evaluate_oracle(plan, scenario_, stride_); }
    EvaluatorKind kind() const override { return EvaluatorKind::Oracle; }

private:
    const Scenario& scenario_;
    int stride_;
};

}  // namespace cpd
