#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpd/annealing.hpp"

namespace cpd {

struct RunSummary {
    std::string evaluator;
    double initial = 0.0;  // f_best of row 0
    double final = 0.0;    // f_best of the last row
    double improvement_pct = 0.0;
    double mean_eval_ms = 0.0;
    std::optional<double> initial_exact;  // when the history was re-evaluated exactly
    std::optional<double> final_exact;    // exact objective of the best plan
};

// Throws InvalidSpecError for a history with no rows.
RunSummary summarize_run(const RunHistory& history);

struct Stat {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single run
};

struct EvaluatorSummary {
    std::string evaluator;
    int runs = 0;
    Stat initial, final, improvement_pct, eval_ms;
    std::optional<Stat> initial_exact, final_exact, exact_improvement_pct;
};

// One entry per evaluator, in order of first appearance. Throws InvalidSpecError when `histories` is empty.
std::vector<EvaluatorSummary> summarize(std::span<const RunHistory> histories);

std::string format_table(std::span<const EvaluatorSummary> summaries);
std::string summary_csv(std::span<const EvaluatorSummary> summaries);

// Per-iteration mean and std of f_best (and f_exact when present) across runs with the same evaluator.
std::string curve_csv(std::span<const RunHistory> histories);

Stat mean_std(std::span<const double> values);

}  // namespace cpd
