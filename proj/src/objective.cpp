#include "cpd/objective.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "cpd/error.hpp"

namespace cpd {

std::string_view to_string(EvaluatorKind kind) {
    switch (kind) {
        case EvaluatorKind::ExactCgr: return "cgr";
        case EvaluatorKind::Surrogate: return "surrogate";
        case EvaluatorKind::Oracle: return "oracle";
    }
    return "unknown";
}

namespace {

struct WorkItem {
    int source;
    int t;
};

struct ItemSum {
    double minutes = 0.0;
    long long unreachable = 0;
};

std::vector<WorkItem> work_items(const Scenario& scenario, int stride) {
    if (stride < 1) throw InvalidSpecError("sample_stride must be >= 1");
    std::vector<WorkItem> items;
    for (int t = 0; t < scenario.step_count(); t += stride)
        for (int i = 0; i < scenario.satellite_count(); ++i)
            if (!scenario.requirements[i].empty()) items.push_back({i, t});
    return items;
}

ObjectiveValue finish(const Scenario& scenario, const std::vector<WorkItem>& items, const std::vector<ItemSum>& sums) {
    ObjectiveValue value;
    long long triples = 0, unreachable = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        value.raw_minutes += sums[k].minutes;
        unreachable += sums[k].unreachable;
        triples += static_cast<long long>(scenario.requirements[items[k].source].size());
    }
    value.triple_count = triples;
    value.unreachable_count = unreachable;
    value.normalized = triples > 0 ? value.raw_minutes / (static_cast<double>(triples) * scenario.grid.horizon_minutes()) : 0.0;
    return value;
}

void require_feasible(const ContactPlan& plan, const Scenario& scenario) {
    const FeasibilityReport report = check_feasible(plan, scenario);
    if (!report.feasible())
        throw InfeasiblePlanError("plan violates " + std::to_string(report.violations.size()) +
                                  " constraint(s); first: " + report.violations.front().message);
}

}  // namespace

ObjectiveValue evaluate_exact(const ContactPlan& plan, const Scenario& scenario, const ExactOptions& options) {
    require_feasible(plan, scenario);
    const auto items = work_items(scenario, options.sample_stride);
    const auto contacts = to_contacts(plan);
    const ContactGraph graph(contacts, scenario, options.routing);
    const double step_minutes = scenario.grid.step_minutes();

    std::vector<ItemSum> sums(items.size());
    auto run = [&](std::size_t k) {
        const WorkItem& item = items[k];
        const auto results = bdt_all_destinations(graph, item.source, item.t);
        ItemSum& sum = sums[k];
        for (int j : scenario.requirements[item.source]) {
            if (results[j].reachable()) {
                sum.minutes += results[j].bdt_minutes;
            } else {
                sum.minutes += unreachable_penalty_steps(scenario.step_count(), item.t) * step_minutes;
                ++sum.unreachable;
            }
        }
    };

    const int workers = std::max(1, options.workers);
    if (workers == 1 || items.size() < 2) {
        for (std::size_t k = 0; k < items.size(); ++k) run(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < items.size(); k = next++) run(k);
            });
    }
    return finish(scenario, items, sums);
}

ObjectiveValue evaluate_oracle(const ContactPlan& plan, const Scenario& scenario, int sample_stride) {
    require_feasible(plan, scenario);
    const auto items = work_items(scenario, sample_stride);
    std::vector<ItemSum> sums(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
        for (int j : scenario.requirements[items[k].source]) {
            const BdtResult r = oracle_bdt(plan, scenario, items[k].source, j, items[k].t);
            if (r.reachable()) {
                sums[k].minutes += r.bdt_minutes;
            } else {
                sums[k].minutes += unreachable_penalty_steps(scenario.step_count(), items[k].t) * scenario.grid.step_minutes();
                ++sums[k].unreachable;
            }
        }
    }
    return finish(scenario, items, sums);
}

}  // namespace cpd
