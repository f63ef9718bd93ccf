#include "cpd/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cpd/error.hpp"

namespace cpd {

namespace {

std::string num(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double pct(double initial, double final) { return initial != 0.0 ? 100.0 * (initial - final) / initial : 0.0; }

std::string evaluator_of(const RunHistory& h) {
    const auto it = h.metadata.find("evaluator");
    return it == h.metadata.end() ? std::string("unknown") : it->second;
}

}  // namespace

Stat mean_std(std::span<const double> values) {
    Stat s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

RunSummary summarize_run(const RunHistory& history) {
    if (history.rows.empty()) throw InvalidSpecError("report: history has no rows");
    RunSummary r;
    r.evaluator = evaluator_of(history);
    r.initial = history.rows.front().f_best;
    r.final = history.rows.back().f_best;
    r.improvement_pct = pct(r.initial, r.final);
    double ms = 0.0;
    for (const IterationRecord& row : history.rows) ms += row.eval_ms;
    r.mean_eval_ms = ms / static_cast<double>(history.rows.size());

    // After every row the current plan is either a fresh best or was reset to the best, so the last row
    // with f_curr == f_best holds the best plan.
    if (history.rows.front().f_exact) {
        r.initial_exact = history.rows.front().f_exact;
        for (auto it = history.rows.rbegin(); it != history.rows.rend(); ++it)
            if (it->f_curr == it->f_best && it->f_exact) {
                r.final_exact = it->f_exact;
                break;
            }
    }
    return r;
}

std::vector<EvaluatorSummary> summarize(std::span<const RunHistory> histories) {
    if (histories.empty()) throw InvalidSpecError("report: no histories given");
    std::vector<std::string> order;
    std::vector<std::vector<RunSummary>> groups;
    for (const RunHistory& h : histories) {
        RunSummary r = summarize_run(h);
        auto it = std::find(order.begin(), order.end(), r.evaluator);
        if (it == order.end()) {
            order.push_back(r.evaluator);
            groups.emplace_back();
            it = order.end() - 1;
        }
        groups[it - order.begin()].push_back(std::move(r));
    }

    std::vector<EvaluatorSummary> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& runs = groups[g];
        auto collect = [&](auto field) {
            std::vector<double> v;
            for (const RunSummary& r : runs) v.push_back(field(r));
            return mean_std(v);
        };
        EvaluatorSummary s;
        s.evaluator = order[g];
        s.runs = static_cast<int>(runs.size());
        s.initial = collect([](const RunSummary& r) { return r.initial; });
        s.final = collect([](const RunSummary& r) { return r.final; });
        s.improvement_pct = collect([](const RunSummary& r) { return r.improvement_pct; });
        s.eval_ms = collect([](const RunSummary& r) { return r.mean_eval_ms; });
        const bool exact = std::all_of(runs.begin(), runs.end(),
                                       [](const RunSummary& r) { return r.initial_exact && r.final_exact; });
        if (exact) {
            s.initial_exact = collect([](const RunSummary& r) { return *r.initial_exact; });
            s.final_exact = collect([](const RunSummary& r) { return *r.final_exact; });
            s.exact_improvement_pct = collect([](const RunSummary& r) { return pct(*r.initial_exact, *r.final_exact); });
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_table(std::span<const EvaluatorSummary> summaries) {
    auto pm = [](const Stat& s, int digits) { return fixed(s.mean, digits) + " +- " + fixed(s.std, digits); };
    std::ostringstream os;
    for (const EvaluatorSummary& s : summaries) {
        os << "evaluator " << s.evaluator << " (" << s.runs << " run" << (s.runs == 1 ? "" : "s") << ")\n";
        os << "  initial normalized BDT  " << pm(s.initial, 4) << "\n";
        os << "  final normalized BDT    " << pm(s.final, 4) << "\n";
        os << "  improvement %           " << pm(s.improvement_pct, 2) << "\n";
        os << "  evaluation ms           " << pm(s.eval_ms, 3) << "\n";
        if (s.initial_exact) {
            os << "  exact initial           " << pm(*s.initial_exact, 4) << "\n";
            os << "  exact final             " << pm(*s.final_exact, 4) << "\n";
            os << "  exact improvement %     " << pm(*s.exact_improvement_pct, 2) << "\n";
        }
    }
    return os.str();
}

std::string summary_csv(std::span<const EvaluatorSummary> summaries) {
    std::ostringstream os;
    os << "evaluator,runs,initial_mean,initial_std,final_mean,final_std,improvement_pct_mean,improvement_pct_std,"
          "eval_ms_mean,eval_ms_std,exact_initial_mean,exact_initial_std,exact_final_mean,exact_final_std,"
          "exact_improvement_pct_mean,exact_improvement_pct_std\n";
    auto pair = [&](const std::optional<Stat>& s) {
        if (s) os << ',' << num(s->mean) << ',' << num(s->std);
        else os << ",,";
    };
    for (const EvaluatorSummary& s : summaries) {
        os << s.evaluator << ',' << s.runs;
        pair(s.initial);
        pair(s.final);
        pair(s.improvement_pct);
        pair(s.eval_ms);
        pair(s.initial_exact);
        pair(s.final_exact);
        pair(s.exact_improvement_pct);
        os << "\n";
    }
    return os.str();
}

std::string curve_csv(std::span<const RunHistory> histories) {
    if (histories.empty()) throw InvalidSpecError("report: no histories given");
    std::vector<std::string> order;
    for (const RunHistory& h : histories)
        if (std::find(order.begin(), order.end(), evaluator_of(h)) == order.end()) order.push_back(evaluator_of(h));

    std::ostringstream os;
    os << "evaluator,iter,runs,f_best_mean,f_best_std,f_exact_mean,f_exact_std\n";
    for (const std::string& ev : order) {
        std::size_t longest = 0;
        for (const RunHistory& h : histories)
            if (evaluator_of(h) == ev) longest = std::max(longest, h.rows.size());
        for (std::size_t k = 0; k < longest; ++k) {
            std::vector<double> best, exact;
            int iter = static_cast<int>(k);
            for (const RunHistory& h : histories) {
                if (evaluator_of(h) != ev || k >= h.rows.size()) continue;
                iter = h.rows[k].iter;
                best.push_back(h.rows[k].f_best);
                if (h.rows[k].f_exact) exact.push_back(*h.rows[k].f_exact);
            }
            const Stat b = mean_std(best);
            os << ev << ',' << iter << ',' << best.size() << ',' << num(b.mean) << ',' << num(b.std);
            if (!exact.empty() && exact.size() == best.size()) {
                const Stat e = mean_std(exact);
                os << ',' << num(e.mean) << ',' << num(e.std);
            } else {
                os << ",,";
            }
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace cpd
