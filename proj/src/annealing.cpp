#include "cpd/annealing.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "cpd/build_info.hpp"
#include "cpd/error.hpp"
#include "json_util.hpp"

namespace cpd {

std::string_view to_string(CoolingPolicy policy) {
    return policy == CoolingPolicy::EveryIteration ? "every-iteration" : "on-worse-accept";
}

void SaConfig::validate() const {
    if (!(initial_temperature > 0.0)) throw InvalidSpecError("annealing: initial temperature must be > 0");
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw InvalidSpecError("annealing: cooling rate must lie in (0, 1)");
    if (iterations < 1) throw InvalidSpecError("annealing: iterations must be >= 1");
}

bool MetropolisAcceptor::accept(double delta, double temperature) {
    if (delta <= 0.0) return true;
    if (!(temperature > 0.0)) return false;
    return uniform_(rng_) < std::exp(-delta / temperature);
}

namespace {

std::string move_summary(const MoveRecord& move) {
    std::string s = move.kind == MoveRecord::Kind::Activate ? "+" : "-";
    s += std::to_string(move.step) + ":" + std::to_string(move.edge.a) + "-" + std::to_string(move.edge.b);
    if (!move.cascade.empty()) s += "/x" + std::to_string(move.cascade.size());
    return s;
}

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

SaResult optimize(const Scenario& scenario, Evaluator& evaluator, const SaConfig& config,
                  const IterationCallback& on_iteration) {
    config.validate();
    using clock = std::chrono::steady_clock;

    // Energy is the summed objective in minutes over all (i, j, t) triples, for every evaluator.
    std::size_t pairs = 0;
    for (const auto& c : scenario.requirements) pairs += c.size();
    const double energy_scale =
        static_cast<double>(pairs) * scenario.step_count() * scenario.grid.horizon_minutes();

    SaResult result;
    auto& meta = result.history.metadata;
    meta["evaluator"] = std::string(to_string(evaluator.kind()));
    meta["seed"] = std::to_string(config.seed);
    meta["iters"] = std::to_string(config.iterations);
    meta["temp"] = format_number(config.initial_temperature);
    meta["cool"] = format_number(config.cooling_rate);
    meta["cooling_policy"] = std::string(to_string(config.cooling));
    meta["matching"] = std::string(to_string(config.matching));
    meta["scenario_hash"] = scenario_hash(scenario);
    meta["git_describe"] = std::string(git_describe());
    meta["unreachable_penalty"] = "remaining horizon + one full horizon";
    meta["normalization"] = "raw / (triple_count * horizon_minutes)";

    std::mt19937_64 move_rng(config.seed * 0x9e3779b97f4a7c15ULL + 1);
    MetropolisAcceptor acceptor(config.seed * 0xbf58476d1ce4e5b9ULL + 2);

    ContactPlan current = initial_plan(scenario, config.seed, config.matching);
    ContactPlan best = current;
    double temperature = config.initial_temperature;

    auto timed_eval = [&](const ContactPlan& plan, double& ms) {
        const auto start = clock::now();
        const ObjectiveValue value = evaluator.evaluate(plan);
        ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
        return value.normalized;
    };
    auto push = [&](IterationRecord row) {
        result.history.rows.push_back(row);
        if (config.record_trajectory) result.trajectory.push_back(current);
        if (on_iteration) on_iteration(result.history.rows.back());
    };

    double f_curr = 0.0, f_best = 0.0;
    try {
        double ms = 0.0;
        f_curr = f_best = timed_eval(current, ms);
        push({0, f_curr, f_curr, f_best, true, temperature, ms, "init", std::nullopt});
    } catch (const EvaluationError& e) {
        result.abort_reason = e.what();
        result.best_plan = best;
        meta["status"] = "aborted";
        return result;
    }

    for (int iter = 1; iter <= config.iterations; ++iter) {
        auto neighbor = random_neighbor(current, scenario, move_rng);
        if (!neighbor) {
            meta["stopped_early"] = "no legal move at iteration " + std::to_string(iter);
            break;
        }
        double ms = 0.0, f_cand = 0.0;
        try {
            f_cand = timed_eval(neighbor->plan, ms);
        } catch (const EvaluationError& e) {
            result.abort_reason = e.what();
            break;
        }

        bool accepted = false;
        bool worse_accepted = false;
        const double decision_temperature = temperature;
        if (f_cand <= f_best) {
            current = neighbor->plan;
            best = current;
            f_curr = f_best = f_cand;
            accepted = true;
        } else if (acceptor.accept((f_cand - f_curr) * energy_scale, temperature)) {
            worse_accepted = f_cand > f_curr;
            current = std::move(neighbor->plan);
            f_curr = f_cand;
            accepted = true;
        } else {
            current = best;
            f_curr = f_best;
        }
        if (config.cooling == CoolingPolicy::EveryIteration || worse_accepted) temperature *= config.cooling_rate;

        push({iter, f_cand, f_curr, f_best, accepted, decision_temperature, ms, move_summary(neighbor->move), std::nullopt});
    }

    meta["status"] = result.abort_reason ? "aborted" : "complete";
    if (result.abort_reason) meta["abort_reason"] = *result.abort_reason;
    result.best_plan = std::move(best);
    result.best_objective = f_best;
    return result;
}

void reevaluate_history(RunHistory& history, std::span<const ContactPlan> plans, Evaluator& exact) {
    if (plans.size() != history.rows.size())
        throw DimensionError("reevaluate_history: " + std::to_string(plans.size()) + " plans for " +
                             std::to_string(history.rows.size()) + " history rows");
    for (std::size_t k = 0; k < plans.size(); ++k) history.rows[k].f_exact = exact.evaluate(plans[k]).normalized;
    history.metadata["reevaluated_with"] = std::string(to_string(exact.kind()));
}

std::string history_to_csv(const RunHistory& history) {
    const bool with_exact = !history.rows.empty() && history.rows.front().f_exact.has_value();
    std::ostringstream os;
    for (const auto& [key, value] : history.metadata) os << "# " << key << "=" << value << "\n";
    os << "iter,f_cand,f_curr,f_best,accepted,temperature,eval_ms";
    if (with_exact) os << ",f_exact";
    os << "\n";
    for (const IterationRecord& r : history.rows) {
        os << r.iter << ',' << format_number(r.f_cand) << ',' << format_number(r.f_curr) << ','
           << format_number(r.f_best) << ',' << (r.accepted ? 1 : 0) << ',' << format_number(r.temperature) << ','
           << format_number(r.eval_ms);
        if (with_exact) os << ',' << (r.f_exact ? format_number(*r.f_exact) : "");
        os << "\n";
    }
    return os.str();
}

namespace {

double parse_number(std::string_view field, int line, std::string_view column) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("history line " + std::to_string(line) + ", column " + std::string(column) +
                         ": expected number, got '" + std::string(field) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

RunHistory history_from_csv(std::string_view text) {
    static const std::vector<std::string_view> required = {"iter", "f_cand", "f_curr", "f_best",
                                                           "accepted", "temperature", "eval_ms"};
    RunHistory history;
    std::vector<std::string_view> header;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            line.remove_prefix(1);
            while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            const auto eq = line.find('=');
            if (eq != std::string_view::npos)
                history.metadata[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
            continue;
        }
        if (header.empty()) {
            header = split(line);
            for (std::size_t k = 0; k < required.size(); ++k)
                if (k >= header.size() || header[k] != required[k])
                    throw ParseError("history line " + std::to_string(line_no) + ": expected column '" +
                                     std::string(required[k]) + "'");
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw ParseError("history line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        IterationRecord r;
        r.iter = static_cast<int>(parse_number(fields[0], line_no, "iter"));
        r.f_cand = parse_number(fields[1], line_no, "f_cand");
        r.f_curr = parse_number(fields[2], line_no, "f_curr");
        r.f_best = parse_number(fields[3], line_no, "f_best");
        r.accepted = parse_number(fields[4], line_no, "accepted") != 0.0;
        r.temperature = parse_number(fields[5], line_no, "temperature");
        r.eval_ms = parse_number(fields[6], line_no, "eval_ms");
        for (std::size_t k = required.size(); k < header.size(); ++k)
            if (header[k] == "f_exact" && !fields[k].empty()) r.f_exact = parse_number(fields[k], line_no, "f_exact");
        history.rows.push_back(std::move(r));
    }
    if (header.empty()) throw ParseError("history: missing header row");
    return history;
}

void save_history(const RunHistory& history, const std::filesystem::path& path) {
    detail::write_file(path.string(), history_to_csv(history));
}

RunHistory load_history(const std::filesystem::path& path) {
    return history_from_csv(detail::read_file(path.string()));
}

}  // namespace cpd
