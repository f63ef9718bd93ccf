// One PASS/FAIL line per primary criterion. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "../unit/support.hpp"
#include "cpd/annealing.hpp"
#include "cpd/contact_plan.hpp"
#include "cpd/error.hpp"
#include "cpd/objective.hpp"
#include "cpd/routing.hpp"
#include "cpd/scenario.hpp"
#include "cpd/surrogate_client.hpp"

using namespace cpd;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Feasible plan with some variety: a random initial plan followed by random moves.
ContactPlan random_feasible_plan(const Scenario& s, std::mt19937_64& rng) {
    const auto mode = std::bernoulli_distribution(0.5)(rng) ? MatchingMode::Maximum : MatchingMode::Greedy;
    ContactPlan p = initial_plan(s, rng(), mode);
    const int moves = std::uniform_int_distribution<int>(0, 40)(rng);
    for (int k = 0; k < moves; ++k) apply_random_move(p, s, rng);
    return p;
}

Outcome routing_correctness() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    long long triples = 0, mismatches = 0, infeasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Scenario s = testing::random_scenario(rng, 10, 20);
        const ContactPlan p = random_feasible_plan(s, rng);
        if (!check_feasible(p, s).feasible()) ++infeasible;
        const auto contacts = to_contacts(p);
        const ContactGraph g(contacts, s);
        for (int i = 0; i < s.node_count(); ++i)
            for (int t = 0; t < s.step_count(); ++t)
                for (int j = 0; j < s.node_count(); ++j) {
                    ++triples;
                    const auto route = cgds(g, i, j, t);
                    const auto oracle = oracle_bdt(p, s, i, j, t).delivery_step;
                    const std::optional<int> got = route ? std::optional<int>(route->delivery_step) : std::nullopt;
                    if (got != oracle) ++mismatches;
                }
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && infeasible == 0 && elapsed < 60.0,
            std::to_string(triples) + " triples, " + std::to_string(mismatches) + " mismatches, " +
                std::to_string(infeasible) + " infeasible plans, " + std::to_string(elapsed) + " s"};
}

Outcome feasibility_preservation() {
    const auto start = Clock::now();
    long long moves = 0, applied = 0, violations = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ScenarioConfig c;
        c.orbit = {550.0, 97.6, 3, 4, 1};
        c.stations = default_ground_stations(4, seed);
        c.grid.step_count = 30;
        c.budgets = {static_cast<int>(seed % 7), static_cast<int>(seed % 4)};
        c.seed = seed;
        const Scenario s = seed % 2 ? generate_scenario(c) : [&] {
            std::mt19937_64 r(seed);
            return testing::random_scenario(r, 10, 20);
        }();
        std::mt19937_64 rng(seed);
        ContactPlan p = initial_plan(s, seed);
        if (!check_feasible(p, s).feasible()) ++violations;
        for (int k = 0; k < 500; ++k) {
            ++moves;
            if (apply_random_move(p, s, rng)) ++applied;
            if (!check_feasible(p, s).feasible()) ++violations;
        }
    }
    const double elapsed = seconds_since(start);
    return {violations == 0 && elapsed < 60.0,
            std::to_string(moves) + " moves (" + std::to_string(applied) + " applied), " + std::to_string(violations) +
                " violations, " + std::to_string(elapsed) + " s"};
}

Scenario desk_scenario(std::uint64_t seed) {
    ScenarioConfig c;
    c.orbit = {550.0, 97.6, default_plane_count(30), 30 / default_plane_count(30), 1};
    c.stations = default_ground_stations(20, seed);
    c.grid.step_count = 90;
    c.seed = seed;
    return generate_scenario(c);
}

Outcome optimization_quality() {
    const auto start = Clock::now();
    double total = 0.0;
    bool monotone = true, feasible = true;
    std::string per_run;
    // One scenario, as written by `cpd scenario generate` with default flags; the annealing seed varies.
    const Scenario s = desk_scenario(1);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ExactEvaluator exact(s);
        SaConfig config;
        config.seed = seed;
        const SaResult r = optimize(s, exact, config);
        const auto& rows = r.history.rows;
        for (std::size_t k = 1; k < rows.size(); ++k)
            if (rows[k].f_best > rows[k - 1].f_best) monotone = false;
        if (!check_feasible(r.best_plan, s).feasible()) feasible = false;
        const double pct = 100.0 * (rows.front().f_best - rows.back().f_best) / rows.front().f_best;
        total += pct;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.1f", per_run.empty() ? "" : " ", pct);
        per_run += buf;
    }
    const double mean = total / 10.0;
    const double elapsed = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean improvement %.2f%% (runs: ", mean);
    return {mean >= 20.0 && monotone && feasible && elapsed <= 1800.0,
            buf + per_run + "), best monotone " + (monotone ? "yes" : "no") + ", best feasible " +
                (feasible ? "yes" : "no") + ", " + std::to_string(elapsed) + " s"};
}

Outcome monotone_objective() {
    const auto start = Clock::now();
    std::mt19937_64 rng(31337);
    int done = 0, increases = 0;
    while (done < 100) {
        const Scenario s = testing::random_scenario(rng, 10, 20);
        ContactPlan p = random_feasible_plan(s, rng);
        std::vector<StepEdge> free;
        for (int t = 0; t < s.step_count(); ++t)
            for (const Edge& e : s.visibility.edges(t))
                if (!p.active(t, e)) {
                    p.activate(t, e);
                    if (check_feasible(p, s).feasible()) free.push_back({t, e});
                    p.deactivate(t, e);
                }
        if (free.empty()) continue;
        const double before = evaluate_exact(p, s).normalized;
        const StepEdge add = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
        p.activate(add.step, add.edge);
        if (evaluate_exact(p, s).normalized > before) ++increases;
        ++done;
    }
    const double elapsed = seconds_since(start);
    return {increases == 0 && elapsed < 300.0,
            std::to_string(done) + " augmentations, " + std::to_string(increases) + " increases, " +
                std::to_string(elapsed) + " s"};
}

Outcome protocol_robustness() {
    const Scenario s = desk_scenario(1);
    std::string detail;
    bool ok = true;

    SurrogateClient client(open_endpoint(std::string("exec:") + CPD_STUB_EVALUATOR), s.node_count(), s.step_count());
    RemoteEvaluator remote(client);
    SaConfig config;
    const SaResult r = optimize(s, remote, config);
    const bool complete = !r.aborted() && r.history.rows.size() == 101 && r.history.rows.back().f_best == 0.5;
    ok = ok && complete;
    detail += std::string("stub run ") + (complete ? "complete" : "incomplete") + " with " +
              std::to_string(r.history.rows.size()) + " rows";

    const fs::path dir = fs::temp_directory_path() / ("cpd_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    save_scenario(s, dir / "scenario.json");
    const std::string cmd = std::string(CPD_CLI) + " optimize --quiet --scenario " + (dir / "scenario.json").string() +
                            " --evaluator surrogate --endpoint 'exec:" + CPD_STUB_EVALUATOR +
                            " --kill-after 30' --out-history " + (dir / "history.csv").string() + " --out-plan " +
                            (dir / "plan.json").string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::size_t rows = 0;
    std::string state;
    try {
        const RunHistory h = load_history(dir / "history.csv");
        rows = h.rows.size();
        state = h.metadata.count("status") ? h.metadata.at("status") : "";
    } catch (const Error& e) {
        state = e.what();
    }
    fs::remove_all(dir);
    const bool killed_ok = code == 4 && rows > 0 && rows < 101 && state == "aborted";
    ok = ok && killed_ok;
    detail += "; killed stub: exit " + std::to_string(code) + ", " + std::to_string(rows) + " rows persisted, status " +
              state;
    return {ok, detail};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"routing correctness", routing_correctness},
        {"feasibility preservation", feasibility_preservation},
        {"optimization quality", optimization_quality},
        {"monotone objective", monotone_objective},
        {"protocol robustness", protocol_robustness},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s: %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
