#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpd/annealing.hpp"
#include "cpd/build_info.hpp"
#include "cpd/contact_plan.hpp"
#include "cpd/dataset.hpp"
#include "cpd/error.hpp"
#include "cpd/objective.hpp"
#include "cpd/report.hpp"
#include "cpd/routing.hpp"
#include "cpd/scenario.hpp"
#include "cpd/surrogate_client.hpp"

using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kInfeasible = 3, kEvaluator = 4 };

// Thrown for evaluator failures that were already handled (history persisted) but must end with code 4.
struct EvaluatorAbort {
    std::string message;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cpd::ParseError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw cpd::InvalidSpecError("cannot write '" + path + "'");
}

// --- scenario generate ---------------------------------------------------------------------------

struct ScenarioArgs {
    int sats = 30;
    int stations = 20;
    int steps = 90;
    double step_seconds = 60.0;
    std::uint64_t seed = 1;
    std::string out;
    int planes = 0;
    double altitude = 550.0;
    double inclination = 97.6;
    int phasing = 1;
    double isl_range = 5000.0;
    double min_elevation = 10.0;
    std::string requirements = "random-k";
    int k = 3;
    std::string requirements_file;
    int budget_isl = 12;
    int budget_gsl = 4;
    int cap = 1;
};

int run_scenario_generate(const ScenarioArgs& a) {
    cpd::ScenarioConfig config;
    const int planes = a.planes > 0 ? a.planes : cpd::default_plane_count(a.sats);
    if (a.sats < 1 || a.sats % planes != 0)
        throw cpd::InvalidSpecError("--sats " + std::to_string(a.sats) + " is not divisible by " + std::to_string(planes) +
                                    " planes");
    if (a.stations < 0) throw cpd::InvalidSpecError("--stations must be >= 0");
    config.orbit = {a.altitude, a.inclination, planes, a.sats / planes, a.phasing};
    config.stations = cpd::default_ground_stations(a.stations, a.seed);
    config.grid.step_count = a.steps;
    config.grid.step_seconds = a.step_seconds;
    config.isl_max_range_km = a.isl_range;
    config.min_elevation_deg = a.min_elevation;
    config.budgets = {a.budget_isl, a.budget_gsl};
    config.per_step_degree_cap = a.cap;
    config.seed = a.seed;
    if (a.requirements == "all-pairs") {
        config.requirements.kind = cpd::RequirementPolicy::Kind::AllPairs;
    } else if (a.requirements == "random-k") {
        config.requirements.kind = cpd::RequirementPolicy::Kind::RandomK;
        config.requirements.k = a.k;
    } else {
        if (a.requirements_file.empty()) throw cpd::InvalidSpecError("--requirements explicit needs --requirements-file");
        const json sets = json::parse(read_text(a.requirements_file), nullptr, false);
        if (sets.is_discarded() || !sets.is_array()) throw cpd::ParseError(a.requirements_file + ": expected an array of arrays");
        config.requirements.kind = cpd::RequirementPolicy::Kind::Explicit;
        for (const json& s : sets) {
            if (!s.is_array()) throw cpd::ParseError(a.requirements_file + ": expected an array of arrays");
            std::vector<int> set;
            for (const json& v : s) {
                if (!v.is_number_integer()) throw cpd::ParseError(a.requirements_file + ": node indices must be integers");
                set.push_back(v.get<int>());
            }
            config.requirements.explicit_sets.push_back(std::move(set));
        }
    }
    const cpd::Scenario scenario = cpd::generate_scenario(config);
    write_text(a.out, cpd::scenario_to_json(scenario));
    std::cerr << "scenario " << cpd::scenario_hash(scenario) << ": " << scenario.satellite_count() << " satellites, "
              << scenario.station_count() << " stations, " << scenario.step_count() << " steps, "
              << scenario.visibility.total_edges() << " visible slots\n";
    return kOk;
}

// --- dataset generate ----------------------------------------------------------------------------

struct DatasetArgs {
    std::string scenario;
    int count = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string policy = "mixed";
    int chain_length = 20;
    int workers = 1;
};

int run_dataset_generate(const DatasetArgs& a) {
    const cpd::Scenario scenario = cpd::load_scenario(a.scenario);
    cpd::CorpusOptions options;
    options.count = a.count;
    options.seed = a.seed;
    options.policy = a.policy == "initial"      ? cpd::DiversityPolicy::InitialOnly
                     : a.policy == "trajectory" ? cpd::DiversityPolicy::Trajectory
                                                : cpd::DiversityPolicy::Mixed;
    options.chain_length = a.chain_length;
    options.exact.workers = a.workers;

    std::ofstream file;
    if (!a.out.empty() && a.out != "-") {
        file.open(a.out, std::ios::binary);
        if (!file) throw cpd::InvalidSpecError("cannot write '" + a.out + "'");
    }
    std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
    int written = 0;
    cpd::generate_corpus(scenario, options, [&](const cpd::EvaluationRecord& r) {
        out << cpd::record_to_json(r) << "\n";
        ++written;
    });
    out.flush();
    std::cerr << "wrote " << written << " records (policy " << a.policy << ", seed " << a.seed
              << ", git " << cpd::git_describe() << ")\n";
    return kOk;
}

// --- optimize ------------------------------------------------------------------------------------

struct OptimizeArgs {
    std::string scenario;
    std::string evaluator = "cgr";
    std::string endpoint;
    int iters = 100;
    double temp = 10.0;
    double cool = 0.95;
    std::uint64_t seed = 1;
    std::string out_plan;
    std::string out_history;
    int workers = 1;
    int stride = 1;
    std::string matching = "maximum";
    std::string cooling = "every-iteration";
    bool reevaluate = false;
    bool propagation_delay = false;
    double timeout_s = 30.0;
    bool quiet = false;
};

int run_optimize(const OptimizeArgs& a) {
    const cpd::Scenario scenario = cpd::load_scenario(a.scenario);
    cpd::ExactOptions exact;
    exact.workers = a.workers;
    exact.sample_stride = a.stride;
    exact.routing.propagation_delay = a.propagation_delay;

    cpd::SaConfig config;
    config.initial_temperature = a.temp;
    config.cooling_rate = a.cool;
    config.iterations = a.iters;
    config.seed = a.seed;
    config.matching = a.matching == "greedy" ? cpd::MatchingMode::Greedy : cpd::MatchingMode::Maximum;
    config.cooling = a.cooling == "on-worse-accept" ? cpd::CoolingPolicy::OnWorseAccept : cpd::CoolingPolicy::EveryIteration;
    config.record_trajectory = a.reevaluate;

    std::unique_ptr<cpd::SurrogateClient> client;
    std::unique_ptr<cpd::Evaluator> evaluator;
    if (a.evaluator == "surrogate") {
        if (a.endpoint.empty()) throw cpd::InvalidSpecError("--evaluator surrogate needs --endpoint");
        if (!(a.timeout_s > 0.0)) throw cpd::InvalidSpecError("--timeout must be positive");
        client = std::make_unique<cpd::SurrogateClient>(
            cpd::open_endpoint(a.endpoint), scenario.node_count(), scenario.step_count(),
            std::chrono::milliseconds(static_cast<long long>(a.timeout_s * 1000.0)));
        evaluator = std::make_unique<cpd::RemoteEvaluator>(*client);
    } else if (a.evaluator == "oracle") {
        evaluator = std::make_unique<cpd::OracleEvaluator>(scenario, a.stride);
    } else {
        evaluator = std::make_unique<cpd::ExactEvaluator>(scenario, exact);
    }

    cpd::SaResult result = cpd::optimize(scenario, *evaluator, config, [&](const cpd::IterationRecord& r) {
        if (!a.quiet)
            std::cerr << "iter " << r.iter << " cand " << r.f_cand << " curr " << r.f_curr << " best " << r.f_best
                      << (r.accepted ? " accepted" : "") << "\n";
    });

    auto& meta = result.history.metadata;
    meta["scenario"] = a.scenario;
    meta["workers"] = std::to_string(a.workers);
    meta["stride"] = std::to_string(a.stride);
    if (!a.endpoint.empty()) meta["endpoint"] = a.endpoint;
    if (a.reevaluate && !result.aborted()) {
        cpd::ExactEvaluator reference(scenario, exact);
        cpd::reevaluate_history(result.history, result.trajectory, reference);
    }
    if (!a.out_history.empty()) cpd::save_history(result.history, a.out_history);
    if (!a.out_plan.empty()) {
        std::map<std::string, std::string> plan_meta = meta;
        plan_meta["best_objective"] = std::to_string(result.best_objective);
        cpd::save_plan(result.best_plan, a.out_plan, plan_meta);
    }
    if (result.aborted()) throw EvaluatorAbort{*result.abort_reason};

    const auto& rows = result.history.rows;
    std::cout << "initial " << rows.front().f_best << " final " << rows.back().f_best << " improvement "
              << cpd::summarize_run(result.history).improvement_pct << "%\n";
    return kOk;
}

// --- route ---------------------------------------------------------------------------------------

struct RouteArgs {
    std::string scenario;
    std::string plan;
    int from = 0;
    int to = 0;
    int t = 0;
    bool oracle = false;
    bool propagation_delay = false;
};

int run_route(const RouteArgs& a) {
    const cpd::Scenario scenario = cpd::load_scenario(a.scenario);
    const cpd::ContactPlan plan = cpd::load_plan(a.plan, scenario.node_count());
    if (plan.step_count() != scenario.step_count())
        throw cpd::DimensionError("plan has " + std::to_string(plan.step_count()) + " steps, scenario has " +
                                  std::to_string(scenario.step_count()));
    json out{{"source", a.from},         {"destination", a.to},   {"t", a.t}, {"method", a.oracle ? "oracle" : "cgds"},
             {"delivery_step", nullptr}, {"bdt_minutes", nullptr}};
    if (a.oracle) {
        const cpd::BdtResult r = cpd::oracle_bdt(plan, scenario, a.from, a.to, a.t);
        out["reachable"] = r.reachable();
        if (r.reachable()) {
            out["delivery_step"] = *r.delivery_step;
            out["bdt_minutes"] = r.bdt_minutes;
        }
    } else {
        const auto contacts = cpd::to_contacts(plan);
        const cpd::ContactGraph graph(contacts, scenario, {a.propagation_delay});
        const auto route = cpd::cgds(graph, a.from, a.to, a.t);
        out["reachable"] = route.has_value();
        if (route) {
            out["delivery_step"] = route->delivery_step;
            out["bdt_minutes"] = route->bdt_minutes;
            json hops = json::array();
            for (const cpd::Hop& h : route->hops)
                hops.push_back({{"from", h.from}, {"to", h.to}, {"t_start", h.t_start}, {"t_end", h.t_end}, {"tx_step", h.tx_step}});
            out["hops"] = std::move(hops);
            if (!route->hops.empty()) {
                out["tx_win"] = {route->tx_win.start, route->tx_win.end};
                out["volume"] = route->volume;
            }
        }
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
}

// --- evaluate ------------------------------------------------------------------------------------

struct EvaluateArgs {
    std::string scenario;
    std::string plan;
    std::string evaluator = "cgr";
    std::string endpoint;
    int stride = 1;
    int workers = 1;
    bool propagation_delay = false;
    double timeout_s = 30.0;
};

int run_evaluate(const EvaluateArgs& a) {
    const cpd::Scenario scenario = cpd::load_scenario(a.scenario);
    const cpd::ContactPlan plan = cpd::load_plan(a.plan, scenario.node_count());
    if (plan.step_count() != scenario.step_count())
        throw cpd::DimensionError("plan has " + std::to_string(plan.step_count()) + " steps, scenario has " +
                                  std::to_string(scenario.step_count()));
    cpd::ObjectiveValue v;
    if (a.evaluator == "surrogate") {
        if (a.endpoint.empty()) throw cpd::InvalidSpecError("--evaluator surrogate needs --endpoint");
        cpd::SurrogateClient client(cpd::open_endpoint(a.endpoint), scenario.node_count(), scenario.step_count(),
                                    std::chrono::milliseconds(static_cast<long long>(a.timeout_s * 1000.0)));
        v = cpd::evaluate_remote(plan, client);
    } else if (a.evaluator == "oracle") {
        const auto report = cpd::check_feasible(plan, scenario);
        if (!report.feasible()) throw cpd::InfeasiblePlanError("plan violates " + std::to_string(report.violations.size()) + " constraints");
        v = cpd::evaluate_oracle(plan, scenario, a.stride);
    } else {
        cpd::ExactOptions exact;
        exact.sample_stride = a.stride;
        exact.workers = a.workers;
        exact.routing.propagation_delay = a.propagation_delay;
        v = cpd::evaluate_exact(plan, scenario, exact);
    }
    json out{{"evaluator", a.evaluator}, {"normalized", v.normalized}};
    out["raw_minutes"] = v.triple_count ? json(v.raw_minutes) : json(nullptr);
    out["triple_count"] = v.triple_count ? json(*v.triple_count) : json(nullptr);
    out["unreachable_count"] = v.unreachable_count ? json(*v.unreachable_count) : json(nullptr);
    std::cout << out.dump(2) << "\n";
    return kOk;
}

// --- report --------------------------------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> histories;
    std::string csv;
    std::string curve;
};

int run_report(const ReportArgs& a) {
    if (a.histories.empty()) throw cpd::InvalidSpecError("report: give at least one history file");
    std::vector<cpd::RunHistory> histories;
    for (const std::string& path : a.histories) histories.push_back(cpd::load_history(path));
    const auto summaries = cpd::summarize(histories);
    std::cout << cpd::format_table(summaries);
    if (!a.csv.empty()) write_text(a.csv, cpd::summary_csv(summaries));
    if (!a.curve.empty()) write_text(a.curve, cpd::curve_csv(histories));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGPIPE, SIG_IGN);

    CLI::App app{"Contact plan design for satellite constellations"};
    app.set_version_flag("--version", std::string(cpd::git_describe()));
    app.require_subcommand(1);

    const auto evaluators = CLI::IsMember({"cgr", "surrogate", "oracle"});

    ScenarioArgs sa;
    auto* scenario_cmd = app.add_subcommand("scenario", "Scenario tools");
    scenario_cmd->require_subcommand(1);
    auto* gen = scenario_cmd->add_subcommand("generate", "Propagate a Walker-delta constellation and write a scenario file");
    gen->add_option("--sats", sa.sats, "Number of satellites")->capture_default_str();
    gen->add_option("--stations", sa.stations, "Number of ground stations")->capture_default_str();
    gen->add_option("--steps", sa.steps, "Time steps N_t")->capture_default_str();
    gen->add_option("--step-seconds", sa.step_seconds, "Seconds per step")->capture_default_str();
    gen->add_option("--seed", sa.seed, "Seed for station placement and requirements")->capture_default_str();
    gen->add_option("--out", sa.out, "Output file ('-' for stdout)")->required();
    gen->add_option("--planes", sa.planes, "Orbital planes (default: largest divisor of --sats not above its square root)");
    gen->add_option("--altitude", sa.altitude, "Orbit altitude, km")->capture_default_str();
    gen->add_option("--inclination", sa.inclination, "Inclination, degrees")->capture_default_str();
    gen->add_option("--phasing", sa.phasing, "Walker phasing factor F")->capture_default_str();
    gen->add_option("--isl-range", sa.isl_range, "Maximum inter-satellite link range, km")->capture_default_str();
    gen->add_option("--min-elevation", sa.min_elevation, "Ground link elevation mask, degrees")->capture_default_str();
    gen->add_option("--requirements", sa.requirements, "Requirement policy")
        ->check(CLI::IsMember({"all-pairs", "random-k", "explicit"}))
        ->capture_default_str();
    gen->add_option("--k", sa.k, "Destinations per satellite for random-k")->capture_default_str();
    gen->add_option("--requirements-file", sa.requirements_file, "JSON array of destination lists, one per satellite");
    gen->add_option("--budget-isl", sa.budget_isl, "ISL slots per satellite over the horizon (M_s)")->capture_default_str();
    gen->add_option("--budget-gsl", sa.budget_gsl, "GSL slots per satellite over the horizon (M_g)")->capture_default_str();
    gen->add_option("--cap", sa.cap, "Per-step link cap per satellite")->capture_default_str();

    DatasetArgs da;
    auto* dataset_cmd = app.add_subcommand("dataset", "Training corpus tools");
    dataset_cmd->require_subcommand(1);
    auto* dgen = dataset_cmd->add_subcommand("generate", "Write exactly labelled plans as NDJSON");
    dgen->add_option("--scenario", da.scenario, "Scenario file")->required();
    dgen->add_option("--count", da.count, "Number of records")->capture_default_str();
    dgen->add_option("--seed", da.seed, "Seed")->capture_default_str();
    dgen->add_option("--out", da.out, "Output NDJSON file ('-' for stdout)")->required();
    dgen->add_option("--policy", da.policy, "Plan sources")->check(CLI::IsMember({"mixed", "initial", "trajectory"}))->capture_default_str();
    dgen->add_option("--chain-length", da.chain_length, "Candidates per annealing chain")->capture_default_str();
    dgen->add_option("--workers", da.workers, "Threads for exact evaluation")->capture_default_str();

    OptimizeArgs oa;
    auto* opt = app.add_subcommand("optimize", "Simulated annealing over contact plans");
    opt->add_option("--scenario", oa.scenario, "Scenario file")->required();
    opt->add_option("--evaluator", oa.evaluator, "Objective evaluator")->check(evaluators)->capture_default_str();
    opt->add_option("--endpoint", oa.endpoint, "Remote evaluator: host:port or exec:<command>");
    opt->add_option("--iters", oa.iters, "Iterations")->capture_default_str();
    opt->add_option("--temp", oa.temp, "Initial temperature, minutes of summed objective")->capture_default_str();
    opt->add_option("--cool", oa.cool, "Cooling rate r")->capture_default_str();
    opt->add_option("--seed", oa.seed, "Seed")->capture_default_str();
    opt->add_option("--out-plan", oa.out_plan, "Best plan output (JSON)");
    opt->add_option("--out-history", oa.out_history, "History output (CSV)");
    opt->add_option("--workers", oa.workers, "Threads for exact evaluation")->capture_default_str();
    opt->add_option("--stride", oa.stride, "Evaluate every k-th start step")->capture_default_str();
    opt->add_option("--matching", oa.matching, "Initial plan construction")
        ->check(CLI::IsMember({"maximum", "greedy"}))
        ->capture_default_str();
    opt->add_option("--cooling-policy", oa.cooling, "When to cool")
        ->check(CLI::IsMember({"every-iteration", "on-worse-accept"}))
        ->capture_default_str();
    opt->add_flag("--reevaluate", oa.reevaluate, "Add exact objectives of every visited plan to the history");
    opt->add_flag("--propagation-delay", oa.propagation_delay, "Add light-time per hop to delivery times");
    opt->add_option("--timeout", oa.timeout_s, "Remote evaluation timeout, seconds")->capture_default_str();
    opt->add_flag("--quiet", oa.quiet, "No per-iteration progress on stderr");

    RouteArgs ra;
    auto* route = app.add_subcommand("route", "Best route for one (source, destination, start step)");
    route->add_option("--scenario", ra.scenario, "Scenario file")->required();
    route->add_option("--plan", ra.plan, "Plan file")->required();
    route->add_option("--from", ra.from, "Source node")->required();
    route->add_option("--to", ra.to, "Destination node")->required();
    route->add_option("--t", ra.t, "Start step")->required();
    route->add_flag("--oracle", ra.oracle, "Use the time-expanded reference search");
    route->add_flag("--propagation-delay", ra.propagation_delay, "Add light-time per hop");

    EvaluateArgs ea;
    auto* eval = app.add_subcommand("evaluate", "Objective of a stored plan");
    eval->add_option("--scenario", ea.scenario, "Scenario file")->required();
    eval->add_option("--plan", ea.plan, "Plan file")->required();
    eval->add_option("--evaluator", ea.evaluator, "Objective evaluator")->check(evaluators)->capture_default_str();
    eval->add_option("--endpoint", ea.endpoint, "Remote evaluator: host:port or exec:<command>");
    eval->add_option("--stride", ea.stride, "Evaluate every k-th start step")->capture_default_str();
    eval->add_option("--workers", ea.workers, "Threads")->capture_default_str();
    eval->add_flag("--propagation-delay", ea.propagation_delay, "Add light-time per hop");
    eval->add_option("--timeout", ea.timeout_s, "Remote evaluation timeout, seconds")->capture_default_str();

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "Summarise optimisation histories");
    report->add_option("histories", rep.histories, "History CSV files");
    report->add_option("--csv", rep.csv, "Summary CSV output");
    report->add_option("--curve", rep.curve, "Per-iteration mean/std CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (gen->parsed()) return run_scenario_generate(sa);
        if (dgen->parsed()) return run_dataset_generate(da);
        if (opt->parsed()) return run_optimize(oa);
        if (route->parsed()) return run_route(ra);
        if (eval->parsed()) return run_evaluate(ea);
        if (report->parsed()) return run_report(rep);
    } catch (const EvaluatorAbort& e) {
        std::cerr << "error: evaluator failed, partial history kept: " << e.message << "\n";
        return kEvaluator;
    } catch (const cpd::InfeasiblePlanError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInfeasible;
    } catch (const cpd::EvaluationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEvaluator;
    } catch (const cpd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
