#include "cpd/dataset.hpp"

#include <random>

#include "cpd/annealing.hpp"
#include "cpd/error.hpp"
#include "json_util.hpp"

namespace cpd {

using detail::json;

std::string_view to_string(DiversityPolicy policy) {
    switch (policy) {
        case DiversityPolicy::Mixed: return "mixed";
        case DiversityPolicy::InitialOnly: return "initial";
        case DiversityPolicy::Trajectory: return "trajectory";
    }
    return "?";
}

std::vector<NodeFeatures> compute_node_features(const Scenario& scenario, const ContactPlan& plan) {
    const int n = scenario.node_count();
    const int steps = scenario.step_count();
    if (plan.node_count() != n || plan.step_count() != steps)
        throw DimensionError("node features: plan does not match scenario");

    std::vector<double> degree(n, 0.0);
    std::vector<int> visible_steps(n, 0);
    std::vector<int> seen(n, -1);
    for (int t = 0; t < steps; ++t) {
        for (const Edge& e : plan.edges(t)) {
            degree[e.a] += 1.0;
            degree[e.b] += 1.0;
        }
        for (const Edge& e : scenario.visibility.edges(t))
            for (int v : {e.a, e.b})
                if (seen[v] != t) {
                    seen[v] = t;
                    ++visible_steps[v];
                }
    }
    const double cap = scenario.per_step_degree_cap > 0 ? scenario.per_step_degree_cap : 1.0;
    std::vector<NodeFeatures> out(n);
    for (int v = 0; v < n; ++v) {
        const bool sat = scenario.is_satellite(v);
        out[v] = {sat ? 1.0 : 0.0, sat ? 0.0 : 1.0, degree[v] / steps / cap, static_cast<double>(visible_steps[v]) / steps};
    }
    return out;
}

EvaluationRecord make_record(const Scenario& scenario, const ContactPlan& plan, const ExactOptions& exact) {
    EvaluationRecord r;
    for (int t = 0; t < plan.step_count(); ++t)
        for (const Edge& e : plan.edges(t)) r.contacts.push_back({t, e});
    r.node_features = compute_node_features(scenario, plan);
    r.label = evaluate_exact(plan, scenario, exact).normalized;
    r.scenario_ref = scenario_hash(scenario);
    return r;
}

ContactPlan record_plan(const EvaluationRecord& record, const Scenario& scenario) {
    ContactPlan plan(scenario.node_count(), scenario.step_count());
    for (const StepEdge& s : record.contacts) plan.activate(s.step, s.edge);
    return plan;
}

namespace {

// Dropping slots never breaks symmetry, visibility, budgets or the degree cap.
ContactPlan thinned_initial(const Scenario& scenario, std::mt19937_64& rng) {
    const std::uint64_t init_seed = rng();
    const MatchingMode mode = std::bernoulli_distribution(0.5)(rng) ? MatchingMode::Maximum : MatchingMode::Greedy;
    ContactPlan plan = initial_plan(scenario, init_seed, mode);
    const double keep = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    std::bernoulli_distribution coin(keep);
    ContactPlan out(plan.node_count(), plan.step_count());
    for (int t = 0; t < plan.step_count(); ++t)
        for (const Edge& e : plan.edges(t))
            if (coin(rng)) out.activate(t, e);
    return out;
}

// A short annealing chain at one temperature; every candidate it evaluates becomes a record.
class Chain {
public:
    Chain(const Scenario& scenario, const CorpusOptions& options, std::mt19937_64& rng)
        : scenario_(scenario), options_(options), rng_(rng()), acceptor_(rng()) {
        static constexpr double kTemperatures[] = {1e1, 1e3, 1e4, 1e5};
        temperature_ = kTemperatures[std::uniform_int_distribution<int>(0, 3)(rng)];
        std::size_t pairs = 0;
        for (const auto& c : scenario.requirements) pairs += c.size();
        energy_scale_ = static_cast<double>(pairs) * scenario.step_count() * scenario.grid.horizon_minutes();
        current_ = thinned_initial(scenario, rng);
    }

    bool exhausted() const { return produced_ >= options_.chain_length; }

    EvaluationRecord next() {
        ++produced_;
        if (!f_curr_) {
            EvaluationRecord r = make_record(scenario_, current_, options_.exact);
            f_curr_ = r.label;
            return r;
        }
        auto neighbor = random_neighbor(current_, scenario_, rng_);
        if (!neighbor) {
            produced_ = options_.chain_length;
            return make_record(scenario_, current_, options_.exact);
        }
        EvaluationRecord r = make_record(scenario_, neighbor->plan, options_.exact);
        if (acceptor_.accept((r.label - *f_curr_) * energy_scale_, temperature_)) {
            current_ = std::move(neighbor->plan);
            f_curr_ = r.label;
        }
        return r;
    }

private:
    const Scenario& scenario_;
    const CorpusOptions& options_;
    std::mt19937_64 rng_;
    MetropolisAcceptor acceptor_;
    double temperature_ = 1.0;
    double energy_scale_ = 1.0;
    ContactPlan current_;
    std::optional<double> f_curr_;
    int produced_ = 0;
};

}  // namespace

void generate_corpus(const Scenario& scenario, const CorpusOptions& options, const RecordSink& sink) {
    if (options.count < 1) throw InvalidSpecError("corpus: count must be >= 1");
    if (options.chain_length < 1) throw InvalidSpecError("corpus: chain length must be >= 1");
    std::mt19937_64 rng(options.seed);
    std::optional<Chain> chain;
    for (int k = 0; k < options.count; ++k) {
        const bool from_chain = options.policy == DiversityPolicy::Trajectory ||
                                (options.policy == DiversityPolicy::Mixed && k % 2 == 1);
        if (!from_chain) {
            sink(make_record(scenario, thinned_initial(scenario, rng), options.exact));
            continue;
        }
        if (!chain || chain->exhausted()) chain.emplace(scenario, options, rng);
        sink(chain->next());
    }
}

std::string record_to_json(const EvaluationRecord& record) {
    json contacts = json::array();
    for (const StepEdge& s : record.contacts) contacts.push_back({s.step, s.edge.a, s.edge.b});
    json features = json::array();
    for (const NodeFeatures& f : record.node_features) features.push_back(f);
    return json{{"contacts", std::move(contacts)},
                {"node_features", std::move(features)},
                {"label", record.label},
                {"scenario_ref", record.scenario_ref}}
        .dump();
}

EvaluationRecord record_from_json(std::string_view line) {
    const json doc = detail::parse_json(line, "record");
    if (!doc.is_object()) throw ParseError("record: expected object");
    EvaluationRecord r;
    const json& contacts = detail::require(doc, "contacts", "record");
    if (!contacts.is_array()) throw ParseError("record.contacts: expected array");
    for (std::size_t k = 0; k < contacts.size(); ++k) {
        const std::string path = "record.contacts[" + std::to_string(k) + "]";
        const json& c = contacts[k];
        if (!c.is_array() || c.size() != 3) throw ParseError(path + ": expected [t, i, j]");
        const int t = static_cast<int>(detail::as_int(c[0], path + "[0]"));
        const int i = static_cast<int>(detail::as_int(c[1], path + "[1]"));
        const int j = static_cast<int>(detail::as_int(c[2], path + "[2]"));
        if (i == j) throw ParseError(path + ": self contact");
        r.contacts.push_back({t, make_edge(i, j)});
    }
    const json& features = detail::require(doc, "node_features", "record");
    if (!features.is_array()) throw ParseError("record.node_features: expected array");
    for (std::size_t k = 0; k < features.size(); ++k) {
        const std::string path = "record.node_features[" + std::to_string(k) + "]";
        const json& row = features[k];
        if (!row.is_array() || row.size() != kNodeFeatureCount)
            throw ParseError(path + ": expected " + std::to_string(kNodeFeatureCount) + " numbers");
        NodeFeatures f{};
        for (int d = 0; d < kNodeFeatureCount; ++d) {
            if (!row[d].is_number()) throw ParseError(path + "[" + std::to_string(d) + "]: expected number");
            f[d] = row[d].get<double>();
        }
        r.node_features.push_back(f);
    }
    r.label = detail::require_number(doc, "label", "record");
    r.scenario_ref = detail::require_string(doc, "scenario_ref", "record");
    return r;
}

}  // namespace cpd
