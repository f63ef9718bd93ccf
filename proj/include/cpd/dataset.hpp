#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/contact_plan.hpp"
#include "cpd/objective.hpp"
#include "cpd/scenario.hpp"

namespace cpd {

inline constexpr int kNodeFeatureCount = 4;
using NodeFeatures = std::array<double, kNodeFeatureCount>;

struct EvaluationRecord {
    std::vector<StepEdge> contacts;
    std::vector<NodeFeatures> node_features;  // one row per node
    double label = 0.0;                       // exact normalized objective
    std::string scenario_ref;                 // scenario_hash of the source scenario
};

// Per node: is_satellite, is_ground, mean per-step degree in the plan / degree cap,
// fraction of steps with at least one visible neighbour.
std::vector<NodeFeatures> compute_node_features(const Scenario& scenario, const ContactPlan& plan);

enum class DiversityPolicy {
    Mixed,        // alternate thinned random initialisations and annealing-chain candidates
    InitialOnly,  // thinned random initialisations only
    Trajectory,   // annealing-chain candidates only
};

std::string_view to_string(DiversityPolicy policy);

struct CorpusOptions {
    int count = 1;
    DiversityPolicy policy = DiversityPolicy::Mixed;
    std::uint64_t seed = 1;
    int chain_length = 20;  // candidates drawn from one chain before a new one starts
    ExactOptions exact;
};

using RecordSink = std::function<void(const EvaluationRecord&)>;

// Deterministic per seed. Throws InvalidSpecError when count < 1 or chain_length < 1.
void generate_corpus(const Scenario& scenario, const CorpusOptions& options, const RecordSink& sink);

EvaluationRecord make_record(const Scenario& scenario, const ContactPlan& plan, const ExactOptions& exact = {});
ContactPlan record_plan(const EvaluationRecord& record, const Scenario& scenario);

std::string record_to_json(const EvaluationRecord& record);
EvaluationRecord record_from_json(std::string_view line);

}  // namespace cpd
