#include <cstdint>

#include "cpd/error.hpp"
#include "cpd/scenario.hpp"
#include "json_util.hpp"

namespace cpd {

using detail::json;

namespace {

constexpr int kScenarioVersion = 1;

const char* kind_name(NodeKind kind) { return kind == NodeKind::Satellite ? "satellite" : "ground_station"; }

}  // namespace

std::string scenario_to_json(const Scenario& scenario) {
    json doc;
    doc["version"] = kScenarioVersion;

    json nodes = json::array();
    for (const auto& node : scenario.nodes) nodes.push_back({{"index", node.index}, {"kind", kind_name(node.kind)}});
    doc["nodes"] = std::move(nodes);

    doc["grid"] = {{"step_count", scenario.grid.step_count},
                   {"step_seconds", scenario.grid.step_seconds},
                   {"epoch", scenario.grid.epoch}};

    json vis = json::array();
    for (int t = 0; t < scenario.visibility.step_count(); ++t) {
        json step = json::array();
        for (const Edge& e : scenario.visibility.edges(t)) step.push_back({e.a, e.b});
        vis.push_back(std::move(step));
    }
    doc["visibility"] = std::move(vis);

    doc["requirements"] = scenario.requirements;
    doc["budgets"] = {{"isl", scenario.budgets.isl}, {"gsl", scenario.budgets.gsl}};
    doc["per_step_degree_cap"] = scenario.per_step_degree_cap;
    doc["mean_link_distance_km"] = scenario.mean_link_distance_km;
    doc["metadata"] = scenario.metadata;
    return doc.dump(1) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
    using namespace detail;
    const json doc = parse_json(text, "scenario");

    const long long version = require_int(doc, "version", "");
    if (version != kScenarioVersion)
        throw ParseError("version: unsupported scenario version " + std::to_string(version));

    Scenario scenario;

    const json& nodes = require(doc, "nodes", "");
    if (!nodes.is_array()) throw ParseError("nodes: expected array");
    int satellites = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const std::string path = "nodes[" + std::to_string(k) + "]";
        NodeId id;
        id.index = static_cast<int>(require_int(nodes[k], "index", path));
        const std::string kind = require_string(nodes[k], "kind", path);
        if (kind == "satellite") {
            id.kind = NodeKind::Satellite;
            ++satellites;
        } else if (kind == "ground_station") {
            id.kind = NodeKind::GroundStation;
        } else {
            throw ParseError(path + ".kind: unknown node kind '" + kind + "'");
        }
        scenario.nodes.push_back(id);
    }

    const json& grid = require(doc, "grid", "");
    scenario.grid.step_count = static_cast<int>(require_int(grid, "step_count", "grid"));
    scenario.grid.step_seconds = require_number(grid, "step_seconds", "grid");
    scenario.grid.epoch = require_string(grid, "epoch", "grid");

    const json& vis = require(doc, "visibility", "");
    if (!vis.is_array()) throw ParseError("visibility: expected array of steps");
    std::vector<std::vector<Edge>> per_step;
    for (std::size_t t = 0; t < vis.size(); ++t) {
        const std::string path = "visibility[" + std::to_string(t) + "]";
        if (!vis[t].is_array()) throw ParseError(path + ": expected array of [i,j] pairs");
        std::vector<Edge> list;
        for (std::size_t k = 0; k < vis[t].size(); ++k) {
            const json& pair = vis[t][k];
            const std::string pp = path + "[" + std::to_string(k) + "]";
            if (!pair.is_array() || pair.size() != 2) throw ParseError(pp + ": expected [i,j]");
            const auto i = as_int(pair[0], pp + "[0]");
            const auto j = as_int(pair[1], pp + "[1]");
            if (!(i < j)) throw ParseError(pp + ": pairs must satisfy i<j");
            list.push_back(Edge{static_cast<int>(i), static_cast<int>(j)});
        }
        per_step.push_back(std::move(list));
    }

    const json& reqs = require(doc, "requirements", "");
    if (!reqs.is_array()) throw ParseError("requirements: expected array");
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        const std::string path = "requirements[" + std::to_string(i) + "]";
        if (!reqs[i].is_array()) throw ParseError(path + ": expected array");
        std::vector<int> set;
        for (std::size_t k = 0; k < reqs[i].size(); ++k)
            set.push_back(static_cast<int>(as_int(reqs[i][k], path + "[" + std::to_string(k) + "]")));
        scenario.requirements.push_back(std::move(set));
    }

    const json& budgets = require(doc, "budgets", "");
    scenario.budgets.isl = static_cast<int>(require_int(budgets, "isl", "budgets"));
    scenario.budgets.gsl = static_cast<int>(require_int(budgets, "gsl", "budgets"));
    scenario.per_step_degree_cap = static_cast<int>(require_int(doc, "per_step_degree_cap", ""));

    if (auto it = doc.find("mean_link_distance_km"); it != doc.end()) {
        if (!it->is_number()) throw ParseError("mean_link_distance_km: expected number");
        scenario.mean_link_distance_km = it->get<double>();
    }
    if (auto it = doc.find("metadata"); it != doc.end()) {
        if (!it->is_object()) throw ParseError("metadata: expected object");
        for (const auto& [key, value] : it->items()) {
            if (!value.is_string()) throw ParseError("metadata." + key + ": expected string");
            scenario.metadata[key] = value.get<std::string>();
        }
    }

    try {
        scenario.visibility = VisibilityTensor(static_cast<int>(scenario.nodes.size()), satellites, std::move(per_step));
        scenario.validate();
    } catch (const InvalidSpecError& e) {
        throw ParseError(e.what());
    }
    return scenario;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    detail::write_file(path.string(), scenario_to_json(scenario));
}

Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(detail::read_file(path.string()));
}

std::string scenario_hash(const Scenario& scenario) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : scenario_to_json(scenario)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[k] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace cpd
