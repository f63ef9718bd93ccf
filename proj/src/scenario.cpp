#include "cpd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cpd/build_info.hpp"
#include "cpd/error.hpp"

namespace cpd {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void TimeGrid::validate() const {
    if (step_count < 1) throw InvalidSpecError("time grid: step_count must be >= 1");
    if (!(step_seconds > 0.0)) throw InvalidSpecError("time grid: step_seconds must be > 0");
}

Edge make_edge(int i, int j) {
    if (i == j) throw InvalidSpecError("edge endpoints must differ (node " + std::to_string(i) + ")");
    return i < j ? Edge{i, j} : Edge{j, i};
}

VisibilityTensor::VisibilityTensor(int node_count, int satellite_count, std::vector<std::vector<Edge>> per_step)
    : node_count_(node_count), edges_(std::move(per_step)) {
    if (node_count < 0 || satellite_count < 0 || satellite_count > node_count)
        throw InvalidSpecError("visibility: inconsistent node counts");
    const auto n = static_cast<std::size_t>(node_count);
    dense_.assign(edges_.size() * n * n, 0);
    for (std::size_t t = 0; t < edges_.size(); ++t) {
        auto& list = edges_[t];
        std::sort(list.begin(), list.end());
        if (std::adjacent_find(list.begin(), list.end()) != list.end())
            throw InvalidSpecError("visibility: duplicate edge at step " + std::to_string(t));
        for (const Edge& e : list) {
            if (e.a < 0 || e.b >= node_count || e.a >= e.b)
                throw InvalidSpecError("visibility: invalid edge [" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                       "] at step " + std::to_string(t));
            if (e.a >= satellite_count)
                throw InvalidSpecError("visibility: ground-to-ground edge at step " + std::to_string(t));
            dense_[(t * n + e.a) * n + e.b] = 1;
            dense_[(t * n + e.b) * n + e.a] = 1;
        }
    }
}

std::size_t VisibilityTensor::total_edges() const {
    std::size_t total = 0;
    for (const auto& list : edges_) total += list.size();
    return total;
}

std::vector<std::uint8_t> VisibilityTensor::dense_step(int t) const {
    const auto n = static_cast<std::size_t>(node_count_);
    auto first = dense_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(t) * n * n);
    return {first, first + static_cast<std::ptrdiff_t>(n * n)};
}

int Scenario::satellite_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                          [](const NodeId& id) { return id.kind == NodeKind::Satellite; }));
}

void Scenario::validate() const {
    grid.validate();
    const int n = node_count();
    const int ns = satellite_count();
    for (int i = 0; i < n; ++i) {
        if (nodes[i].index != i) throw InvalidSpecError("scenario: node roster index mismatch at " + std::to_string(i));
        const bool expect_sat = i < ns;
        if ((nodes[i].kind == NodeKind::Satellite) != expect_sat)
            throw InvalidSpecError("scenario: satellites must precede ground stations");
    }
    if (visibility.node_count() != n || visibility.step_count() != grid.step_count)
        throw InvalidSpecError("scenario: visibility dimensions do not match roster and grid");
    if (static_cast<int>(requirements.size()) != ns)
        throw InvalidSpecError("scenario: expected one requirement set per satellite");
    for (int i = 0; i < ns; ++i) {
        for (int j : requirements[i]) {
            if (j < 0 || j >= n)
                throw InvalidSpecError("scenario: requirement of satellite " + std::to_string(i) + " references unknown node " +
                                       std::to_string(j));
            if (j == i) throw InvalidSpecError("scenario: requirement set of satellite " + std::to_string(i) + " contains itself");
        }
        if (!std::is_sorted(requirements[i].begin(), requirements[i].end()) ||
            std::adjacent_find(requirements[i].begin(), requirements[i].end()) != requirements[i].end())
            throw InvalidSpecError("scenario: requirement set of satellite " + std::to_string(i) + " must be sorted and unique");
    }
    if (budgets.isl < 0 || budgets.gsl < 0) throw InvalidSpecError("scenario: budgets must be non-negative");
    if (per_step_degree_cap < 0) throw InvalidSpecError("scenario: per_step_degree_cap must be non-negative");
}

void OrbitSpec::validate() const {
    if (!(altitude_km > 0.0)) throw InvalidSpecError("orbit: altitude must be > 0 km");
    if (plane_count < 1 || sats_per_plane < 1) throw InvalidSpecError("orbit: plane_count and sats_per_plane must be >= 1");
    if (phasing < 0 || phasing >= plane_count)
        throw InvalidSpecError("orbit: Walker phasing must lie in [0, plane_count)");
}

double Vec3::norm() const { return std::sqrt(dot(*this)); }

double orbital_period_seconds(double altitude_km) {
    if (!(altitude_km > 0.0)) throw InvalidSpecError("orbit: altitude must be > 0 km");
    const double a = kEarthRadiusKm + altitude_km;
    return 2.0 * std::numbers::pi * std::sqrt(a * a * a / kEarthMuKm3PerS2);
}

PositionTable propagate(const OrbitSpec& spec, std::span<const GroundStation> stations, const TimeGrid& grid) {
    spec.validate();
    grid.validate();

    const double radius = kEarthRadiusKm + spec.altitude_km;
    const double mean_motion = std::sqrt(kEarthMuKm3PerS2 / (radius * radius * radius));
    const double inc = spec.inclination_deg * kDegToRad;
    const int planes = spec.plane_count;
    const int per_plane = spec.sats_per_plane;
    const int total_sats = spec.satellite_count();

    PositionTable table;
    table.satellite_count = total_sats;
    table.positions.assign(grid.step_count, std::vector<Vec3>(total_sats + stations.size()));

    for (int t = 0; t < grid.step_count; ++t) {
        const double seconds = t * grid.step_seconds;
        auto& row = table.positions[t];
        for (int p = 0; p < planes; ++p) {
            const double raan = 2.0 * std::numbers::pi * p / planes;
            for (int s = 0; s < per_plane; ++s) {
                const double phase0 = 2.0 * std::numbers::pi * s / per_plane +
                                      2.0 * std::numbers::pi * spec.phasing * p / (planes * per_plane);
                const double u = phase0 + mean_motion * seconds;
                const double cu = std::cos(u), su = std::sin(u);
                const double co = std::cos(raan), so = std::sin(raan);
                row[p * per_plane + s] = Vec3{radius * (co * cu - so * su * std::cos(inc)),
                                              radius * (so * cu + co * su * std::cos(inc)),
                                              radius * (su * std::sin(inc))};
            }
        }
        for (std::size_t g = 0; g < stations.size(); ++g) {
            const double lat = stations[g].latitude_deg * kDegToRad;
            const double lon = stations[g].longitude_deg * kDegToRad + kEarthRotationRadPerS * seconds;
            row[total_sats + g] = Vec3{kEarthRadiusKm * std::cos(lat) * std::cos(lon),
                                       kEarthRadiusKm * std::cos(lat) * std::sin(lon), kEarthRadiusKm * std::sin(lat)};
        }
    }
    return table;
}

bool line_of_sight(const Vec3& p, const Vec3& q, double body_radius_km) {
    const Vec3 d = q - p;
    const double len2 = d.dot(d);
    double s = len2 > 0.0 ? -p.dot(d) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    const Vec3 closest = p + d * s;
    return closest.norm() >= body_radius_km;
}

double elevation_deg(const Vec3& station, const Vec3& target) {
    const Vec3 look = target - station;
    const double range = look.norm();
    const double up = station.norm();
    if (range == 0.0 || up == 0.0) return 90.0;
    const double sin_el = std::clamp(look.dot(station) / (range * up), -1.0, 1.0);
    return std::asin(sin_el) / kDegToRad;
}

VisibilityResult build_visibility(const PositionTable& positions, double isl_max_range_km, double min_elevation_deg) {
    const int n = positions.node_count();
    const int ns = positions.satellite_count;
    std::vector<std::vector<Edge>> per_step(positions.step_count());
    double distance_sum = 0.0;
    std::size_t samples = 0;

    for (int t = 0; t < positions.step_count(); ++t) {
        const auto& row = positions.positions[t];
        auto& list = per_step[t];
        for (int i = 0; i < ns; ++i) {
            for (int j = i + 1; j < n; ++j) {
                bool linked = false;
                if (j < ns) {
                    const double dist = (row[i] - row[j]).norm();
                    linked = dist <= isl_max_range_km && line_of_sight(row[i], row[j]);
                } else {
                    linked = elevation_deg(row[j], row[i]) >= min_elevation_deg;
                }
                if (linked) {
                    list.push_back(Edge{i, j});
                    distance_sum += (row[i] - row[j]).norm();
                    ++samples;
                }
            }
        }
    }
    VisibilityResult result{VisibilityTensor(n, ns, std::move(per_step)), 0.0};
    result.mean_link_distance_km = samples ? distance_sum / static_cast<double>(samples) : 0.0;
    return result;
}

std::vector<GroundStation> default_ground_stations(int count, std::uint64_t seed) {
    static const std::vector<GroundStation> roster = {
        {"svalbard", 78.23, 15.39},     {"kiruna", 67.86, 20.96},       {"fairbanks", 64.86, -147.85},
        {"inuvik", 68.32, -133.53},     {"wallops", 37.94, -75.46},     {"madrid", 40.43, -4.25},
        {"hawaii", 19.82, -155.47},     {"santiago", -33.15, -70.67},   {"hartebeesthoek", -25.89, 27.69},
        {"canberra", -35.40, 148.98},   {"singapore", 1.35, 103.82},    {"bangalore", 12.97, 77.59},
        {"tokyo", 35.68, 139.69},       {"punta_arenas", -53.16, -70.91}, {"troll", -72.01, 2.53},
        {"mcmurdo", -77.85, 166.67},    {"azores", 37.74, -25.67},      {"dubai", 25.20, 55.27},
        {"perth", -31.95, 115.86},      {"barcelona", 41.39, 2.11},
    };
    if (count < 0) throw InvalidSpecError("station count must be non-negative");
    std::vector<GroundStation> out;
    for (int g = 0; g < count && g < static_cast<int>(roster.size()); ++g) out.push_back(roster[g]);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> z(-1.0, 1.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    for (int g = static_cast<int>(out.size()); g < count; ++g) {
        const double lat = std::asin(z(rng)) / kDegToRad;
        out.push_back({"station_" + std::to_string(g), lat, lon(rng)});
    }
    return out;
}

int default_plane_count(int satellite_count) {
    if (satellite_count < 1) throw InvalidSpecError("satellite count must be >= 1");
    int best = 1;
    for (int p = 1; p * p <= satellite_count; ++p)
        if (satellite_count % p == 0) best = p;
    return best;
}

Scenario generate_scenario(const ScenarioConfig& config) {
    config.orbit.validate();
    config.grid.validate();
    if (config.budgets.isl < 0 || config.budgets.gsl < 0) throw InvalidSpecError("budgets must be non-negative");
    if (config.per_step_degree_cap < 0) throw InvalidSpecError("per_step_degree_cap must be non-negative");

    const int ns = config.orbit.satellite_count();
    const int n = ns + static_cast<int>(config.stations.size());

    Scenario scenario;
    scenario.grid = config.grid;
    for (int i = 0; i < n; ++i) scenario.nodes.push_back({i, i < ns ? NodeKind::Satellite : NodeKind::GroundStation});

    const PositionTable positions = propagate(config.orbit, config.stations, config.grid);
    VisibilityResult vis = build_visibility(positions, config.isl_max_range_km, config.min_elevation_deg);
    scenario.visibility = std::move(vis.tensor);
    scenario.mean_link_distance_km = vis.mean_link_distance_km;

    std::mt19937_64 rng(config.seed);
    scenario.requirements.assign(ns, {});
    const auto& policy = config.requirements;
    switch (policy.kind) {
        case RequirementPolicy::Kind::AllPairs:
            for (int i = 0; i < ns; ++i)
                for (int j = 0; j < n; ++j)
                    if (j != i) scenario.requirements[i].push_back(j);
            break;
        case RequirementPolicy::Kind::RandomK: {
            if (policy.k < 0 || policy.k > n - 1)
                throw InvalidSpecError("random-k requirement policy: k must lie in [0, " + std::to_string(n - 1) + "]");
            for (int i = 0; i < ns; ++i) {
                std::vector<int> others;
                for (int j = 0; j < n; ++j)
                    if (j != i) others.push_back(j);
                std::shuffle(others.begin(), others.end(), rng);
                others.resize(policy.k);
                std::sort(others.begin(), others.end());
                scenario.requirements[i] = std::move(others);
            }
            break;
        }
        case RequirementPolicy::Kind::Explicit: {
            if (static_cast<int>(policy.explicit_sets.size()) != ns)
                throw InvalidSpecError("explicit requirement policy: expected " + std::to_string(ns) + " sets, got " +
                                       std::to_string(policy.explicit_sets.size()));
            for (int i = 0; i < ns; ++i) {
                auto set = policy.explicit_sets[i];
                for (int j : set)
                    if (j < 0 || j >= n || j == i)
                        throw InvalidSpecError("explicit requirement policy: satellite " + std::to_string(i) +
                                               " references unknown node " + std::to_string(j));
                std::sort(set.begin(), set.end());
                set.erase(std::unique(set.begin(), set.end()), set.end());
                scenario.requirements[i] = std::move(set);
            }
            break;
        }
    }

    scenario.budgets = config.budgets;
    scenario.per_step_degree_cap = config.per_step_degree_cap;

    auto& meta = scenario.metadata;
    meta["generator"] = "cpd scenario generate";
    meta["git_describe"] = std::string(git_describe());
    meta["seed"] = std::to_string(config.seed);
    meta["altitude_km"] = format_double(config.orbit.altitude_km);
    meta["inclination_deg"] = format_double(config.orbit.inclination_deg);
    meta["plane_count"] = std::to_string(config.orbit.plane_count);
    meta["sats_per_plane"] = std::to_string(config.orbit.sats_per_plane);
    meta["phasing"] = std::to_string(config.orbit.phasing);
    meta["isl_max_range_km"] = format_double(config.isl_max_range_km);
    meta["min_elevation_deg"] = format_double(config.min_elevation_deg);
    meta["requirement_policy"] = policy.kind == RequirementPolicy::Kind::AllPairs  ? "all-pairs"
                                 : policy.kind == RequirementPolicy::Kind::RandomK ? "random-k"
                                                                                   : "explicit";
    if (policy.kind == RequirementPolicy::Kind::RandomK) meta["requirement_k"] = std::to_string(policy.k);
    std::string names;
    for (const auto& s : config.stations) names += (names.empty() ? "" : ",") + s.name;
    meta["stations"] = names;

    scenario.validate();
    return scenario;
}

}  // namespace cpd
