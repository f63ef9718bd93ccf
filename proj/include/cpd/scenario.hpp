#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cpd {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMuKm3PerS2 = 398600.4418;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;
inline constexpr double kSpeedOfLightKmPerS = 299792.458;

enum class NodeKind { Satellite, GroundStation };

// Satellites occupy [0, N_s), ground stations [N_s, N_s + N_g).
struct NodeId {
    int index = 0;
    NodeKind kind = NodeKind::Satellite;

    bool operator==(const NodeId&) const = default;
};

struct TimeGrid {
    int step_count = 90;
    double step_seconds = 60.0;
    std::string epoch = "2000-01-01T12:00:00Z";

    double step_minutes() const { return step_seconds / 60.0; }
    double horizon_minutes() const { return step_count * step_minutes(); }

    void validate() const;
    bool operator==(const TimeGrid&) const = default;
};

// Undirected link between two nodes, stored with a < b.
struct Edge {
    int a = 0;
    int b = 0;

    auto operator<=>(const Edge&) const = default;
};

// Canonical edge for an unordered pair. Throws InvalidSpecError on i == j.
Edge make_edge(int i, int j);

// Per-step symmetric 0/1 matrices, stored as sorted edge lists plus a dense lookup.
class VisibilityTensor {
public:
    VisibilityTensor() = default;

    // `satellite_count` is needed to reject ground-to-ground entries.
    VisibilityTensor(int node_count, int satellite_count, std::vector<std::vector<Edge>> per_step);

    int node_count() const { return node_count_; }
    int step_count() const { return static_cast<int>(edges_.size()); }

    bool visible(int t, int i, int j) const {
        return dense_[(static_cast<std::size_t>(t) * node_count_ + i) * node_count_ + j] != 0;
    }
    std::span<const Edge> edges(int t) const { return edges_[t]; }
    std::size_t total_edges() const;

    // Dense V_t, row-major node_count x node_count.
    std::vector<std::uint8_t> dense_step(int t) const;

    bool operator==(const VisibilityTensor& other) const { return edges_ == other.edges_ && node_count_ == other.node_count_; }

private:
    int node_count_ = 0;
    std::vector<std::vector<Edge>> edges_;
    std::vector<std::uint8_t> dense_;
};

struct Budgets {
    int isl = 0;  // M_s, horizon total of satellite-to-satellite link-slots per satellite
    int gsl = 0;  // M_g, horizon total of satellite-to-ground link-slots per satellite

    bool operator==(const Budgets&) const = default;
};

struct Scenario {
    std::vector<NodeId> nodes;
    TimeGrid grid;
    VisibilityTensor visibility;
    std::vector<std::vector<int>> requirements;  // C_i for every satellite i, sorted
    Budgets budgets;
    int per_step_degree_cap = 1;
    double mean_link_distance_km = 0.0;  // average over all visible link samples; 0 when unknown
    std::map<std::string, std::string> metadata;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int satellite_count() const;
    int station_count() const { return node_count() - satellite_count(); }
    int step_count() const { return grid.step_count; }
    bool is_satellite(int node) const { return nodes[node].kind == NodeKind::Satellite; }

    // Checks every structural invariant; throws InvalidSpecError.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

struct OrbitSpec {
    double altitude_km = 550.0;
    double inclination_deg = 97.6;
    int plane_count = 5;
    int sats_per_plane = 6;
    int phasing = 1;  // Walker-delta F

    int satellite_count() const { return plane_count * sats_per_plane; }
    void validate() const;
};

struct GroundStation {
    std::string name;
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
};

// positions[t][node], Earth-centred inertial, km. Satellites first, then stations.
struct PositionTable {
    int satellite_count = 0;
    std::vector<std::vector<Vec3>> positions;

    int node_count() const { return positions.empty() ? 0 : static_cast<int>(positions.front().size()); }
    int step_count() const { return static_cast<int>(positions.size()); }
};

double orbital_period_seconds(double altitude_km);

// Circular two-body Walker-delta propagation plus stations on a rotating spherical Earth.
PositionTable propagate(const OrbitSpec& spec, std::span<const GroundStation> stations, const TimeGrid& grid);

// True when the segment p-q does not dip below the Earth's surface.
bool line_of_sight(const Vec3& p, const Vec3& q, double body_radius_km = kEarthRadiusKm);

// Elevation of `target` above the local horizon of a station at `station`, degrees.
double elevation_deg(const Vec3& station, const Vec3& target);

struct VisibilityResult {
    VisibilityTensor tensor;
    double mean_link_distance_km = 0.0;
};

VisibilityResult build_visibility(const PositionTable& positions, double isl_max_range_km, double min_elevation_deg);

struct RequirementPolicy {
    enum class Kind { AllPairs, RandomK, Explicit };

    Kind kind = Kind::RandomK;
    int k = 3;
    std::vector<std::vector<int>> explicit_sets;  // one set per satellite when kind == Explicit
};

struct ScenarioConfig {
    OrbitSpec orbit;
    std::vector<GroundStation> stations;
    TimeGrid grid;
    double isl_max_range_km = 5000.0;
    double min_elevation_deg = 10.0;
    RequirementPolicy requirements;
    Budgets budgets{12, 4};
    int per_step_degree_cap = 1;
    std::uint64_t seed = 1;
};

// First `count` entries of a built-in station roster; extra stations are placed pseudo-randomly from `seed`.
std::vector<GroundStation> default_ground_stations(int count, std::uint64_t seed);

// Plane count used when only a satellite total is given: largest divisor not above sqrt(n).
int default_plane_count(int satellite_count);

Scenario generate_scenario(const ScenarioConfig& config);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(std::string_view text);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

// FNV-1a 64 over the canonical JSON serialisation, hex encoded.
std::string scenario_hash(const Scenario& scenario);

}  // namespace cpd
