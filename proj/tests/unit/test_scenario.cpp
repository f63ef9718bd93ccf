#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>

#include <json.hpp>

#include "cpd/error.hpp"
#include "cpd/scenario.hpp"
#include "support.hpp"

using namespace cpd;
using Catch::Approx;

namespace {

ScenarioConfig small_config(std::uint64_t seed = 7) {
    ScenarioConfig c;
    c.orbit = {550.0, 53.0, 3, 4, 1};
    c.stations = default_ground_stations(5, seed);
    c.grid.step_count = 30;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("circular orbit keeps radius R_E + h", "[scenario]") {
    OrbitSpec spec{550.0, 97.6, 1, 1, 0};
    TimeGrid grid;
    grid.step_count = 20;
    const PositionTable table = propagate(spec, {}, grid);
    for (const auto& step : table.positions) REQUIRE(step[0].norm() == Approx(6921.0).epsilon(1e-12));
}

TEST_CASE("orbital period from Kepler's third law", "[scenario]") {
    const double a = kEarthRadiusKm + 550.0;
    const double expected = 2.0 * std::numbers::pi * std::sqrt(a * a * a / 398600.4418);
    CHECK(orbital_period_seconds(550.0) == Approx(expected).epsilon(1e-12));
    CHECK(orbital_period_seconds(550.0) == Approx(5730.127089).margin(1e-5));
}

TEST_CASE("satellites half a plane apart are antipodal", "[scenario]") {
    OrbitSpec spec{550.0, 53.0, 1, 2, 0};
    TimeGrid grid;
    grid.step_count = 1;
    const auto pos = propagate(spec, {}, grid).positions[0];
    const Vec3 sum = pos[0] + pos[1];
    CHECK(sum.norm() == Approx(0.0).margin(1e-6));
}

TEST_CASE("orbit and grid validation", "[scenario]") {
    CHECK_THROWS_AS((OrbitSpec{0.0, 53.0, 1, 1, 0}.validate()), InvalidSpecError);
    CHECK_THROWS_AS((OrbitSpec{550.0, 53.0, 3, 2, 3}.validate()), InvalidSpecError);
    CHECK_NOTHROW((OrbitSpec{550.0, 53.0, 3, 2, 2}.validate()));
    TimeGrid g;
    g.step_count = 0;
    CHECK_THROWS_AS(g.validate(), InvalidSpecError);
}

TEST_CASE("line of sight and elevation", "[scenario]") {
    const double r = kEarthRadiusKm + 550.0;
    CHECK(line_of_sight({r, 0, 0}, {r, 10, 0}));
    CHECK_FALSE(line_of_sight({r, 0, 0}, {-r, 0, 0}));
    const Vec3 station{kEarthRadiusKm, 0, 0};
    CHECK(elevation_deg(station, {r, 0, 0}) == Approx(90.0));
    CHECK(elevation_deg(station, {kEarthRadiusKm, 1000, 0}) == Approx(0.0).margin(1e-9));
    CHECK(elevation_deg(station, {0, r, 0}) < 0.0);
}

TEST_CASE("visibility from hand-placed positions", "[scenario]") {
    const double r = kEarthRadiusKm + 550.0;
    PositionTable table;
    table.satellite_count = 3;
    // sat 0 and 1 10 km apart, sat 2 antipodal, station under sat 0
    table.positions = {{{r, 0, 0}, {r, 10, 0}, {-r, 0, 0}, {kEarthRadiusKm, 0, 0}}};
    const VisibilityResult v = build_visibility(table, 1000.0, 10.0);
    CHECK(v.tensor.visible(0, 0, 1));
    CHECK(v.tensor.visible(0, 1, 0));
    CHECK_FALSE(v.tensor.visible(0, 0, 2));
    CHECK(v.tensor.visible(0, 0, 3));
    CHECK_FALSE(v.tensor.visible(0, 2, 3));
}

TEST_CASE("generated tensors are symmetric, hollow and physical", "[scenario]") {
    const ScenarioConfig config = small_config();
    const Scenario s = generate_scenario(config);
    const PositionTable table = propagate(config.orbit, config.stations, config.grid);
    const int ns = s.satellite_count();
    for (int t = 0; t < s.step_count(); ++t) {
        const auto& pos = table.positions[t];
        for (int i = 0; i < s.node_count(); ++i) {
            CHECK_FALSE(s.visibility.visible(t, i, i));
            for (int j = i + 1; j < s.node_count(); ++j) {
                REQUIRE(s.visibility.visible(t, i, j) == s.visibility.visible(t, j, i));
                bool expect = false;
                if (i < ns && j < ns)
                    expect = (pos[i] - pos[j]).norm() <= config.isl_max_range_km && line_of_sight(pos[i], pos[j]);
                else if (i < ns)
                    expect = elevation_deg(pos[j], pos[i]) >= config.min_elevation_deg;
                REQUIRE(s.visibility.visible(t, i, j) == expect);
            }
        }
    }
}

TEST_CASE("coarse grid is the even-step subsample of the fine grid", "[scenario]") {
    ScenarioConfig coarse = small_config();
    ScenarioConfig fine = coarse;
    fine.grid.step_seconds = coarse.grid.step_seconds / 2;
    fine.grid.step_count = coarse.grid.step_count * 2;
    const Scenario a = generate_scenario(coarse);
    const Scenario b = generate_scenario(fine);
    for (int t = 0; t < a.step_count(); ++t) {
        const auto ea = a.visibility.edges(t);
        const auto eb = b.visibility.edges(2 * t);
        REQUIRE(std::vector<Edge>(ea.begin(), ea.end()) == std::vector<Edge>(eb.begin(), eb.end()));
    }
}

TEST_CASE("requirement policies", "[scenario]") {
    ScenarioConfig c;
    c.stations = default_ground_stations(20, 1);
    c.grid.step_count = 2;
    c.requirements.kind = RequirementPolicy::Kind::AllPairs;
    const Scenario all = generate_scenario(c);
    std::size_t total = 0;
    for (const auto& ci : all.requirements) total += ci.size();
    CHECK(all.satellite_count() == 30);
    CHECK(all.station_count() == 20);
    CHECK(total == 1470);

    c.requirements = {RequirementPolicy::Kind::RandomK, 0, {}};
    const Scenario none = generate_scenario(c);
    for (const auto& ci : none.requirements) CHECK(ci.empty());

    c.requirements = {RequirementPolicy::Kind::RandomK, 3, {}};
    const Scenario k3 = generate_scenario(c);
    for (int i = 0; i < k3.satellite_count(); ++i) {
        CHECK(k3.requirements[i].size() == 3);
        CHECK(std::find(k3.requirements[i].begin(), k3.requirements[i].end(), i) == k3.requirements[i].end());
    }

    c.requirements = {RequirementPolicy::Kind::Explicit, 0, std::vector<std::vector<int>>(30, std::vector<int>{60})};
    CHECK_THROWS_AS(generate_scenario(c), InvalidSpecError);
    c.requirements.explicit_sets.assign(30, {});
    c.requirements.explicit_sets[4] = {4};
    CHECK_THROWS_AS(generate_scenario(c), InvalidSpecError);
}

TEST_CASE("generation is deterministic per seed", "[scenario]") {
    const Scenario a = generate_scenario(small_config(11));
    const Scenario b = generate_scenario(small_config(11));
    CHECK(scenario_to_json(a) == scenario_to_json(b));
    CHECK(scenario_hash(a) == scenario_hash(b));
    CHECK(scenario_hash(a) != scenario_hash(generate_scenario(small_config(12))));
}

TEST_CASE("scenario file round trip", "[scenario]") {
    const Scenario s = generate_scenario(small_config());
    const auto path = std::filesystem::temp_directory_path() / "cpd_scenario_roundtrip.json";
    save_scenario(s, path);
    const Scenario back = load_scenario(path);
    std::filesystem::remove(path);
    CHECK(back == s);
    CHECK(scenario_to_json(back) == scenario_to_json(s));
}

TEST_CASE("malformed scenario files name the problem", "[scenario]") {
    const std::string good = scenario_to_json(testing::make_scenario(2, 1, {{{0, 1}, {0, 2}}}, {{1}, {2}}));
    auto message_of = [](const std::string& text) {
        try {
            scenario_from_json(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK_THAT(message_of("{\"version\": 1,\n \"nodes\": [}"), Catch::Matchers::ContainsSubstring("2:"));

    auto doc = nlohmann::json::parse(good);
    doc.erase("grid");
    CHECK_THAT(message_of(doc.dump()), Catch::Matchers::ContainsSubstring("grid"));

    doc = nlohmann::json::parse(good);
    doc["grid"]["step_count"] = "ninety";
    CHECK_THAT(message_of(doc.dump()), Catch::Matchers::ContainsSubstring("step_count"));

    doc = nlohmann::json::parse(good);
    doc["version"] = 2;
    CHECK_THAT(message_of(doc.dump()), Catch::Matchers::ContainsSubstring("version"));

    doc = nlohmann::json::parse(good);
    doc["visibility"][0].push_back({1, 1});
    CHECK_THROWS_AS(scenario_from_json(doc.dump()), ParseError);

    CHECK_THROWS_AS(load_scenario("/nonexistent/cpd.json"), ParseError);
}

TEST_CASE("tensor rejects ground-to-ground and out-of-range entries", "[scenario]") {
    CHECK_THROWS_AS(VisibilityTensor(3, 1, {{{1, 2}}}), InvalidSpecError);
    CHECK_THROWS_AS(VisibilityTensor(3, 1, {{{0, 3}}}), InvalidSpecError);
    CHECK_THROWS_AS(make_edge(2, 2), InvalidSpecError);
    CHECK(make_edge(5, 2) == Edge{2, 5});
}
