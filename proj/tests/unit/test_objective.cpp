#include <catch_amalgamated.hpp>

#include <random>

#include "cpd/error.hpp"
#include "cpd/objective.hpp"
#include "support.hpp"

using namespace cpd;
using Catch::Approx;

TEST_CASE("no requirements cost nothing", "[objective]") {
    const Scenario s = testing::make_scenario(3, 1, std::vector<std::vector<Edge>>(5, {{0, 1}}));
    const ObjectiveValue v = evaluate_exact(ContactPlan(4, 5), s);
    CHECK(v.raw_minutes == 0.0);
    CHECK(v.normalized == 0.0);
    CHECK(*v.triple_count == 0);
}

TEST_CASE("empty plan pays the unreachable penalty everywhere", "[objective]") {
    const Scenario s = testing::make_scenario(2, 0, std::vector<std::vector<Edge>>(10, {{0, 1}}), {{1}, {}});
    // d(0,1,t) = (N_t - 1 - t) + N_t steps of one minute
    double expected = 0.0;
    for (int t = 0; t < 10; ++t) expected += (10 - 1 - t) + 10;
    REQUIRE(expected == 145.0);
    const ObjectiveValue v = evaluate_exact(ContactPlan(2, 10), s);
    CHECK(v.raw_minutes == expected);
    CHECK(*v.triple_count == 10);
    CHECK(*v.unreachable_count == 10);
    CHECK(v.normalized == Approx(145.0 / (10 * 10.0)));
    CHECK(unreachable_penalty_steps(10, 0) == 19);
    CHECK(unreachable_penalty_steps(10, 9) == 10);
}

TEST_CASE("exact objective equals the reference sum", "[objective]") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const Scenario s = testing::random_scenario(rng);
        const ContactPlan p = initial_plan(s, rng());
        const double expected = testing::reference_objective_minutes(p, s);
        const ObjectiveValue v = evaluate_exact(p, s);
        REQUIRE(v.raw_minutes == expected);
        REQUIRE(evaluate_oracle(p, s).raw_minutes == expected);
        const long long triples = *v.triple_count;
        if (triples > 0) REQUIRE(v.normalized == Approx(expected / (triples * s.grid.horizon_minutes())));
        if (*v.unreachable_count == 0) REQUIRE((v.normalized >= 0.0 && v.normalized <= 1.0));

        ExactOptions parallel;
        parallel.workers = 3;
        const ObjectiveValue w = evaluate_exact(p, s, parallel);
        REQUIRE(w.raw_minutes == v.raw_minutes);
        REQUIRE(w.normalized == v.normalized);

        ExactOptions strided;
        strided.sample_stride = 3;
        REQUIRE(evaluate_exact(p, s, strided).raw_minutes == testing::reference_objective_minutes(p, s, 3));
    }
}

TEST_CASE("extra feasible contacts never raise the objective", "[objective]") {
    std::mt19937_64 rng(55);
    int checked = 0;
    while (checked < 100) {
        const Scenario s = testing::random_scenario(rng);
        ContactPlan p = initial_plan(s, rng());
        const double before = evaluate_exact(p, s).raw_minutes;
        const int t = std::uniform_int_distribution<int>(0, s.step_count() - 1)(rng);
        const auto vis = s.visibility.edges(t);
        if (vis.empty()) continue;
        const Edge e = vis[std::uniform_int_distribution<std::size_t>(0, vis.size() - 1)(rng)];
        if (!p.activate(t, e) || !check_feasible(p, s).feasible()) continue;
        REQUIRE(evaluate_exact(p, s).raw_minutes <= before);
        ++checked;
    }
}

TEST_CASE("evaluation errors", "[objective]") {
    const Scenario s = testing::make_scenario(3, 0, {{{0, 1}}, {}}, {{1}, {}, {}});
    ContactPlan bad(3, 2);
    bad.activate(0, {0, 2});
    CHECK_THROWS_AS(evaluate_exact(bad, s), InfeasiblePlanError);
    CHECK_THROWS_AS(evaluate_oracle(bad, s), InfeasiblePlanError);
    ExactOptions zero;
    zero.sample_stride = 0;
    CHECK_THROWS_AS(evaluate_exact(ContactPlan(3, 2), s, zero), InvalidSpecError);
    CHECK_THROWS_AS(evaluate_exact(ContactPlan(4, 2), s), DimensionError);
}

TEST_CASE("evaluator wrappers", "[objective]") {
    const Scenario s = testing::make_scenario(2, 0, {{{0, 1}}, {{0, 1}}}, {{1}, {0}});
    ContactPlan p(2, 2);
    p.activate(0, {0, 1});
    ExactEvaluator exact(s);
    OracleEvaluator oracle(s);
    CHECK(exact.kind() == EvaluatorKind::ExactCgr);
    CHECK(oracle.kind() == EvaluatorKind::Oracle);
    CHECK(to_string(EvaluatorKind::ExactCgr) == "cgr");
    CHECK(to_string(EvaluatorKind::Surrogate) == "surrogate");
    CHECK(exact.evaluate(p).raw_minutes == oracle.evaluate(p).raw_minutes);
    // t=0: both directions deliver at step 1; t=1: nothing left, penalty (2-1-1)+2 = 2 steps each
    CHECK(exact.evaluate(p).raw_minutes == 1 + 1 + 2 + 2);
}
