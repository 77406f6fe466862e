#include <doctest.h>

#include "oofa/oracle.hpp"

using namespace oofa;

TEST_CASE("brute_force_moment reproduces the closed forms exactly") {
    CHECK(max_abs_diff(brute_force_moment(ModelSpec::make(ModelKind::TE1, BlockStructure::single(3))).values,
                       full_moment_te1(3).values) == 0.0);
    CHECK(max_abs_diff(brute_force_moment(ModelSpec::make(ModelKind::TE2, BlockStructure::single(5))).values,
                       full_moment_te2(5).values) < 1e-12);
}

TEST_CASE("brute_force_moment on blocks (2,2): intercept plus one column per block") {
    const auto M = brute_force_moment(ModelSpec::make(ModelKind::TE1, BlockStructure::from_sizes({2, 2})));
    REQUIRE(M.size() == 3);
    CHECK(M.values(0, 0) == 1.0);
    CHECK(M.values(1, 1) == doctest::Approx(0.5)); // each retained transition fires half the time
    CHECK(M.values(2, 2) == doctest::Approx(0.5));
    CHECK(M.values(1, 2) == doctest::Approx(0.25)); // independent blocks
}

TEST_CASE("enumeration guard refuses oversized spaces") {
    CHECK_THROWS_AS(static_cast<void>(brute_force_moment(ModelSpec::make(ModelKind::TE1, BlockStructure::single(10)))),
                    enumeration_refused);
}

TEST_CASE("verify_closed_forms passes through m=5") {
    for (const auto& r : verify_closed_forms(5)) {
        INFO(r.scenario, ": ", r.counterexample);
        CHECK(r.pass);
        CHECK(r.max_deviation < 1e-12);
    }
}

TEST_CASE("full-design optimality holds for te1 m=4 and te2 m=5") {
    Rng rng(5150);
    const auto r1 = check_full_design_optimality(ModelSpec::make(ModelKind::TE1, BlockStructure::single(4)), 60, rng);
    INFO(r1.counterexample);
    CHECK(r1.pass);
    const auto r2 = check_full_design_optimality(ModelSpec::make(ModelKind::TE2, BlockStructure::single(5)), 30, rng);
    INFO(r2.counterexample);
    CHECK(r2.pass);
}

TEST_CASE("optimality check refuses blocked specs (Table 4 shows >1 there)") {
    Rng rng(1);
    CHECK_THROWS_AS(
        check_full_design_optimality(ModelSpec::make(ModelKind::TE1, BlockStructure::from_sizes({2, 2})), 5, rng),
        invalid_input);
}

TEST_CASE("relabeling leaves both criteria unchanged") {
    Rng rng(31337);
    const auto r1 = check_relabeling_invariance(ModelSpec::make(ModelKind::TE1, BlockStructure::single(4)), 40, rng);
    CHECK(r1.pass);
    CHECK(r1.max_deviation < 1e-10);
    const auto r2 = check_relabeling_invariance(ModelSpec::make(ModelKind::TE2, BlockStructure::single(5)), 15, rng);
    CHECK(r2.pass);
}
