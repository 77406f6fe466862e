#include <doctest.h>

#include "oofa/moment.hpp"
#include "oofa/oracle.hpp"

using namespace oofa;

TEST_CASE("moment_of_design basics") {
    // intercept-only column of length n -> the 1x1 matrix [1]
    Matrix ones(7, 1, 1.0);
    const auto M0 = moment_of_design(ones, {ColumnLabel::intercept()});
    CHECK(M0.size() == 1);
    CHECK(M0.values(0, 0) == 1.0);

    // full PWO matrix for m=3: hand product of the published table columns
    const auto spec = ModelSpec::make(ModelKind::PWO, BlockStructure::single(3));
    const auto M = moment_of_design(enumerate_feasible(spec.blocks()), spec);
    Matrix expect(4, 4);
    const double t = 1.0 / 3.0;
    const double vals[4][4] = {{1, 0, 0, 0}, {0, 1, t, -t}, {0, t, 1, t}, {0, -t, t, 1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) expect(i, j) = vals[i][j];
    CHECK(max_abs_diff(M.values, expect) < 1e-15);
    CHECK(M.values(1, 2) == doctest::Approx(2.0 / 6.0)); // the (x12,x13) entry

    // duplicating every run leaves M unchanged
    auto design = enumerate_feasible(spec.blocks());
    auto doubled = design;
    doubled.insert(doubled.end(), design.begin(), design.end());
    const auto M2 = moment_of_design(doubled, spec);
    CHECK(max_abs_diff(M.values, M2.values) == 0.0);
}

TEST_CASE("full_moment_te1 matches the Theorem-1 entries at m=3") {
    const auto M = full_moment_te1(3);
    REQUIRE(M.size() == 6);
    for (int c = 1; c < 6; ++c) {
        CHECK(M.values(0, c) == doctest::Approx(1.0 / 3.0));
        CHECK(M.values(c, c) == doctest::Approx(1.0 / 3.0)); // (m-1)!/m!
    }
    // V = 1 entries are (m-2)!/m! = 1/6; only one permutation, (3,1,2),
    // contains both the (1,2) and (3,1) transitions
    const int c12 = 1, c31 = 5, c13 = 2;
    CHECK(M.values(c12, c31) == doctest::Approx(1.0 / 6.0));
    CHECK(M.values(c12, c13) == 0.0); // shared source

    CHECK_THROWS_AS(full_moment_te1(2), invalid_input);
}

TEST_CASE("full_moment_te2 matches the Theorem-2 entries at m=5") {
    const auto M = full_moment_te2(5);
    const auto& labels = M.labels;
    REQUIRE(M.size() == 39);
    // intercept against a length-2 column: (m-2)/(m(m-1)) = 3/20
    for (int c = 1; c < M.size(); ++c)
        if (labels[c].length == 2) CHECK(M.values(0, c) == doctest::Approx(3.0 / 20.0));

    // R disjoint entry: [(m-6)(m-5) + 4(m-4)](m-4)!/m! = 4/120 at m=5
    auto col = [&](int j, int k, int len) {
        for (int c = 1; c < M.size(); ++c)
            if (labels[c] == ColumnLabel::transition(j, k, len)) return c;
        FAIL("column not found");
        return -1;
    };
    CHECK(M.values(col(1, 2, 2), col(3, 4, 2)) == doctest::Approx(4.0 / 120.0));

    // symmetry is exact by construction
    CHECK(max_abs_diff(M.values, M.values.transposed()) == 0.0);
    CHECK_THROWS_AS(full_moment_te2(4), invalid_input);
}

TEST_CASE("closed forms equal brute-force enumeration exactly") {
    for (int m : {3, 4, 5, 6})
        CHECK(max_abs_diff(full_moment_te1(m).values,
                           brute_force_moment(ModelSpec::make(ModelKind::TE1, BlockStructure::single(m))).values) <
              1e-12);
    for (int m : {5, 6})
        CHECK(max_abs_diff(full_moment_te2(m).values,
                           brute_force_moment(ModelSpec::make(ModelKind::TE2, BlockStructure::single(m))).values) <
              1e-12);
}

TEST_CASE("blocked TE1 closed form: Corollary 3 with the proof's divisor") {
    // blocks (2,3): 1 + 1 + 5 columns, equals brute force over N = 12
    const auto bs23 = BlockStructure::from_sizes({2, 3});
    const auto M = full_moment_te1_blocked(bs23);
    REQUIRE(M.size() == 7);
    CHECK(max_abs_diff(M.values, brute_force_moment(ModelSpec::make(ModelKind::TE1, bs23)).values) < 1e-12);
    // the statement's /N would make this 1/12; the proof (and the full
    // design) give (m_1-1)!/m_1! = 1/2
    CHECK(M.values(1, 1) == doctest::Approx(0.5));

    // blocks (3,3): within-block diagonal 1/3, cross-block 1/9
    const auto M33 = full_moment_te1_blocked(BlockStructure::from_sizes({3, 3}));
    CHECK(M33.values(1, 1) == doctest::Approx(1.0 / 3.0));
    int other = -1;
    for (int c = 1; c < M33.size(); ++c)
        if (M33.labels[c].j > 3) {
            other = c;
            break;
        }
    REQUIRE(other > 0);
    CHECK(M33.values(1, other) == doctest::Approx(1.0 / 9.0));

    // singleton blocks only -> the 1x1 matrix [1]
    const auto M1 = full_moment_te1_blocked(BlockStructure::from_blocks({{1}, {2}, {3}}));
    CHECK(M1.size() == 1);
    CHECK(M1.values(0, 0) == 1.0);
}

TEST_CASE("blocked TE2 closed form equals brute force") {
    for (const auto& sizes : {std::vector<int>{3, 3}, {5, 3}, {2, 3}, {4, 3}, {1, 5}, {5, 1, 2}}) {
        const auto bs = BlockStructure::from_sizes(sizes);
        CHECK(max_abs_diff(full_moment_te2_blocked(bs).values,
                           brute_force_moment(ModelSpec::make(ModelKind::TE2, bs)).values) < 1e-12);
    }
    // cross-block entry between a length-1 column of a size-5 block and a
    // length-2 column of a size-3 block: (1/5) * (1/6)
    const auto bs = BlockStructure::from_sizes({5, 3});
    const auto M = full_moment_te2_blocked(bs);
    int c1 = -1, c2 = -1;
    for (int c = 1; c < M.size(); ++c) {
        if (c1 < 0 && M.labels[c].length == 1 && M.labels[c].j <= 5) c1 = c;
        if (c2 < 0 && M.labels[c].length == 2 && M.labels[c].j > 5) c2 = c;
    }
    REQUIRE((c1 > 0 && c2 > 0));
    CHECK(M.values(c1, c2) == doctest::Approx((1.0 / 5.0) * (1.0 / 6.0)));
}

TEST_CASE("full-design moment matrices are positive definite where identifiable") {
    // TE1: always identifiable after the drops
    for (int m : {3, 4, 5, 6, 7}) CHECK_FALSE(Cholesky::factor(full_moment_te1(m).values).singular());
    for (const auto& sizes : {std::vector<int>{2, 2}, {3, 3, 3}, {4, 5}, {2, 3, 2}})
        CHECK_FALSE(Cholesky::factor(full_moment_te1_blocked(BlockStructure::from_sizes(sizes)).values).singular());
    // TE2 unconstrained for m >= 5
    for (int m : {5, 6, 7}) CHECK_FALSE(Cholesky::factor(full_moment_te2(m).values).singular());
    // blocked TE2 with every length-2-bearing block of size >= 5
    for (const auto& sizes : {std::vector<int>{5, 5}, {5, 2}})
        CHECK_FALSE(Cholesky::factor(full_moment_te2_blocked(BlockStructure::from_sizes(sizes)).values).singular());
    // blocks of size 3 or 4 leave more columns than their arrangement space
    // can support; the matrix still matches brute force but is singular
    for (const auto& sizes : {std::vector<int>{3, 3}, {4, 4}})
        CHECK(Cholesky::factor(full_moment_te2_blocked(BlockStructure::from_sizes(sizes)).values).singular());
}

TEST_CASE("moment matrices are exactly symmetric with unit corner") {
    for (const auto& M : {full_moment_te1(5), full_moment_te2(6),
                          full_moment_te1_blocked(BlockStructure::from_sizes({3, 4})),
                          full_moment_te2_blocked(BlockStructure::from_sizes({5, 3}))}) {
        CHECK(M.values(0, 0) == 1.0);
        CHECK(max_abs_diff(M.values, M.values.transposed()) == 0.0);
    }
}
