#include <doctest.h>

#include <map>
#include <set>

#include "oofa/permspace.hpp"

using namespace oofa;

TEST_CASE("is_feasible honors the fixed block order") {
    const auto bs = BlockStructure::from_blocks({{1, 2, 3, 4}, {5, 6, 7}, {8, 9, 10}});
    CHECK(is_feasible(Permutation{{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}, bs));
    CHECK_FALSE(is_feasible(Permutation{{5, 1, 2, 3, 4, 6, 7, 8, 9, 10}}, bs));

    const auto unconstrained = BlockStructure::single(4);
    CHECK(is_feasible(Permutation{{4, 2, 1, 3}}, unconstrained)); // unconstrained: everything feasible
    CHECK_THROWS_AS(is_feasible(Permutation{{1, 2, 3}}, bs), invalid_input);
}

TEST_CASE("feasible_count is the exact product of factorials") {
    CHECK(feasible_count(BlockStructure::from_sizes({5, 3, 3})) == 4320);
    CHECK(feasible_count(BlockStructure::from_sizes({4, 5})) == 2880);
    CHECK(50.0 / 2880.0 == doctest::Approx(0.0174).epsilon(1e-2));
    CHECK(feasible_count(BlockStructure::single(9)) == 362880);
    CHECK(400.0 / 362880.0 == doctest::Approx(0.0011).epsilon(1e-1));
    CHECK(feasible_count(BlockStructure::from_sizes({12, 12})) == 479001600ull * 479001600ull);
    CHECK_THROWS_AS(feasible_count(BlockStructure::single(21)), overflow_error);
}

TEST_CASE("random_feasible is uniform, block-respecting and deterministic") {
    // unconstrained m=3: each of the 6 orders near 1/6
    Rng rng(12345);
    const auto c1 = BlockStructure::single(3);
    std::map<std::vector<int>, int> freq;
    const int draws = 6000;
    for (int i = 0; i < draws; ++i) ++freq[random_feasible(c1, rng).order];
    REQUIRE(freq.size() == 6);
    for (const auto& [order, count] : freq)
        CHECK(std::abs(count / static_cast<double>(draws) - 1.0 / 6.0) < 0.02);

    // blocks ({1,2},{3}): only two orders ever produced
    const auto bs = BlockStructure::from_blocks({{1, 2}, {3}});
    std::set<std::vector<int>> seen;
    for (int i = 0; i < 50; ++i) seen.insert(random_feasible(bs, rng).order);
    CHECK(seen == std::set<std::vector<int>>{{1, 2, 3}, {2, 1, 3}});

    // fixed seed reproduces the draw
    Rng a(99), b(99);
    CHECK(random_feasible(c1, a) == random_feasible(c1, b));
}

TEST_CASE("random_feasible always lands in the feasible set") {
    Rng rng(4);
    for (const auto& bs : {BlockStructure::single(6), BlockStructure::from_sizes({2, 3}),
                           BlockStructure::from_blocks({{2, 5}, {1, 3, 4}})}) {
        for (int i = 0; i < 200; ++i) CHECK(is_feasible(random_feasible(bs, rng), bs));
    }
}

TEST_CASE("adjacent_swap exchanges, refuses across blocks, involutes") {
    const auto c1 = BlockStructure::single(4);
    const auto swapped = adjacent_swap(Permutation{{1, 3, 2, 4}}, 1, c1);
    REQUIRE(swapped.has_value());
    CHECK(swapped->order == std::vector<int>{3, 1, 2, 4});

    const auto bs = BlockStructure::from_blocks({{1, 2}, {3}});
    CHECK_FALSE(adjacent_swap(Permutation{{1, 2, 3}}, 2, bs).has_value()); // crosses the boundary
    const auto inner = adjacent_swap(Permutation{{2, 1, 3}}, 1, bs);
    REQUIRE(inner.has_value());
    CHECK(inner->order == std::vector<int>{1, 2, 3});

    CHECK_THROWS_AS(adjacent_swap(Permutation{{1, 2, 3}}, 3, bs), invalid_input);
    CHECK_THROWS_AS(adjacent_swap(Permutation{{1, 2, 3}}, 0, bs), invalid_input);

    // involution where feasible
    Rng rng(8);
    const auto bs2 = BlockStructure::from_sizes({3, 2});
    for (int i = 0; i < 100; ++i) {
        const Permutation a = random_feasible(bs2, rng);
        const int j = 1 + static_cast<int>(rng.uniform_index(4));
        const auto once = adjacent_swap(a, j, bs2);
        if (!once) continue;
        const auto twice = adjacent_swap(*once, j, bs2);
        REQUIRE(twice.has_value());
        CHECK(*twice == a);
    }
}

TEST_CASE("enumerate_feasible lists the Table-1 run order for m=3") {
    const auto all = enumerate_feasible(BlockStructure::single(3));
    const std::vector<std::vector<int>> expected = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3},
                                                    {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
    REQUIRE(all.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(all[i].order == expected[i]);
}

TEST_CASE("enumerate_feasible covers blocked and degenerate cases") {
    const auto singletons = enumerate_feasible(BlockStructure::from_blocks({{1}, {2}, {3}}));
    REQUIRE(singletons.size() == 1);
    CHECK(singletons[0].order == std::vector<int>{1, 2, 3});

    const auto two_blocks = enumerate_feasible(BlockStructure::from_blocks({{1, 2}, {3, 4}}));
    const std::vector<std::vector<int>> expected = {{1, 2, 3, 4}, {1, 2, 4, 3}, {2, 1, 3, 4}, {2, 1, 4, 3}};
    REQUIRE(two_blocks.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(two_blocks[i].order == expected[i]);

    CHECK_THROWS_WITH_AS(static_cast<void>(enumerate_feasible(BlockStructure::single(10), 500000)),
                         doctest::Contains("3628800"), enumeration_refused);
}

TEST_CASE("enumerate_feasible yields exactly feasible_count distinct feasible runs") {
    for (const auto& bs : {BlockStructure::single(5), BlockStructure::from_sizes({2, 2, 2}),
                           BlockStructure::from_sizes({3, 4})}) {
        const auto all = enumerate_feasible(bs);
        CHECK(all.size() == feasible_count(bs));
        std::set<std::vector<int>> uniq;
        for (const auto& a : all) {
            CHECK(is_feasible(a, bs));
            uniq.insert(a.order);
        }
        CHECK(uniq.size() == all.size());
    }
}

TEST_CASE("under c=1 all m! permutations are feasible (m <= 6)") {
    for (int m = 2; m <= 6; ++m) {
        const auto bs = BlockStructure::single(m);
        const auto all = enumerate_feasible(bs);
        CHECK(all.size() == factorial(m));
        for (const auto& a : all) CHECK(is_feasible(a, bs));
    }
}

TEST_CASE("block structure validation") {
    CHECK_THROWS_AS(BlockStructure::from_blocks({{1, 2}, {2, 3}}), invalid_input); // overlap
    CHECK_THROWS_AS(BlockStructure::from_blocks({{1, 5}, {2}}), invalid_input);    // label out of range
    CHECK_THROWS_AS(BlockStructure::from_sizes({0, 3}), invalid_input);
    const auto bs = BlockStructure::from_sizes({2, 3});
    CHECK(bs.m() == 5);
    CHECK(bs.block_count() == 2);
    CHECK(bs.block_of(4) == 1);
    CHECK(bs.swappable_positions() == std::vector<int>{1, 3, 4});
}
