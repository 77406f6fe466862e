#include <doctest.h>

#include "oofa/bench.hpp"

using namespace oofa;

TEST_CASE("scenario tables carry the published medians") {
    const auto t2 = table_scenarios(2);
    CHECK(t2.size() == 27); // 9 rows x 3 algorithms
    const auto t4 = table_scenarios(4);
    CHECK(t4.size() == 36); // 12 rows x 3 algorithms

    auto find = [](const std::vector<BenchScenario>& v, int m, int n, Algorithm a) {
        for (const auto& s : v)
            if (s.m == m && s.n == n && s.algo == a) return s;
        FAIL("scenario missing");
        return v.front();
    };
    CHECK(find(t2, 9, 600, Algorithm::Grasp).paper_value == doctest::Approx(0.9919));
    CHECK(find(t2, 9, 400, Algorithm::SA).paper_value == doctest::Approx(0.9111));
    CHECK(find(table_scenarios(3), 9, 600, Algorithm::Bubble).paper_value == doctest::Approx(0.9725));
    const auto t5 = table_scenarios(5);
    auto s56 = std::find_if(t5.begin(), t5.end(), [](const BenchScenario& s) {
        return s.m == 11 && s.n == 200 && s.algo == Algorithm::Grasp && s.block_sizes == std::vector<int>{5, 6};
    });
    REQUIRE(s56 != t5.end());
    CHECK(s56->paper_value == doctest::Approx(0.9658));
    CHECK(s56->criterion == Criterion::I);

    CHECK_THROWS_AS(table_scenarios(6), invalid_input);
}

TEST_CASE("median helper") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK_THROWS_AS(median({}), invalid_input);
}

TEST_CASE("replicate medians are identical across thread counts") {
    BenchScenario sc;
    sc.table = 0;
    sc.m = 5;
    sc.block_sizes = {5};
    sc.n = 25;
    sc.algo = Algorithm::Bubble;
    sc.criterion = Criterion::D;
    const BenchRow serial = run_scenario(sc, 6, 11, 1);
    const BenchRow threaded = run_scenario(sc, 6, 11, 3);
    CHECK(serial.median == threaded.median);
    CHECK(serial.replicates == 6);
}
