#pragma once

#include <atomic>
#include <functional>
#include <thread>

#include "oofa/search.hpp"

namespace oofa {

//! One row-cell of the empirical tables: a search scenario plus the
//! published median it is compared against.
struct BenchScenario {
    int table = 0;
    int m = 0;
    std::vector<int> block_sizes; // single entry == unconstrained
    int n = 0;
    Algorithm algo = Algorithm::SA;
    Criterion criterion = Criterion::D;
    double paper_value = 0.0;

    std::string blocks_label() const {
        std::string s;
        for (std::size_t i = 0; i < block_sizes.size(); ++i)
            s += (i ? "-" : "") + std::to_string(block_sizes[i]);
        return s;
    }
};

struct BenchRow {
    BenchScenario scenario;
    double median = 0.0;
    int replicates = 0;
};

namespace detail {

struct TableEntry {
    int m;
    std::vector<int> sizes;
    int n;
    double sa, bubble, grasp;
};

inline const std::vector<TableEntry>& table_entries(int table) {
    // Published median relative efficiencies, 20 runs per cell.
    static const std::vector<TableEntry> t2 = {
        {9, {9}, 400, 0.9111, 0.9723, 0.9822},   {9, {9}, 500, 0.9277, 0.9809, 0.9885},
        {9, {9}, 600, 0.9403, 0.9861, 0.9919},   {10, {10}, 400, 0.8856, 0.9565, 0.9725},
        {10, {10}, 500, 0.9098, 0.9699, 0.9795}, {10, {10}, 600, 0.9253, 0.9773, 0.9853},
        {11, {11}, 400, 0.8579, 0.9368, 0.9430}, {11, {11}, 500, 0.8880, 0.9554, 0.9608},
        {11, {11}, 600, 0.9075, 0.9663, 0.9707}};
    static const std::vector<TableEntry> t3 = {
        {9, {9}, 400, 0.8229, 0.9435, 0.9642},   {9, {9}, 500, 0.8576, 0.9619, 0.9769},
        {9, {9}, 600, 0.8805, 0.9725, 0.9841},   {10, {10}, 400, 0.7771, 0.9114, 0.9376},
        {10, {10}, 500, 0.8211, 0.9386, 0.9583}, {10, {10}, 600, 0.8508, 0.9551, 0.9705},
        {11, {11}, 400, 0.7243, 0.8738, 0.9021}, {11, {11}, 500, 0.7796, 0.9089, 0.9332},
        {11, {11}, 600, 0.8172, 0.9319, 0.9517}};
    static const std::vector<TableEntry> t4 = {
        {9, {4, 5}, 50, 0.9185, 0.8737, 0.9224},     {9, {4, 5}, 100, 0.9919, 0.9719, 0.9902},
        {9, {3, 3, 3}, 50, 0.9857, 0.9808, 0.9855},  {9, {3, 3, 3}, 100, 0.9964, 0.9957, 0.9964},
        {10, {5, 5}, 100, 0.9712, 0.9446, 0.9670},   {10, {5, 5}, 200, 1.0002, 0.9899, 0.9988},
        {10, {3, 3, 4}, 100, 1.0038, 0.9974, 1.0033},{10, {3, 3, 4}, 200, 1.0085, 1.0069, 1.0083},
        {11, {5, 6}, 100, 0.9375, 0.8999, 0.9299},   {11, {5, 6}, 200, 0.9899, 0.9740, 0.9880},
        {11, {3, 4, 4}, 100, 0.9961, 0.9842, 0.9944},{11, {3, 4, 4}, 200, 1.0051, 1.0016, 1.0045}};
    static const std::vector<TableEntry> t5 = {
        {9, {4, 5}, 50, 0.8425, 0.7269, 0.8256},     {9, {4, 5}, 100, 0.9419, 0.9311, 0.9652},
        {9, {3, 3, 3}, 50, 0.9710, 0.9608, 0.9711},  {9, {3, 3, 3}, 100, 0.9676, 0.9909, 0.9928},
        {10, {5, 5}, 100, 0.9149, 0.8712, 0.9219},   {10, {5, 5}, 200, 0.8764, 0.9685, 0.9848},
        {10, {3, 3, 4}, 100, 0.9585, 0.9807, 0.9913},{10, {3, 3, 4}, 200, 0.9351, 0.9995, 1.0020},
        {11, {5, 6}, 100, 0.8689, 0.7822, 0.8530},   {11, {5, 6}, 200, 0.8475, 0.9388, 0.9658},
        {11, {3, 4, 4}, 100, 0.9479, 0.9570, 0.9778},{11, {3, 4, 4}, 200, 0.9169, 0.9922, 0.9976}};
    switch (table) {
        case 2: return t2;
        case 3: return t3;
        case 4: return t4;
        case 5: return t5;
        default: throw invalid_input("unknown benchmark table " + std::to_string(table) + " (expected 2..5)");
    }
}

} // namespace detail

//! The scenario cells of one published table (2/3: unconstrained D/I;
//! 4/5: block-constrained D/I), three algorithm cells per row.
inline std::vector<BenchScenario> table_scenarios(int table) {
    const Criterion crit = (table == 2 || table == 4) ? Criterion::D : Criterion::I;
    std::vector<BenchScenario> out;
    for (const auto& e : detail::table_entries(table)) {
        for (Algorithm a : {Algorithm::SA, Algorithm::Bubble, Algorithm::Grasp}) {
            BenchScenario s;
            s.table = table;
            s.m = e.m;
            s.block_sizes = e.sizes;
            s.n = e.n;
            s.algo = a;
            s.criterion = crit;
            s.paper_value = (a == Algorithm::SA) ? e.sa : (a == Algorithm::Bubble) ? e.bubble : e.grasp;
            out.push_back(std::move(s));
        }
    }
    return out;
}

//! Run `jobs` independent tasks on up to `threads` workers. Results must be
//! written to per-index slots by the job itself; the order of the slots is
//! deterministic regardless of scheduling.
inline void parallel_for(int jobs, int threads, const std::function<void(int)>& job) {
    threads = std::max(1, std::min(threads, jobs));
    if (threads == 1) {
        for (int i = 0; i < jobs; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) job(i);
        });
    for (auto& t : pool) t.join();
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw invalid_input("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return (v.size() % 2 == 1) ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

//! Search configuration for one scenario replicate. Replicate seeds are
//! derived as base_seed + replicate index.
inline SearchConfig scenario_config(const BenchScenario& sc, std::uint64_t seed) {
    const BlockStructure bs = (sc.block_sizes.size() == 1) ? BlockStructure::single(sc.m)
                                                           : BlockStructure::from_sizes(sc.block_sizes);
    SearchConfig cfg(ModelSpec::make(ModelKind::TE1, bs), sc.n, sc.criterion, sc.algo, seed);
    return cfg;
}

//! Median relative efficiency over seeded replicates, replicates running in
//! parallel. Measures only; assertions live in the acceptance suite.
inline BenchRow run_scenario(const BenchScenario& sc, int replicates, std::uint64_t base_seed, int threads) {
    std::vector<double> eff(static_cast<std::size_t>(replicates));
    parallel_for(replicates, threads, [&](int i) {
        const SearchConfig cfg = scenario_config(sc, base_seed + static_cast<std::uint64_t>(i));
        eff[static_cast<std::size_t>(i)] = run_search(cfg).relative_efficiency;
    });
    return BenchRow{sc, median(eff), replicates};
}

} // namespace oofa
