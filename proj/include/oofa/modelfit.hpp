#pragma once

#include <limits>
#include <unordered_map>
#include <vector>

#include "oofa/encoder.hpp"

namespace oofa {

//! Least-squares fit of a model spec to observed responses.
struct FittedModel {
    ModelSpec spec;
    std::vector<double> coefficients; // aligned to spec.columns()
    double rss = 0.0;
};

//! Ordinary least squares via pivoted Householder QR. Rank deficiency is an
//! error naming the offending columns, never a silent pseudo-inverse.
inline FittedModel fit(const std::vector<Permutation>& design, const std::vector<double>& responses,
                       const ModelSpec& spec) {
    if (design.size() != responses.size()) throw invalid_input("design and response lengths differ");
    const int p = spec.column_count();
    if (static_cast<int>(design.size()) < p)
        throw invalid_input("need at least p = " + std::to_string(p) + " runs to fit " +
                            std::to_string(p) + " coefficients");
    const Matrix X = model_matrix(design, spec);
    const PivotedQr qr = PivotedQr::factor(X);
    if (qr.rank() < p) {
        std::string cols;
        for (int c : qr.deficient_columns()) cols += (cols.empty() ? "" : ", ") + spec.columns()[c].str();
        throw rank_deficient("model matrix is rank deficient; aliased columns: " + cols);
    }
    FittedModel fm{spec, qr.solve(responses), 0.0};
    for (std::size_t r = 0; r < design.size(); ++r) {
        double pred = 0.0;
        for (int c = 0; c < p; ++c) pred += X(static_cast<int>(r), c) * fm.coefficients[c];
        const double e = responses[r] - pred;
        fm.rss += e * e;
    }
    return fm;
}

//! Predicted response: inner product of the encoded run with the estimates.
inline double predict(const FittedModel& fm, const Permutation& a) {
    const std::vector<double> x = fm.spec.encode_row(a); // validates feasibility
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * fm.coefficients[i];
    return s;
}

//! Deterministic cost oracle over the feasible runs: either a synthetic
//! sequential-ordering instance or an externally supplied table.
class CostInstance {
public:
    //! Synthetic stand-in for a sequential-ordering dataset: every ordered
    //! pair gets a base cost uniform on [1,10] (fixed by the seed) and
    //! cost(a) sums the base costs of within-block adjacent pairs, plus a
    //! per-permutation cached noise draw. The truth is a length-1 transition
    //! structure by construction, so TE1 is well-specified and PWO is not.
    static CostInstance synthetic_sop(int m, BlockStructure bs, std::uint64_t seed, double noise) {
        if (m < 3) throw invalid_input("synthetic_sop requires m >= 3");
        if (bs.m() != m) throw invalid_input("block structure does not cover 1..m");
        CostInstance ci;
        ci.bs_ = std::move(bs);
        ci.noise_ = noise;
        ci.seed_ = seed;
        ci.base_ = Matrix(m + 1, m + 1);
        Rng rng(seed);
        for (int j = 1; j <= m; ++j)
            for (int k = 1; k <= m; ++k)
                if (j != k) ci.base_(j, k) = 1.0 + 9.0 * rng.uniform01();
        return ci;
    }

    //! A table of (feasible run, cost) rows, e.g. from an external CSV.
    static CostInstance from_table(BlockStructure bs, const std::vector<std::pair<Permutation, double>>& rows) {
        CostInstance ci;
        ci.bs_ = std::move(bs);
        ci.table_.reserve(rows.size());
        for (const auto& [a, y] : rows) {
            if (!is_valid_permutation(a, ci.bs_.m()) || !is_feasible(a, ci.bs_))
                throw invalid_input("cost table contains an infeasible run");
            ci.table_[key(a)] = y;
        }
        return ci;
    }

    const BlockStructure& blocks() const { return bs_; }
    bool is_table() const { return !table_.empty(); }

    double cost(const Permutation& a) const {
        if (is_table()) {
            const auto it = table_.find(key(a));
            if (it == table_.end()) throw invalid_input("cost table is missing a feasible run");
            return it->second;
        }
        double c = 0.0;
        for (int t = 0; t + 1 < a.size(); ++t)
            if (bs_.block_of(a.order[t]) == bs_.block_of(a.order[t + 1])) c += base_(a.order[t], a.order[t + 1]);
        if (noise_ != 0.0) {
            std::uint64_t h = seed_ ^ 0x6f6f6661ull;
            for (int v : a.order) {
                std::uint64_t s = h ^ static_cast<std::uint64_t>(v);
                h = splitmix64(s);
            }
            Rng noise_rng(h);
            c += noise_ * noise_rng.normal();
        }
        return c;
    }

private:
    static std::string key(const Permutation& a) {
        std::string s;
        for (int v : a.order) {
            s += std::to_string(v);
            s += ',';
        }
        return s;
    }

    BlockStructure bs_ = BlockStructure::single(1);
    Matrix base_;
    double noise_ = 0.0;
    std::uint64_t seed_ = 0;
    std::unordered_map<std::string, double> table_;
};

//! Rank of the model's predicted-optimal order within the true-cost ordering
//! of all feasible orders (1 = truly optimal). Ties in the true costs are
//! resolved by the average rank of the tied group.
inline double rank_orders(const FittedModel& fm, const BlockStructure& bs, const CostInstance& truth,
                          std::uint64_t cap = 500000) {
    const std::vector<Permutation> all = enumerate_feasible(bs, cap);
    std::size_t best = 0;
    double best_pred = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i) {
        const double pred = predict(fm, all[i]);
        if (pred < best_pred) {
            best_pred = pred;
            best = i;
        }
    }
    const double chosen_cost = truth.cost(all[best]);
    std::size_t below = 0, tied = 0;
    for (const Permutation& a : all) {
        const double c = truth.cost(a);
        if (c < chosen_cost) ++below;
        else if (c == chosen_cost) ++tied;
    }
    return static_cast<double>(below) + (static_cast<double>(tied) + 1.0) / 2.0;
}

} // namespace oofa
