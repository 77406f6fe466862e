#pragma once

#include <cstdint>
#include <vector>

#include "oofa/encoder.hpp"

namespace oofa {

//! Symmetric p x p information matrix M = XᵀX/n with its column labels.
//! n_basis records the run count (or N) it was normalized by.
struct MomentMatrix {
    Matrix values;
    std::vector<ColumnLabel> labels;
    double n_basis = 0.0;

    int size() const { return values.rows(); }
};

//! M = XᵀX/n; the upper triangle is computed and mirrored.
inline MomentMatrix moment_of_design(const Matrix& X, std::vector<ColumnLabel> labels) {
    const int n = X.rows(), p = X.cols();
    if (n < 1) throw invalid_input("moment of an empty design");
    MomentMatrix M;
    M.values = Matrix(p, p);
    M.labels = std::move(labels);
    M.n_basis = n;
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += X(r, i) * X(r, j);
            M.values(i, j) = M.values(j, i) = s / n;
        }
    return M;
}

inline MomentMatrix moment_of_design(const std::vector<Permutation>& design, const ModelSpec& spec) {
    return moment_of_design(model_matrix(design, spec), spec.columns());
}

namespace detail {

//! V pattern of Theorem 1: rows/columns indexed by ordered pairs; zero when
//! the pairs share a source, share a destination, or are mutual reverses.
inline bool v_entry(const ColumnLabel& a, const ColumnLabel& b) {
    if (a.j == b.j || a.k == b.k) return false;
    if (a.j == b.k && a.k == b.j) return false;
    return true;
}

//! Q pattern of Theorem 2 (length-1 pair `a` against length-2 pair `b`),
//! already divided by m(m-1)(m-2).
inline double q_entry(const ColumnLabel& a, const ColumnLabel& b, int m) {
    const double denom = static_cast<double>(m) * (m - 1) * (m - 2);
    if (a.j == b.j && a.k == b.k) return 0.0;
    if (a.j == b.k && a.k == b.j) return 0.0;
    if (a.j == b.j || a.k == b.k) return (m - 2) / denom;
    if (a.k == b.j || a.j == b.k) return (m - 3) / denom;
    return (m - 4) / denom; // disjoint label sets
}

//! R pattern of Theorem 2 (length-2 against length-2), divided by m!/(..).
inline double r_entry(const ColumnLabel& a, const ColumnLabel& b, int m) {
    const bool share_jk = a.j == b.k, share_kj = a.k == b.j;
    if (a.j == b.j || a.k == b.k) return 0.0;       // shared source or destination
    if (share_jk && share_kj) return 0.0;           // mutual reverses
    if (share_jk || share_kj)
        return (m - 4) / (static_cast<double>(m) * (m - 1) * (m - 2));
    return ((m - 6.0) * (m - 5.0) + 4.0 * (m - 4.0)) /
           (static_cast<double>(m) * (m - 1) * (m - 2) * (m - 3));
}

//! Exact within-block moment entries by enumeration of the block's own
//! arrangements; integer accumulation divided once. Fills entries between
//! the given columns of `spec` that belong to labels of `block`.
inline void fill_block_by_enumeration(Matrix& M, const ModelSpec& spec, const std::vector<int>& columns,
                                      const std::vector<int>& block) {
    std::vector<int> arr = block;
    const std::uint64_t nb = factorial(static_cast<int>(block.size()));
    std::vector<std::vector<std::int64_t>> acc(columns.size(), std::vector<std::int64_t>(columns.size(), 0));
    std::vector<int> fires;
    do {
        fires.clear();
        for (std::size_t t = 0; t + 1 < arr.size(); ++t) {
            const int c = spec.transition_column(arr[t], arr[t + 1], 1);
            if (c >= 0) fires.push_back(c);
        }
        for (std::size_t t = 0; t + 2 < arr.size(); ++t) {
            const int c = spec.transition_column(arr[t], arr[t + 2], 2);
            if (c >= 0) fires.push_back(c);
        }
        for (std::size_t x = 0; x < fires.size(); ++x)
            for (std::size_t y = 0; y < fires.size(); ++y) {
                const auto ix = std::lower_bound(columns.begin(), columns.end(), fires[x]) - columns.begin();
                const auto iy = std::lower_bound(columns.begin(), columns.end(), fires[y]) - columns.begin();
                ++acc[static_cast<std::size_t>(ix)][static_cast<std::size_t>(iy)];
            }
    } while (std::next_permutation(arr.begin(), arr.end()));
    for (std::size_t x = 0; x < columns.size(); ++x)
        for (std::size_t y = 0; y < columns.size(); ++y)
            M(columns[x], columns[y]) = static_cast<double>(acc[x][y]) / static_cast<double>(nb);
}

} // namespace detail

//! Theorem-1 closed form: full-design moment matrix of the length-1 TE model.
inline MomentMatrix full_moment_te1(int m) {
    if (m < 3) throw invalid_input("full_moment_te1 requires m >= 3");
    const ModelSpec spec = ModelSpec::make(ModelKind::TE1, BlockStructure::single(m));
    const int p = spec.column_count();
    MomentMatrix M;
    M.labels = spec.columns();
    M.n_basis = static_cast<double>(factorial(m));
    M.values = Matrix(p, p);
    M.values(0, 0) = 1.0;
    for (int c = 1; c < p; ++c) M.values(0, c) = M.values(c, 0) = 1.0 / m;
    for (int a = 1; a < p; ++a)
        for (int b = 1; b < p; ++b) {
            if (a == b)
                M.values(a, b) = 1.0 / m;
            else
                M.values(a, b) = detail::v_entry(M.labels[a], M.labels[b])
                                     ? 1.0 / (static_cast<double>(m) * (m - 1))
                                     : 0.0;
        }
    return M;
}

//! Theorem-2 closed form: full-design moment matrix of the length-2 TE model.
inline MomentMatrix full_moment_te2(int m) {
    if (m < 5) throw invalid_input("full_moment_te2 requires m >= 5");
    const ModelSpec spec = ModelSpec::make(ModelKind::TE2, BlockStructure::single(m));
    const int p = spec.column_count();
    MomentMatrix M;
    M.labels = spec.columns();
    M.n_basis = static_cast<double>(factorial(m));
    M.values = Matrix(p, p);
    M.values(0, 0) = 1.0;
    for (int a = 1; a < p; ++a) {
        const ColumnLabel& la = M.labels[a];
        M.values(0, a) = M.values(a, 0) =
            (la.length == 1) ? 1.0 / m : (m - 2.0) / (static_cast<double>(m) * (m - 1));
        for (int b = 1; b < p; ++b) {
            const ColumnLabel& lb = M.labels[b];
            double v;
            if (la.length == 1 && lb.length == 1) {
                if (a == b)
                    v = 1.0 / m;
                else
                    v = detail::v_entry(la, lb) ? 1.0 / (static_cast<double>(m) * (m - 1)) : 0.0;
            } else if (la.length == 2 && lb.length == 2) {
                if (a == b)
                    v = (m - 2.0) / (static_cast<double>(m) * (m - 1));
                else
                    v = detail::r_entry(la, lb, m);
            } else {
                const ColumnLabel& l1 = (la.length == 1) ? la : lb;
                const ColumnLabel& l2 = (la.length == 1) ? lb : la;
                v = detail::q_entry(l1, l2, m);
            }
            M.values(a, b) = v;
        }
    }
    return M;
}

//! Corollary-3 closed form (with the diagonal blocks divided by m_i! as in
//! the corollary's own proof): blocked length-1 TE model.
inline MomentMatrix full_moment_te1_blocked(const BlockStructure& bs) {
    const ModelSpec spec = ModelSpec::make(ModelKind::TE1, bs);
    const int p = spec.column_count();
    MomentMatrix M;
    M.labels = spec.columns();
    M.n_basis = static_cast<double>(feasible_count(bs));
    M.values = Matrix(p, p);
    M.values(0, 0) = 1.0;
    for (int a = 1; a < p; ++a) {
        const ColumnLabel& la = M.labels[a];
        const int ba = bs.block_of(la.j);
        const double ma = bs.block_size(ba);
        M.values(0, a) = M.values(a, 0) = 1.0 / ma;
        for (int b = 1; b < p; ++b) {
            const ColumnLabel& lb = M.labels[b];
            const int bb = bs.block_of(lb.j);
            double v;
            if (ba != bb) {
                v = 1.0 / (ma * bs.block_size(bb)); // independent blocks
            } else if (a == b) {
                v = 1.0 / ma;
            } else {
                v = detail::v_entry(la, lb) ? 1.0 / (ma * (ma - 1)) : 0.0;
            }
            M.values(a, b) = v;
        }
    }
    return M;
}

//! Blocked length-2 TE model: Theorem-2 sub-matrices per block (enumeration
//! for blocks of size 3 or 4, where the theorem's counts do not apply),
//! cross-block entries as products of column means.
inline MomentMatrix full_moment_te2_blocked(const BlockStructure& bs) {
    const ModelSpec spec = ModelSpec::make(ModelKind::TE2, bs);
    const int p = spec.column_count();
    MomentMatrix M;
    M.labels = spec.columns();
    M.n_basis = static_cast<double>(feasible_count(bs));
    M.values = Matrix(p, p);
    M.values(0, 0) = 1.0;

    auto mean_of = [&](const ColumnLabel& l) {
        const double mi = bs.block_size(bs.block_of(l.j));
        return (l.length == 1) ? 1.0 / mi : (mi - 2.0) / (mi * (mi - 1.0));
    };

    for (int a = 1; a < p; ++a) {
        const ColumnLabel& la = M.labels[a];
        M.values(0, a) = M.values(a, 0) = mean_of(la);
        const int ba = bs.block_of(la.j);
        const int ma = bs.block_size(ba);
        for (int b = 1; b < p; ++b) {
            const ColumnLabel& lb = M.labels[b];
            if (bs.block_of(lb.j) != ba) {
                M.values(a, b) = mean_of(la) * mean_of(lb);
                continue;
            }
            if (ma < 5) continue; // filled by enumeration below
            double v;
            if (la.length == 1 && lb.length == 1)
                v = (a == b) ? 1.0 / ma
                             : (detail::v_entry(la, lb) ? 1.0 / (static_cast<double>(ma) * (ma - 1)) : 0.0);
            else if (la.length == 2 && lb.length == 2)
                v = (a == b) ? (ma - 2.0) / (static_cast<double>(ma) * (ma - 1)) : detail::r_entry(la, lb, ma);
            else {
                const ColumnLabel& l1 = (la.length == 1) ? la : lb;
                const ColumnLabel& l2 = (la.length == 1) ? lb : la;
                v = detail::q_entry(l1, l2, ma);
            }
            M.values(a, b) = v;
        }
    }

    for (int i = 0; i < bs.block_count(); ++i) {
        const int mi = bs.block_size(i);
        if (mi < 2 || mi >= 5) continue;
        std::vector<int> cols;
        for (int c = 1; c < p; ++c)
            if (bs.block_of(M.labels[c].j) == i) cols.push_back(c);
        if (!cols.empty()) detail::fill_block_by_enumeration(M.values, spec, cols, bs.block(i));
    }
    return M;
}

//! XᵀX/N over the enumerated feasible set, in exact integer accumulation
//! divided once at the end. Guarded by the enumeration cap.
inline MomentMatrix moment_by_enumeration(const ModelSpec& spec, std::uint64_t cap = 500000) {
    const std::vector<Permutation> all = enumerate_feasible(spec.blocks(), cap);
    const int p = spec.column_count();
    std::vector<std::int64_t> acc(static_cast<std::size_t>(p) * p, 0);
    std::vector<double> row(static_cast<std::size_t>(p));
    for (const Permutation& a : all) {
        spec.encode_row_unchecked(a, row.data());
        for (int i = 0; i < p; ++i) {
            if (row[i] == 0.0) continue;
            const auto vi = static_cast<std::int64_t>(row[i]);
            for (int j = i; j < p; ++j)
                if (row[j] != 0.0) acc[static_cast<std::size_t>(i) * p + j] += vi * static_cast<std::int64_t>(row[j]);
        }
    }
    MomentMatrix M;
    M.labels = spec.columns();
    M.n_basis = static_cast<double>(all.size());
    M.values = Matrix(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j)
            M.values(i, j) = M.values(j, i) =
                static_cast<double>(acc[static_cast<std::size_t>(i) * p + j]) / M.n_basis;
    return M;
}

//! Full-design reference moment for a spec: closed forms for the TE models,
//! exact enumeration for PWO (no closed form is available for it here).
inline MomentMatrix full_moment(const ModelSpec& spec, std::uint64_t enum_cap = 500000) {
    switch (spec.kind()) {
        case ModelKind::TE1:
            return spec.blocks().unconstrained() ? full_moment_te1(spec.m()) : full_moment_te1_blocked(spec.blocks());
        case ModelKind::TE2:
            return spec.blocks().unconstrained() ? full_moment_te2(spec.m()) : full_moment_te2_blocked(spec.blocks());
        default:
            return moment_by_enumeration(spec, enum_cap);
    }
}

//! True when the reference produced by full_moment() is a closed form.
inline bool reference_is_closed_form(const ModelSpec& spec) { return spec.kind() != ModelKind::PWO; }

} // namespace oofa
