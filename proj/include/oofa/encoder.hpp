#pragma once

#include <string>
#include <vector>

#include "oofa/linalg.hpp"
#include "oofa/permspace.hpp"

namespace oofa {

enum class ModelKind { PWO, TE1, TE2 };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::PWO: return "pwo";
        case ModelKind::TE1: return "te1";
        default: return "te2";
    }
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "pwo" || s == "PWO") return ModelKind::PWO;
    if (s == "te1" || s == "TE1") return ModelKind::TE1;
    if (s == "te2" || s == "TE2") return ModelKind::TE2;
    throw invalid_input("unknown model '" + s + "' (expected pwo|te1|te2)");
}

//! Label of one model-matrix column. Serializes as "b0" (intercept),
//! "p:i<j" (pairwise order factor) or "t1:j>k" / "t2:j>k" (transition).
struct ColumnLabel {
    enum class Kind { Intercept, Pwo, Transition };
    Kind kind = Kind::Intercept;
    int j = 0, k = 0;
    int length = 0; // transition length, 1 or 2

    static ColumnLabel intercept() { return {}; }
    static ColumnLabel pwo(int i, int j) { return {Kind::Pwo, i, j, 0}; }
    static ColumnLabel transition(int j, int k, int len) { return {Kind::Transition, j, k, len}; }

    std::string str() const {
        switch (kind) {
            case Kind::Intercept: return "b0";
            case Kind::Pwo: return "p:" + std::to_string(j) + "<" + std::to_string(k);
            default: return "t" + std::to_string(length) + ":" + std::to_string(j) + ">" + std::to_string(k);
        }
    }

    bool operator==(const ColumnLabel&) const = default;
};

//! Signed positional gap d(j,k,a) = position(k) - position(j).
inline int transition_length(int j, int k, const Permutation& a) {
    if (j == k) throw invalid_input("transition_length requires j != k");
    int pj = -1, pk = -1;
    for (int pos = 0; pos < a.size(); ++pos) {
        if (a.order[pos] == j) pj = pos;
        if (a.order[pos] == k) pk = pos;
    }
    if (pj < 0 || pk < 0) throw invalid_input("labels not present in the permutation");
    return pk - pj;
}

//! Sparse encoded row; all TE rows have ~m nonzeros out of p columns.
struct SparseRow {
    std::vector<int> idx;
    std::vector<double> val;
    void clear() {
        idx.clear();
        val.clear();
    }
    void push(int i, double v) {
        idx.push_back(i);
        val.push_back(v);
    }
};

//! Which model expands a run into a model-matrix row, over which block
//! structure, with which columns retained. Fixes the column indexing used by
//! moment matrices, criteria, fits and file formats.
//!
//! Identifiability drops: TE models drop the transition (u*,v*) per block,
//! where u* is the largest and v* the second-largest label of the block
//! (the global (m, m-1) convention of the unconstrained model). Structurally
//! constant or zero columns never enter: length-2 columns exist only for
//! blocks of size >= 3, singleton blocks contribute nothing, and a blocked
//! PWO spec keeps only within-block pairs (cross-block pairs are constant
//! over the feasible set).
class ModelSpec {
public:
    static ModelSpec make(ModelKind kind, BlockStructure bs) {
        ModelSpec s;
        s.kind_ = kind;
        s.bs_ = std::move(bs);
        const int m = s.bs_.m();
        if (kind == ModelKind::TE2 && s.bs_.unconstrained() && m < 5)
            throw invalid_input("te2 requires m >= 5 in the unconstrained case");

        s.columns_.push_back(ColumnLabel::intercept());
        if (kind == ModelKind::PWO) {
            if (s.bs_.unconstrained()) {
                for (int i = 1; i <= m; ++i)
                    for (int j = i + 1; j <= m; ++j) s.columns_.push_back(ColumnLabel::pwo(i, j));
            } else {
                for (const auto& b : s.bs_.blocks())
                    for (std::size_t x = 0; x < b.size(); ++x)
                        for (std::size_t y = x + 1; y < b.size(); ++y)
                            s.columns_.push_back(ColumnLabel::pwo(b[x], b[y]));
            }
        } else {
            for (const auto& b : s.bs_.blocks()) s.append_transitions(b, 1);
            if (kind == ModelKind::TE2)
                for (const auto& b : s.bs_.blocks())
                    if (b.size() >= 3) s.append_transitions(b, 2);
        }
        s.build_lookup();
        return s;
    }

    ModelKind kind() const { return kind_; }
    const BlockStructure& blocks() const { return bs_; }
    int m() const { return bs_.m(); }
    int column_count() const { return static_cast<int>(columns_.size()); }
    const std::vector<ColumnLabel>& columns() const { return columns_; }
    const std::vector<ColumnLabel>& dropped() const { return dropped_; }

    //! Column index of a transition (j,k,len), or -1 if not retained.
    int transition_column(int j, int k, int len) const {
        return te_col_[static_cast<std::size_t>(((len - 1) * (m() + 1) + j) * (m() + 1) + k)];
    }

    //! Encode a run into `out` (length column_count), no feasibility check.
    void encode_row_unchecked(const Permutation& a, double* out) const {
        const int p = column_count();
        std::fill(out, out + p, 0.0);
        out[0] = 1.0;
        if (kind_ == ModelKind::PWO) {
            const std::vector<int>& pos = positions_of(a);
            for (int c = 1; c < p; ++c) {
                const ColumnLabel& L = columns_[c];
                out[c] = (pos[L.j] < pos[L.k]) ? 1.0 : -1.0;
            }
        } else {
            for (int t = 0; t + 1 < a.size(); ++t) {
                const int c = transition_column(a.order[t], a.order[t + 1], 1);
                if (c >= 0) out[c] = 1.0;
            }
            if (kind_ == ModelKind::TE2) {
                for (int t = 0; t + 2 < a.size(); ++t) {
                    const int c = transition_column(a.order[t], a.order[t + 2], 2);
                    if (c >= 0) out[c] = 1.0;
                }
            }
        }
    }

    void encode_sparse_unchecked(const Permutation& a, SparseRow& row) const {
        row.clear();
        row.push(0, 1.0);
        if (kind_ == ModelKind::PWO) {
            const std::vector<int>& pos = positions_of(a);
            for (int c = 1; c < column_count(); ++c) {
                const ColumnLabel& L = columns_[c];
                row.push(c, (pos[L.j] < pos[L.k]) ? 1.0 : -1.0);
            }
        } else {
            for (int t = 0; t + 1 < a.size(); ++t) {
                const int c = transition_column(a.order[t], a.order[t + 1], 1);
                if (c >= 0) row.push(c, 1.0);
            }
            if (kind_ == ModelKind::TE2) {
                for (int t = 0; t + 2 < a.size(); ++t) {
                    const int c = transition_column(a.order[t], a.order[t + 2], 2);
                    if (c >= 0) row.push(c, 1.0);
                }
            }
        }
    }

    //! Checked encoding: validates the run and (for TE under blocks) its
    //! feasibility before expanding.
    std::vector<double> encode_row(const Permutation& a) const {
        if (!is_valid_permutation(a, m())) throw invalid_input("run is not a permutation of 1..m");
        if (kind_ != ModelKind::PWO && !is_feasible(a, bs_))
            throw invalid_input("run violates the block constraints");
        std::vector<double> out(static_cast<std::size_t>(column_count()));
        encode_row_unchecked(a, out.data());
        return out;
    }

    bool operator==(const ModelSpec& o) const { return kind_ == o.kind_ && bs_ == o.bs_; }

private:
    void append_transitions(const std::vector<int>& block, int len) {
        if (block.size() < 2) return;
        const int u = block[block.size() - 1]; // largest label
        const int v = block[block.size() - 2]; // second largest
        for (int j : block)
            for (int k : block) {
                if (j == k) continue;
                if (j == u && k == v) continue; // identifiability drop
                columns_.push_back(ColumnLabel::transition(j, k, len));
            }
        dropped_.push_back(ColumnLabel::transition(u, v, len));
    }

    void build_lookup() {
        const int mm = m() + 1;
        te_col_.assign(static_cast<std::size_t>(2 * mm * mm), -1);
        for (int c = 0; c < column_count(); ++c) {
            const ColumnLabel& L = columns_[c];
            if (L.kind == ColumnLabel::Kind::Transition)
                te_col_[static_cast<std::size_t>(((L.length - 1) * mm + L.j) * mm + L.k)] = c;
        }
    }

    static const std::vector<int>& positions_of(const Permutation& a) {
        static thread_local std::vector<int> pos;
        pos.assign(static_cast<std::size_t>(a.size()) + 1, 0);
        for (int t = 0; t < a.size(); ++t) pos[a.order[t]] = t;
        return pos;
    }

    ModelKind kind_ = ModelKind::TE1;
    BlockStructure bs_ = BlockStructure::single(1);
    std::vector<ColumnLabel> columns_;
    std::vector<ColumnLabel> dropped_;
    std::vector<int> te_col_;
};

//! PWO row of the unconstrained model: leading 1, then the C(m,2) pairwise
//! order factors in (1,2),(1,3),...,(m-1,m) order.
inline std::vector<double> encode_pwo(const Permutation& a) {
    const int m = a.size();
    if (!is_valid_permutation(a, m)) throw invalid_input("run is not a permutation of 1..m");
    return ModelSpec::make(ModelKind::PWO, BlockStructure::single(m)).encode_row(a);
}

//! TE row for the given spec (length-1 or length-2 model, blocked or not).
inline std::vector<double> encode_te(const Permutation& a, const ModelSpec& spec) {
    if (spec.kind() == ModelKind::PWO) throw invalid_input("encode_te requires a TE spec");
    return spec.encode_row(a);
}

//! n x p model matrix; errors name the first offending row.
inline Matrix model_matrix(const std::vector<Permutation>& design, const ModelSpec& spec) {
    if (design.empty()) throw invalid_input("design has no runs");
    Matrix X(static_cast<int>(design.size()), spec.column_count());
    for (std::size_t r = 0; r < design.size(); ++r) {
        const Permutation& a = design[r];
        if (!is_valid_permutation(a, spec.m()))
            throw invalid_input("design row " + std::to_string(r + 1) + " is not a permutation of 1..m");
        if (spec.kind() != ModelKind::PWO && !is_feasible(a, spec.blocks()))
            throw invalid_input("design row " + std::to_string(r + 1) + " violates the block constraints");
        spec.encode_row_unchecked(a, X.row(static_cast<int>(r)));
    }
    return X;
}

} // namespace oofa
