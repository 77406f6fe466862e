#pragma once

#include <cmath>
#include <limits>

#include "oofa/moment.hpp"

namespace oofa {

enum class Criterion { D, I };

inline std::string to_string(Criterion c) { return c == Criterion::D ? "D" : "I"; }

inline Criterion criterion_from_string(const std::string& s) {
    if (s == "D" || s == "d") return Criterion::D;
    if (s == "I" || s == "i") return Criterion::I;
    throw invalid_input("unknown criterion '" + s + "' (expected D|I)");
}

namespace detail {
inline void require_finite(const MomentMatrix& M) {
    for (int i = 0; i < M.size(); ++i)
        for (int j = 0; j < M.size(); ++j)
            if (!std::isfinite(M.values(i, j))) throw invalid_input("moment matrix has non-finite entries");
}

//! trace(M⁻¹ Mf) with one step of iterative refinement; tight designs
//! (n close to p) are ill-conditioned enough that the plain solve can lose
//! more than the 1e-10 the invariance contracts allow.
inline double refined_trace_solve(const Cholesky& ch, const Matrix& M, const Matrix& Mf) {
    Matrix Z = ch.solve(Mf);
    const Matrix R = Mf - M * Z;
    const Matrix C = ch.solve(R);
    double tr = 0.0;
    for (int i = 0; i < Z.rows(); ++i) tr += Z(i, i) + C(i, i);
    return tr;
}
} // namespace detail

//! D-criterion |M|^(1/q), larger is better; q is the column count of M.
//! Returns 0 for a singular M.
inline double d_criterion(const MomentMatrix& M) {
    detail::require_finite(M);
    const Cholesky ch = Cholesky::factor(M.values);
    if (ch.singular()) return 0.0;
    return std::exp(ch.logdet / M.size());
}

//! I-criterion trace(M⁻¹ M_f) against the *normalized* full-design moment
//! M_f; smaller is better. Throws oofa::singular_matrix when the condition
//! estimate marks M singular.
inline double i_criterion(const MomentMatrix& M, const MomentMatrix& Mf) {
    if (M.labels != Mf.labels) throw invalid_input("criterion reference labels do not match the candidate");
    detail::require_finite(M);
    const Cholesky ch = Cholesky::factor(M.values);
    if (ch.singular()) throw singular_matrix("moment matrix is singular (condition estimate above 1e12)");
    return detail::refined_trace_solve(ch, M.values, Mf.values);
}

//! Relative efficiency, oriented so larger favors the candidate design:
//! D_reduced/D_full for D, I_full/I_reduced for I. May exceed 1 under block
//! constraints. A singular candidate has relative D-efficiency 0.
inline double relative_efficiency(const MomentMatrix& M, const MomentMatrix& Mf, Criterion kind) {
    if (kind == Criterion::D) return d_criterion(M) / d_criterion(Mf);
    return i_criterion(Mf, Mf) / i_criterion(M, Mf);
}

//! Search objective, minimized: -log|M| for D, trace(M⁻¹M_f) for I.
//! Singular candidates map to +infinity rather than an error.
inline double objective(const MomentMatrix& M, Criterion kind, const MomentMatrix* Mf = nullptr) {
    detail::require_finite(M);
    const Cholesky ch = Cholesky::factor(M.values);
    if (ch.singular()) return std::numeric_limits<double>::infinity();
    if (kind == Criterion::D) return -ch.logdet;
    if (Mf == nullptr) throw invalid_input("I objective requires the full-design reference");
    return detail::refined_trace_solve(ch, M.values, Mf->values);
}

} // namespace oofa
