#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "oofa/errors.hpp"

namespace oofa {

//! Dense row-major matrix of doubles. Small sizes only (p up to a few
//! hundred); no view machinery, just enough for the moment/criteria work.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
    const double* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    bool operator==(const Matrix& o) const = default;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* crow = c.row(i);
            for (int j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) c(i, j) -= b(i, j);
    return c;
}

inline std::vector<double> operator*(const Matrix& a, const std::vector<double>& x) {
    std::vector<double> y(static_cast<std::size_t>(a.rows()), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        y[i] = std::inner_product(a.row(i), a.row(i) + a.cols(), x.begin(), 0.0);
    return y;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
    return d;
}

//! Cholesky factorization A = L Lᵀ of a symmetric matrix.
//!
//! ok is false when a pivot is non-positive (not numerically PD).
//! rcond_proxy is min(pivot)/max(pivot) over the diagonal pivots L_ii²; a
//! crude but monotone stand-in for the reciprocal condition number used by
//! the singularity gate (threshold 1e-12).
struct Cholesky {
    Matrix L;
    double logdet = 0.0;
    bool ok = false;
    double rcond_proxy = 0.0;

    static Cholesky factor(const Matrix& A) {
        const int n = A.rows();
        Cholesky ch;
        ch.L = Matrix(n, n);
        double min_piv = std::numeric_limits<double>::infinity();
        double max_piv = 0.0;
        double logdet = 0.0;
        for (int j = 0; j < n; ++j) {
            double d = A(j, j);
            for (int k = 0; k < j; ++k) d -= ch.L(j, k) * ch.L(j, k);
            if (!(d > 0.0)) return ch; // ok stays false
            min_piv = std::min(min_piv, d);
            max_piv = std::max(max_piv, d);
            logdet += std::log(d);
            const double ljj = std::sqrt(d);
            ch.L(j, j) = ljj;
            for (int i = j + 1; i < n; ++i) {
                double s = A(i, j);
                const double* li = ch.L.row(i);
                const double* lj = ch.L.row(j);
                for (int k = 0; k < j; ++k) s -= li[k] * lj[k];
                ch.L(i, j) = s / ljj;
            }
        }
        ch.ok = true;
        ch.logdet = logdet;
        ch.rcond_proxy = (max_piv > 0.0) ? min_piv / max_piv : 0.0;
        return ch;
    }

    bool singular(double rcond_threshold = 1e-12) const {
        return !ok || rcond_proxy < rcond_threshold;
    }

    //! Solve A x = b in place.
    void solve_inplace(std::vector<double>& b) const {
        const int n = L.rows();
        for (int i = 0; i < n; ++i) {
            double s = b[i];
            const double* li = L.row(i);
            for (int k = 0; k < i; ++k) s -= li[k] * b[k];
            b[i] = s / li[i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = b[i];
            for (int k = i + 1; k < n; ++k) s -= L(k, i) * b[k];
            b[i] = s / L(i, i);
        }
    }

    //! Solve A X = B column by column.
    Matrix solve(const Matrix& B) const {
        Matrix X = B;
        const int n = L.rows();
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int j = 0; j < B.cols(); ++j) {
            for (int i = 0; i < n; ++i) col[i] = B(i, j);
            solve_inplace(col);
            for (int i = 0; i < n; ++i) X(i, j) = col[i];
        }
        return X;
    }

    Matrix inverse() const { return solve(Matrix::identity(L.rows())); }
};

inline double norm_1(const Matrix& A) {
    double best = 0.0;
    for (int j = 0; j < A.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < A.rows(); ++i) s += std::abs(A(i, j));
        best = std::max(best, s);
    }
    return best;
}

//! 1-norm reciprocal condition number via the explicit inverse. Small
//! matrices only; the cheap pivot-ratio proxy in Cholesky can overestimate
//! conditioning badly (the smallest pivot only bounds the smallest
//! eigenvalue from above).
inline double rcond_1norm(const Matrix& A, const Cholesky& ch) {
    if (!ch.ok) return 0.0;
    const double na = norm_1(A), ni = norm_1(ch.inverse());
    return (na > 0.0 && ni > 0.0) ? 1.0 / (na * ni) : 0.0;
}

//! Householder QR with column pivoting for least squares and rank checks.
//! A (n x p, n >= p) is factored as A P = Q R.
class PivotedQr {
public:
    static PivotedQr factor(Matrix A, double rel_tol = 1e-10) {
        PivotedQr f;
        const int n = A.rows(), p = A.cols();
        f.perm_.resize(static_cast<std::size_t>(p));
        std::iota(f.perm_.begin(), f.perm_.end(), 0);
        f.beta_.assign(static_cast<std::size_t>(p), 0.0);

        std::vector<double> colnorm2(static_cast<std::size_t>(p), 0.0);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < n; ++i) colnorm2[j] += A(i, j) * A(i, j);

        double r_max = 0.0;
        const int kmax = std::min(n, p);
        f.rank_ = kmax;
        for (int k = 0; k < kmax; ++k) {
            int piv = k;
            for (int j = k + 1; j < p; ++j)
                if (colnorm2[j] > colnorm2[piv]) piv = j;
            if (piv != k) {
                for (int i = 0; i < n; ++i) std::swap(A(i, k), A(i, piv));
                std::swap(colnorm2[k], colnorm2[piv]);
                std::swap(f.perm_[k], f.perm_[piv]);
            }

            double norm2 = 0.0;
            for (int i = k; i < n; ++i) norm2 += A(i, k) * A(i, k);
            const double norm = std::sqrt(norm2);
            r_max = std::max(r_max, norm);
            if (norm <= rel_tol * (r_max > 0.0 ? r_max : 1.0)) {
                f.rank_ = k;
                break;
            }

            const double alpha = (A(k, k) >= 0.0) ? -norm : norm;
            const double v0 = A(k, k) - alpha;
            f.beta_[k] = -v0 / alpha; // = vᵀv / (2 * v0²) normalization with v scaled so v[k]=1
            A(k, k) = alpha;
            for (int i = k + 1; i < n; ++i) A(i, k) /= v0;

            for (int j = k + 1; j < p; ++j) {
                double s = A(k, j);
                for (int i = k + 1; i < n; ++i) s += A(i, k) * A(i, j);
                s *= f.beta_[k];
                A(k, j) -= s;
                for (int i = k + 1; i < n; ++i) A(i, j) -= s * A(i, k);
                colnorm2[j] -= A(k, j) * A(k, j);
                if (colnorm2[j] < 0.0) colnorm2[j] = 0.0;
            }
        }
        f.qr_ = std::move(A);
        return f;
    }

    int rank() const { return rank_; }
    int cols() const { return qr_.cols(); }

    //! Column indexes (in the original ordering) rejected by the rank gate.
    std::vector<int> deficient_columns() const {
        return {perm_.begin() + rank_, perm_.end()};
    }

    //! Least-squares solution of min ||A x - b||; requires full rank.
    std::vector<double> solve(std::vector<double> b) const {
        const int n = qr_.rows(), p = qr_.cols();
        if (rank_ < p) throw rank_deficient("matrix is rank deficient");
        for (int k = 0; k < p; ++k) { // apply Householder reflections to b
            double s = b[k];
            for (int i = k + 1; i < n; ++i) s += qr_(i, k) * b[i];
            s *= beta_[k];
            b[k] -= s;
            for (int i = k + 1; i < n; ++i) b[i] -= s * qr_(i, k);
        }
        std::vector<double> x(static_cast<std::size_t>(p));
        for (int i = p - 1; i >= 0; --i) {
            double s = b[i];
            for (int j = i + 1; j < p; ++j) s -= qr_(i, j) * x[j];
            x[i] = s / qr_(i, i);
        }
        std::vector<double> out(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j) out[perm_[j]] = x[j];
        return out;
    }

private:
    Matrix qr_;
    std::vector<double> beta_;
    std::vector<int> perm_;
    int rank_ = 0;
};

} // namespace oofa
