#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oofa/criteria.hpp"

namespace oofa {

enum class Algorithm { SA, Bubble, Grasp };

inline std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::SA: return "sa";
        case Algorithm::Bubble: return "bubble";
        default: return "grasp";
    }
}

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "sa" || s == "SA") return Algorithm::SA;
    if (s == "bubble" || s == "BUBBLE" || s == "bb") return Algorithm::Bubble;
    if (s == "grasp" || s == "GRASP") return Algorithm::Grasp;
    throw invalid_input("unknown algorithm '" + s + "' (expected sa|bubble|grasp)");
}

//! Objective bookkeeping for one candidate design under single-row adjacent
//! swaps. The moment matrix is maintained incrementally as
//! M <- M + (x_newᵀx_new - x_oldᵀx_old)/n; the Refactorize path refactorizes
//! per evaluation, the RankOne path propagates the inverse (and, for the I
//! criterion, U = M⁻¹ M_f M⁻¹) through Sherman-Morrison steps with periodic
//! exact refreshes. Both paths agree to well below 1e-10.
class DesignEvaluator {
public:
    enum class Path { RankOne, Refactorize };

    DesignEvaluator(const ModelSpec& spec, Criterion crit, const MomentMatrix* Mf,
                    std::vector<Permutation> design, Path path = Path::RankOne)
        : spec_(&spec), crit_(crit), path_(path), rows_(std::move(design)), n_(static_cast<int>(rows_.size())),
          p_(spec.column_count()) {
        if (crit_ == Criterion::I) {
            if (Mf == nullptr) throw invalid_input("I criterion requires the full-design reference");
            Mf_ = Mf->values;
        }
        enc_.resize(rows_.size());
        M_ = Matrix(p_, p_);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            spec.encode_sparse_unchecked(rows_[r], enc_[r]);
            accumulate_outer(enc_[r], 1.0);
        }
        for (int i = 0; i < p_; ++i)
            for (int j = 0; j < p_; ++j) M_(i, j) /= n_;
        refresh();
        evals_ = 1; // the initial phi(M) computation
    }

    int n() const { return n_; }
    int p() const { return p_; }
    const std::vector<Permutation>& design() const { return rows_; }
    double objective() const { return phi_; }
    bool singular() const { return singular_; }
    long long evaluations() const { return evals_; }
    void add_evaluations(long long e) { evals_ += e; }

    //! phi of the design with positions j, j+1 (1-based j) of `row` swapped.
    //! +infinity when the swapped design's moment matrix is not PD. The swap
    //! must be block-feasible.
    double eval_swap(int row, int j) {
        ++evals_;
        if (singular_) return std::numeric_limits<double>::infinity();
        encode_candidate(row, j);
        if (path_ == Path::Refactorize) return exact_swap_objective();
        const SparseRow& xo = enc_[static_cast<std::size_t>(row)];
        const double s_nn = quad(W_, xn_), s_oo = quad(W_, xo), s_no = bilin(W_, xn_, xo);
        if (crit_ == Criterion::D) {
            const double bracket = (1.0 + s_nn / n_) * (1.0 - s_oo / n_) + (s_no / n_) * (s_no / n_);
            if (!(bracket > 1e-14)) return std::numeric_limits<double>::infinity();
            return -(logdet_ + std::log(bracket));
        }
        const double g1 = 1.0 / (n_ + s_nn);
        const double u_nn = quad(U_, xn_), u_oo = quad(U_, xo), u_no = bilin(U_, xn_, xo);
        const double tr1 = traceT_ - g1 * u_nn;
        const double denom = n_ - s_oo + g1 * s_no * s_no; // n * (1 - x_oᵀA₁⁻¹x_o / n)
        if (!(denom > n_ * 1e-12)) return std::numeric_limits<double>::infinity();
        const double u_zz = u_oo - 2.0 * g1 * s_no * u_no + g1 * g1 * s_no * s_no * u_nn;
        return tr1 + u_zz / denom;
    }

    //! Apply a previously evaluated feasible swap.
    void commit_swap(int row, int j) {
        encode_candidate(row, j);
        SparseRow& xo = enc_[static_cast<std::size_t>(row)];
        if (path_ == Path::Refactorize) {
            accumulate_outer(xn_, 1.0 / n_);
            accumulate_outer(xo, -1.0 / n_);
            std::swap(rows_[static_cast<std::size_t>(row)], cand_);
            std::swap(xo, xn_);
            refresh();
            return;
        }

        // step 1: A1 = M + x_n x_nᵀ/n
        sparse_matvec(W_, xn_, wn_);
        const double s_nn = dot(xn_, wn_);
        const double g1 = 1.0 / (n_ + s_nn);
        if (crit_ == Criterion::D) {
            // the determinant ratio needs the pre-update inverse
            sparse_matvec(W_, xo, wo_);
            const double s_oo = dot(xo, wo_), s_no = dot(xn_, wo_);
            const double bracket = (1.0 + s_nn / n_) * (1.0 - s_oo / n_) + (s_no / n_) * (s_no / n_);
            logdet_ += std::log(bracket);
        } else {
            const double u_nn = quad(U_, xn_);
            sparse_matvec(U_, xn_, rn_);
            traceT_ -= g1 * u_nn;
            rank_two_update(U_, wn_, rn_, -g1, g1 * g1 * u_nn);
        }
        rank_one_update(W_, wn_, -g1);

        // step 2: A2 = A1 - x_o x_oᵀ/n, with W now holding A1⁻¹
        sparse_matvec(W_, xo, wo_);
        const double t_oo = dot(xo, wo_);
        const double g2 = 1.0 / (n_ - t_oo);
        if (crit_ == Criterion::I) {
            const double u2_oo = quad(U_, xo);
            sparse_matvec(U_, xo, rn_);
            traceT_ += g2 * u2_oo;
            rank_two_update(U_, wo_, rn_, g2, g2 * g2 * u2_oo);
            phi_ = traceT_;
        } else {
            phi_ = -logdet_;
        }
        rank_one_update(W_, wo_, g2);

        accumulate_outer(xn_, 1.0 / n_);
        accumulate_outer(xo, -1.0 / n_);
        std::swap(rows_[static_cast<std::size_t>(row)], cand_);
        std::swap(xo, xn_);
        if (++commits_since_refresh_ >= refresh_interval_) {
            refresh();
            if (singular_) throw singular_matrix("design state became singular during incremental updates");
        }
    }

    //! Rebuild all cached state exactly from the maintained moment matrix.
    void refresh() {
        commits_since_refresh_ = 0;
        const Cholesky ch = Cholesky::factor(M_);
        if (ch.singular()) {
            singular_ = true;
            phi_ = std::numeric_limits<double>::infinity();
            return;
        }
        singular_ = false;
        logdet_ = ch.logdet;
        if (path_ == Path::RankOne || crit_ == Criterion::I) W_ = ch.inverse();
        if (crit_ == Criterion::D) {
            phi_ = -logdet_;
        } else {
            const Matrix T = W_ * Mf_;
            traceT_ = 0.0;
            for (int i = 0; i < p_; ++i) traceT_ += T(i, i);
            if (path_ == Path::RankOne) U_ = T * W_;
            phi_ = traceT_;
        }
    }

private:
    void encode_candidate(int row, int j) {
        cand_row_ = static_cast<std::size_t>(row);
        cand_ = rows_[cand_row_];
        std::swap(cand_.order[j - 1], cand_.order[j]);
        spec_->encode_sparse_unchecked(cand_, xn_);
    }

    double exact_swap_objective() const {
        Matrix M2 = M_;
        add_outer(M2, xn_, 1.0 / n_);
        add_outer(M2, enc_[cand_row_], -1.0 / n_);
        const Cholesky ch = Cholesky::factor(M2);
        if (ch.singular()) return std::numeric_limits<double>::infinity();
        if (crit_ == Criterion::D) return -ch.logdet;
        const Matrix Z = ch.solve(Mf_);
        double tr = 0.0;
        for (int i = 0; i < p_; ++i) tr += Z(i, i);
        return tr;
    }

    void accumulate_outer(const SparseRow& x, double scale) { add_outer(M_, x, scale); }

    static void add_outer(Matrix& A, const SparseRow& x, double scale) {
        for (std::size_t a = 0; a < x.idx.size(); ++a) {
            const double va = x.val[a] * scale;
            for (std::size_t b = 0; b < x.idx.size(); ++b) A(x.idx[a], x.idx[b]) += va * x.val[b];
        }
    }

    static double quad(const Matrix& A, const SparseRow& x) {
        double s = 0.0;
        for (std::size_t a = 0; a < x.idx.size(); ++a) {
            const double* row = A.row(x.idx[a]);
            double t = 0.0;
            for (std::size_t b = 0; b < x.idx.size(); ++b) t += row[x.idx[b]] * x.val[b];
            s += x.val[a] * t;
        }
        return s;
    }

    static double bilin(const Matrix& A, const SparseRow& x, const SparseRow& y) {
        double s = 0.0;
        for (std::size_t a = 0; a < x.idx.size(); ++a) {
            const double* row = A.row(x.idx[a]);
            double t = 0.0;
            for (std::size_t b = 0; b < y.idx.size(); ++b) t += row[y.idx[b]] * y.val[b];
            s += x.val[a] * t;
        }
        return s;
    }

    void sparse_matvec(const Matrix& A, const SparseRow& x, std::vector<double>& out) const {
        out.assign(static_cast<std::size_t>(p_), 0.0);
        for (std::size_t a = 0; a < x.idx.size(); ++a) {
            const double v = x.val[a];
            const double* row = A.row(x.idx[a]); // A symmetric: row = column
            for (int i = 0; i < p_; ++i) out[static_cast<std::size_t>(i)] += v * row[i];
        }
    }

    static double dot(const SparseRow& x, const std::vector<double>& w) {
        double s = 0.0;
        for (std::size_t a = 0; a < x.idx.size(); ++a) s += x.val[a] * w[static_cast<std::size_t>(x.idx[a])];
        return s;
    }

    //! A += scale * w wᵀ
    void rank_one_update(Matrix& A, const std::vector<double>& w, double scale) const {
        for (int i = 0; i < p_; ++i) {
            const double wi = scale * w[static_cast<std::size_t>(i)];
            if (wi == 0.0) continue;
            double* row = A.row(i);
            for (int j = 0; j < p_; ++j) row[j] += wi * w[static_cast<std::size_t>(j)];
        }
    }

    //! A += c1 * (w rᵀ + r wᵀ) + c2 * w wᵀ
    void rank_two_update(Matrix& A, const std::vector<double>& w, const std::vector<double>& r, double c1,
                         double c2) const {
        for (int i = 0; i < p_; ++i) {
            const double wi = w[static_cast<std::size_t>(i)], ri = r[static_cast<std::size_t>(i)];
            double* row = A.row(i);
            for (int j = 0; j < p_; ++j)
                row[j] += c1 * (wi * r[static_cast<std::size_t>(j)] + ri * w[static_cast<std::size_t>(j)]) +
                          c2 * wi * w[static_cast<std::size_t>(j)];
        }
    }

    const ModelSpec* spec_;
    Criterion crit_;
    Path path_;
    std::vector<Permutation> rows_;
    int n_, p_;
    Matrix Mf_;
    std::vector<SparseRow> enc_;
    Matrix M_, W_, U_;
    double logdet_ = 0.0, traceT_ = 0.0, phi_ = 0.0;
    bool singular_ = true;
    long long evals_ = 0;
    int commits_since_refresh_ = 0;
    int refresh_interval_ = 256;
    std::size_t cand_row_ = 0;

    Permutation cand_;
    SparseRow xn_;
    std::vector<double> wn_, wo_, rn_;
};

//! Everything one search run needs: the model, run size, criterion,
//! algorithm, seed and tuning parameters (defaults per module contract).
struct SearchConfig {
    ModelSpec spec;
    int n;
    Criterion criterion;
    Algorithm algorithm;
    std::uint64_t seed;

    // The log(t+1) cooling leaves single-swap objective deltas nearly always
    // accepted for tens of thousands of iterations, so SA needs a long walk
    // to accumulate a good best-ever design; 1e6 keeps runs in seconds.
    int sa_iters = 1000000;
    int bubble_max_passes = 10;
    int grasp_candidates = 250;
    int grasp_iters = 100;
    int grasp_rcl_init = 10;
    bool grasp_restart = false;
    bool collect_trace = false;
    DesignEvaluator::Path eval_path = DesignEvaluator::Path::RankOne;

    SearchConfig(ModelSpec s, int n_, Criterion crit, Algorithm algo, std::uint64_t seed_)
        : spec(std::move(s)), n(n_), criterion(crit), algorithm(algo), seed(seed_) {}

    void validate() const {
        if (n < spec.column_count())
            throw invalid_input("run size n = " + std::to_string(n) + " is below the column count p = " +
                                std::to_string(spec.column_count()));
        if (sa_iters < 1 || bubble_max_passes < 1 || grasp_candidates < 1 || grasp_iters < 1 || grasp_rcl_init < 1)
            throw invalid_input("tuning parameters must be positive");
    }
};

struct SearchResult {
    std::vector<Permutation> design;
    double objective = 0.0;
    double criterion_value = 0.0;
    double relative_efficiency = 0.0;
    long long evaluations = 0;
    std::vector<double> trace; // best-so-far objective per iteration, when requested
};

namespace detail {

inline bool swap_feasible_at(const BlockStructure& bs, int j) {
    return bs.block_at_position(j - 1) == bs.block_at_position(j);
}

//! Whole-design draws until the moment matrix is nonsingular (up to 1000).
inline DesignEvaluator initial_evaluator(const SearchConfig& cfg, const MomentMatrix* Mf, Rng& rng) {
    cfg.validate();
    long long wasted = 0;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<Permutation> design;
        design.reserve(static_cast<std::size_t>(cfg.n));
        for (int i = 0; i < cfg.n; ++i) design.push_back(random_feasible(cfg.spec.blocks(), rng));
        DesignEvaluator ev(cfg.spec, cfg.criterion, Mf, std::move(design), cfg.eval_path);
        if (!ev.singular()) {
            ev.add_evaluations(wasted);
            return ev;
        }
        wasted += ev.evaluations();
    }
    throw init_failure("no nonsingular design found in 1000 attempts (n too small or degenerate spec)");
}

inline SearchResult finish(const SearchConfig& cfg, const MomentMatrix& Mf, std::vector<Permutation> best,
                           long long evaluations, std::vector<double> trace) {
    const MomentMatrix M = moment_of_design(best, cfg.spec);
    SearchResult r;
    r.design = std::move(best);
    r.objective = objective(M, cfg.criterion, &Mf);
    r.criterion_value = (cfg.criterion == Criterion::D) ? d_criterion(M) : i_criterion(M, Mf);
    r.relative_efficiency = relative_efficiency(M, Mf, cfg.criterion);
    r.evaluations = evaluations;
    r.trace = std::move(trace);
    return r;
}

//! Sweeps of one random feasible adjacent swap per row, keeping strict
//! improvements, until a sweep improves nothing (capped; strict decrease
//! rules out cycling, the cap is a safety net).
inline void local_search_sweeps(DesignEvaluator& ev, const BlockStructure& bs, Rng& rng, int max_sweeps = 50) {
    const auto& sw = bs.swappable_positions();
    if (sw.empty()) return;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;
        for (int r = 0; r < ev.n(); ++r) {
            const int j = sw[rng.uniform_index(sw.size())];
            if (ev.eval_swap(r, j) < ev.objective()) {
                ev.commit_swap(r, j);
                improved = true;
            }
        }
        if (!improved) break;
    }
}

} // namespace detail

//! Random nonsingular starting design (spec op; searches use the evaluator
//! variant directly).
inline std::vector<Permutation> init_nonsingular(const SearchConfig& cfg, Rng& rng) {
    const MomentMatrix Mf = full_moment(cfg.spec);
    return detail::initial_evaluator(cfg, &Mf, rng).design();
}

//! One full local-search pass sequence from a given design (spec op).
inline std::vector<Permutation> local_search(std::vector<Permutation> design, const SearchConfig& cfg, Rng& rng) {
    const MomentMatrix Mf = full_moment(cfg.spec);
    DesignEvaluator ev(cfg.spec, cfg.criterion, &Mf, std::move(design), cfg.eval_path);
    if (ev.singular()) throw invalid_input("local search requires a nonsingular starting design");
    detail::local_search_sweeps(ev, cfg.spec.blocks(), rng);
    return ev.design();
}

//! SA acceptance probability exp(-(phi1 - phi0)/[1/log(t+1)]). At t = 0 the
//! exponent vanishes and every proposal is accepted; improving proposals
//! (phi1 <= phi0) are accepted at any t.
inline double sa_acceptance_probability(double phi1, double phi0, long t) {
    return std::exp(-(phi1 - phi0) * std::log(static_cast<double>(t) + 1.0));
}

//! Simulated annealing: propose a random feasible adjacent swap; accept when
//! a fresh U ~ uniform(0,1) satisfies U < exp(-(phi1 - phi0) * log(t+1));
//! return the best design ever visited.
inline SearchResult simulated_annealing(const SearchConfig& cfg) {
    Rng rng(cfg.seed);
    const MomentMatrix Mf = full_moment(cfg.spec);
    DesignEvaluator ev = detail::initial_evaluator(cfg, &Mf, rng);
    std::vector<Permutation> best = ev.design();
    double best_phi = ev.objective();
    std::vector<double> trace;
    const auto& bs = cfg.spec.blocks();
    if (!bs.swappable_positions().empty()) {
        const int m = cfg.spec.m();
        for (int t = 1; t <= cfg.sa_iters; ++t) {
            int row, j;
            do {
                row = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cfg.n)));
                j = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(m - 1)));
            } while (!detail::swap_feasible_at(bs, j));
            const double phi1 = ev.eval_swap(row, j);
            const double u = rng.uniform01();
            if (u < sa_acceptance_probability(phi1, ev.objective(), t)) {
                ev.commit_swap(row, j);
                if (ev.objective() < best_phi) {
                    best_phi = ev.objective();
                    best = ev.design();
                }
            }
            if (cfg.collect_trace) trace.push_back(best_phi);
        }
    }
    return detail::finish(cfg, Mf, std::move(best), ev.evaluations(), std::move(trace));
}

//! Greedy row-wise bubble sort: sweep each row's adjacent pairs, keep a swap
//! iff the objective strictly decreases, re-sweep the row while a sweep
//! improved; up to bubble_max_passes passes over the whole design.
inline SearchResult bubble_sort_search(const SearchConfig& cfg) {
    Rng rng(cfg.seed);
    const MomentMatrix Mf = full_moment(cfg.spec);
    DesignEvaluator ev = detail::initial_evaluator(cfg, &Mf, rng);
    std::vector<double> trace;
    const auto& bs = cfg.spec.blocks();
    const int m = cfg.spec.m();
    for (int pass = 1; pass <= cfg.bubble_max_passes; ++pass) {
        bool pass_improved = false;
        for (int r = 0; r < cfg.n; ++r) {
            bool still_sorting = true;
            while (still_sorting) {
                still_sorting = false;
                for (int j = 1; j <= m - 1; ++j) {
                    if (!detail::swap_feasible_at(bs, j)) continue;
                    if (ev.eval_swap(r, j) < ev.objective()) {
                        ev.commit_swap(r, j);
                        still_sorting = true;
                        pass_improved = true;
                    }
                }
            }
        }
        if (cfg.collect_trace) trace.push_back(ev.objective());
        if (!pass_improved) break; // greedy fixed point; nothing can change
    }
    return detail::finish(cfg, Mf, ev.design(), ev.evaluations(), std::move(trace));
}

//! GRASP: evaluate random adjacent-swap candidates, pick uniformly among the
//! rcl best, descend with the local search, carry the local optimum into the
//! next iteration (or restart fresh with grasp_restart); rcl shrinks by one
//! every 10 iterations down to 1.
inline SearchResult grasp(const SearchConfig& cfg) {
    Rng rng(cfg.seed);
    const MomentMatrix Mf = full_moment(cfg.spec);
    DesignEvaluator ev = detail::initial_evaluator(cfg, &Mf, rng);
    std::vector<Permutation> best = ev.design();
    double best_phi = ev.objective();
    std::vector<double> trace;
    const auto& bs = cfg.spec.blocks();
    const int m = cfg.spec.m();
    int rcl = cfg.grasp_rcl_init;

    struct Cand {
        double phi;
        int row, j, ord;
    };
    std::vector<Cand> cands;
    for (int t = 1; t <= cfg.grasp_iters; ++t) {
        if (cfg.grasp_restart && t > 1) {
            const long long spent = ev.evaluations();
            ev = detail::initial_evaluator(cfg, &Mf, rng);
            ev.add_evaluations(spent);
        }
        cands.clear();
        if (!bs.swappable_positions().empty()) {
            for (int i = 0; i < cfg.grasp_candidates; ++i) {
                const int row = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(cfg.n)));
                const int j = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(m - 1)));
                if (!detail::swap_feasible_at(bs, j)) continue;
                const double phi = ev.eval_swap(row, j);
                if (std::isfinite(phi)) cands.push_back({phi, row, j, i});
            }
        }
        if (!cands.empty()) {
            const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(rcl), cands.size());
            std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end(),
                              [](const Cand& a, const Cand& b) {
                                  return a.phi < b.phi || (a.phi == b.phi && a.ord < b.ord);
                              });
            const Cand& pick = cands[rng.uniform_index(k)];
            ev.commit_swap(pick.row, pick.j);
        }
        detail::local_search_sweeps(ev, bs, rng);
        if (ev.objective() < best_phi) {
            best_phi = ev.objective();
            best = ev.design();
        }
        if (t % 10 == 0) rcl = std::max(rcl - 1, 1);
        if (cfg.collect_trace) trace.push_back(best_phi);
    }
    return detail::finish(cfg, Mf, std::move(best), ev.evaluations(), std::move(trace));
}

inline SearchResult run_search(const SearchConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::SA: return simulated_annealing(cfg);
        case Algorithm::Bubble: return bubble_sort_search(cfg);
        default: return grasp(cfg);
    }
}

} // namespace oofa
