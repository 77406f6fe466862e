#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "oofa/criteria.hpp"

namespace oofa {

//! Result of one brute-force check against a closed form or theorem.
struct OracleReport {
    std::string scenario;
    double max_deviation = 0.0;
    bool pass = false;
    std::string counterexample; // non-empty iff !pass
};

//! Ground-truth moment matrix by full enumeration; exact integer
//! accumulation with a single final division. Never touches the closed-form
//! constructions it is used to validate.
inline MomentMatrix brute_force_moment(const ModelSpec& spec, std::uint64_t cap = 500000) {
    return moment_by_enumeration(spec, cap);
}

namespace detail {

//! All compositions of m into ordered parts of size >= min_part.
inline std::vector<std::vector<int>> compositions(int m, int min_part) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int rest) -> void {
        if (rest == 0) {
            out.push_back(cur);
            return;
        }
        for (int part = min_part; part <= rest; ++part) {
            cur.push_back(part);
            self(self, rest - part);
            cur.pop_back();
        }
    };
    rec(rec, m);
    return out;
}

inline OracleReport compare_moments(const std::string& scenario, const MomentMatrix& closed,
                                    const MomentMatrix& brute, double tol = 1e-12) {
    OracleReport r;
    r.scenario = scenario;
    r.max_deviation = max_abs_diff(closed.values, brute.values);
    r.pass = r.max_deviation < tol && closed.labels == brute.labels;
    if (!r.pass) {
        std::ostringstream os;
        if (closed.labels != brute.labels) {
            os << "column label mismatch";
        } else {
            for (int i = 0; i < closed.size() && os.str().empty(); ++i)
                for (int j = 0; j < closed.size(); ++j)
                    if (std::abs(closed.values(i, j) - brute.values(i, j)) == r.max_deviation) {
                        os << "entry (" << closed.labels[i].str() << ", " << closed.labels[j].str()
                           << "): closed " << closed.values(i, j) << " vs enumerated " << brute.values(i, j);
                        break;
                    }
        }
        r.counterexample = os.str();
    }
    return r;
}

} // namespace detail

//! Compare every closed-form construction against brute-force enumeration:
//! TE1 for m = 3..max_m, TE2 for m = 5..max_m, and the blocked TE1/TE2
//! forms for every multi-block composition into parts >= 2 of m up to
//! max_m + 1 (capped at 7).
inline std::vector<OracleReport> verify_closed_forms(int max_m) {
    if (max_m > 7) throw invalid_input("verify_closed_forms supports max_m <= 7");
    std::vector<OracleReport> out;
    for (int m = 3; m <= max_m; ++m)
        out.push_back(detail::compare_moments(
            "te1 m=" + std::to_string(m), full_moment_te1(m),
            brute_force_moment(ModelSpec::make(ModelKind::TE1, BlockStructure::single(m)))));
    for (int m = 5; m <= max_m; ++m)
        out.push_back(detail::compare_moments(
            "te2 m=" + std::to_string(m), full_moment_te2(m),
            brute_force_moment(ModelSpec::make(ModelKind::TE2, BlockStructure::single(m)))));
    const int blocked_max = std::min(max_m + 1, 7);
    for (int m = 2; m <= blocked_max; ++m) {
        for (const auto& sizes : detail::compositions(m, 2)) {
            const BlockStructure bs = BlockStructure::from_sizes(sizes);
            std::string name;
            for (std::size_t i = 0; i < sizes.size(); ++i)
                name += (i ? "," : "(") + std::to_string(sizes[i]);
            name += ")";
            out.push_back(detail::compare_moments(
                "te1 blocked " + name, full_moment_te1_blocked(bs),
                brute_force_moment(ModelSpec::make(ModelKind::TE1, bs))));
            // a lone block is the unconstrained case, where the length-2
            // model requires m >= 5
            if (sizes.size() > 1 || m >= 5)
                out.push_back(detail::compare_moments(
                    "te2 blocked " + name, full_moment_te2_blocked(bs),
                    brute_force_moment(ModelSpec::make(ModelKind::TE2, bs))));
        }
    }
    return out;
}

//! Corollary-1 check: in the unconstrained case no random design beats the
//! full design on relative D- or I-efficiency (tolerance 1e-9).
inline OracleReport check_full_design_optimality(const ModelSpec& spec, int n_trials, Rng& rng) {
    if (!spec.blocks().unconstrained())
        throw invalid_input("full-design optimality holds only without block constraints");
    const MomentMatrix Mf = brute_force_moment(spec);
    const auto N = static_cast<int>(feasible_count(spec.blocks()));
    const int p = spec.column_count();
    OracleReport r;
    r.scenario = "full-design optimality " + to_string(spec.kind()) + " m=" + std::to_string(spec.m());
    double worst = 0.0;
    for (int t = 0; t < n_trials; ++t) {
        const int n = p + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(N - p + 1)));
        std::vector<Permutation> design;
        design.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) design.push_back(random_feasible(spec.blocks(), rng));
        const MomentMatrix M = moment_of_design(design, spec);
        double rd = relative_efficiency(M, Mf, Criterion::D);
        worst = std::max(worst, rd - 1.0);
        if (Cholesky::factor(M.values).singular()) continue; // D-eff 0; no I to measure
        double ri = relative_efficiency(M, Mf, Criterion::I);
        worst = std::max(worst, ri - 1.0);
        if (rd > 1.0 + 1e-9 || ri > 1.0 + 1e-9) {
            r.counterexample =
                "trial " + std::to_string(t) + ": relative D " + std::to_string(rd) + ", I " + std::to_string(ri);
        }
    }
    r.max_deviation = std::max(worst, 0.0);
    r.pass = r.counterexample.empty();
    return r;
}

//! Lemma-1 machinery: relabeling every run of a design leaves the D- and
//! I-criteria unchanged (within 1e-10, relative to the criterion magnitude;
//! ill-conditioned random designs produce arbitrarily large I values whose
//! trailing digits are not representable). The I comparison skips draws with
//! a condition estimate above 1e5; past that the solve cannot certify ten
//! digits of a quantity the data do not determine to ten digits.
inline OracleReport check_relabeling_invariance(const ModelSpec& spec, int n_trials, Rng& rng) {
    if (!spec.blocks().unconstrained())
        throw invalid_input("relabeling invariance is checked in the unconstrained case");
    const MomentMatrix Mf = brute_force_moment(spec);
    const int m = spec.m();
    const int p = spec.column_count();
    OracleReport r;
    r.scenario = "relabeling invariance " + to_string(spec.kind()) + " m=" + std::to_string(m);
    double worst = 0.0;
    for (int t = 0; t < n_trials; ++t) {
        const int n = p + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(p)));
        std::vector<Permutation> design, relabeled;
        const Permutation pi = random_feasible(spec.blocks(), rng); // a relabeling map
        for (int i = 0; i < n; ++i) {
            Permutation a = random_feasible(spec.blocks(), rng);
            Permutation b = a;
            for (int x = 0; x < m; ++x) b.order[x] = pi.order[a.order[x] - 1];
            design.push_back(std::move(a));
            relabeled.push_back(std::move(b));
        }
        const MomentMatrix M1 = moment_of_design(design, spec);
        const MomentMatrix M2 = moment_of_design(relabeled, spec);
        const double d1 = d_criterion(M1);
        worst = std::max(worst, std::abs(d1 - d_criterion(M2)) / std::max(1.0, std::abs(d1)));
        const Cholesky ch1 = Cholesky::factor(M1.values), ch2 = Cholesky::factor(M2.values);
        if (ch1.ok && ch2.ok && std::min(rcond_1norm(M1.values, ch1), rcond_1norm(M2.values, ch2)) > 1e-5) {
            const double i1 = i_criterion(M1, Mf);
            worst = std::max(worst, std::abs(i1 - i_criterion(M2, Mf)) / std::max(1.0, std::abs(i1)));
        }
        if (worst >= 1e-10 && r.counterexample.empty()) {
            std::ostringstream os;
            os << "trial " << t << ": relative criterion shift " << worst;
            r.counterexample = os.str();
        }
    }
    r.max_deviation = worst;
    r.pass = worst < 1e-10;
    return r;
}

} // namespace oofa
