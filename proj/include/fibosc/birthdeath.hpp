// birthdeath.hpp — classical birth-death embedding of the diagonal dynamics:
// rates, stationary measure, Karlin-McGregor conservativity, symmetrized
// tridiagonal generator, numerical diagonal gap and the partial-sum
// inequality validators.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fibosc/algebra.hpp"
#include "fibosc/tridiag.hpp"

namespace fibosc {

// lambda_n = Gamma^+_{n+1} eps_{n+1} (births), mu_n = Gamma^-_n eps_n (deaths),
// log pi_n = -beta eps_n. Reflecting truncation: lambda[N-1] = 0.
struct BDChain {
    int n_levels = 0;
    std::vector<double> lambda; // n = 0..N-1
    std::vector<double> mu;     // n = 0..N-1, mu[0] = 0
    std::vector<double> log_pi; // unnormalized, -beta eps_n

    static BDChain build(const DeformationParams& params, int n_levels);
};

struct BDRates {
    double lambda = 0.0;
    std::optional<double> mu; // absent at n = 0
};

// Single-level rates; params must lie in region_A with r+q > 1 strictly.
BDRates bd_rates(const DeformationParams& params, int n);

// Bose reference limit r,q -> 1: lambda_n = (n+1)/(e^b-1), mu_n = n e^b/(e^b-1).
BDRates bd_rates_bose(double beta, int n);

// Full partition function Z_beta = sum_n e^{-beta eps_n}, summed to convergence
// (certified geometric tail cutoff). Always >= 1 + e^{-beta}.
double partition_function(const DeformationParams& params);

// Rigorous upper bound on sum_{y >= n_levels} pi_y. Valid on all of region_A
// with r+q > 1: sums explicitly up to a certified index past which omega is
// increasing, then applies the geometric tail bound.
double stationary_tail_bound(const DeformationParams& params, int n_levels);

// Normalized stationary weights on the truncation, kept in log domain.
// log_weights are normalized by the truncated sum (so they sum to 1 exactly,
// making the reflecting-truncation kernel exact); Z_beta is the full series.
struct StationaryDensity {
    std::vector<double> log_weights; // log pi~_n, n = 0..N-1
    double Z_beta = 0.0;             // full series
    double Z_truncated = 0.0;        // sum over the truncation
    double tail_bound = 0.0;         // bound on the mass above the truncation

    double weight(int n) const;      // pi~_n
};

StationaryDensity stationary_density(const DeformationParams& params, int n_levels,
                                     double tail_rel_tol = 1e-8);

// Karlin-McGregor partial sums S_m = sum_{n<=m} (1/(lambda_n pi_n)) sum_{k<=n} pi_k.
// Terms grow like e^{beta eps_n}, so everything is carried in log domain.
// The divergence verdict is numerical evidence (term growth), backed by the
// conservativity theorem; it is labelled consistent-with-divergence, not proof.
struct KMReport {
    std::vector<double> log_terms;        // log of term n, n = 1..n_terms
    std::vector<double> log_partial_sums; // log S_m
    bool consistent_with_divergence = false;
    double witness_rate = 0.0; // min of the last-10 log-term increments
};

KMReport km_conservativity(const DeformationParams& params, int n_terms);

// sum_n pi~_n lambda_n (f_{n+1}-f_n)^2 over the truncation (boundary term at
// N-1 dropped, consistent with the reflecting truncation).
double dirichlet_form_classical(const BDChain& chain, std::span<const double> f);

// Similarity-symmetrized generator: diag = lambda_n + mu_n,
// offdiag = -sqrt(lambda_n mu_{n+1}). Positive semidefinite with simple
// eigenvalue 0 and kernel vector sqrt(pi~_n).
SymTridiag symmetrized_tridiagonal(const BDChain& chain);

// Second-smallest eigenvalue of the symmetrized tridiagonal, relative accuracy
// 1e-10. Requires the stationary tail below 1e-12 * Z at the truncation.
double diagonal_gap_numeric(const DeformationParams& params, int n_levels);

// Appendix inequality validators (region_B required). Margins are >= 0 when
// the inequality holds; ratio-form margins are 1 - LHS/RHS.
struct AppendixAReport {
    struct Row {
        int u = 0;
        double a1_margin = 0.0;         // 1 - ratio  (Lemma A.1)
        double a2_weighted_slack = 0.0; // RHS - LHS  (Lemma A.2, weighted sum; u >= 1)
        double a2_plain_slack = 0.0;    // RHS - LHS  (Lemma A.2, plain sum)
        double a3_lower_log_slack = 0.0; // log sum - log pi_{u+1} (Lemma A.3 lower)
        double a3_upper_margin = 0.0;    // 1 - ratio (Lemma A.3 upper)

        bool holds() const {
            return a1_margin >= 0.0 && a2_weighted_slack >= 0.0 && a2_plain_slack >= 0.0 &&
                   a3_lower_log_slack >= 0.0 && a3_upper_margin >= 0.0;
        }
    };
    std::vector<Row> rows;
    bool all_hold = false;
};

AppendixAReport appendix_a_validators(const DeformationParams& params, int u_max);

} // namespace fibosc
