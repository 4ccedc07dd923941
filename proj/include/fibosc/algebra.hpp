// algebra.hpp — (q,r)-integer sequence, Bohr frequencies, monotonicity
// predicates and truncated ladder-operator matrices.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fibosc/params.hpp"

namespace fibosc {

// eps_n = (r^n - q^n)/(r - q), with eps_0 = 0 and eps_1 = 1 returned exactly.
// Power formula for n <= 64, recurrence above (exact in the field generated by
// r+q and rq, so no cancellation when |q| is close to r).
// Throws OverflowError once eps exceeds ~1e300 or n > max_level.
double qr_integer(const DeformationParams& params, int n, int max_level = 1024);

// eps_0..eps_N plus the nearest-neighbour gaps omega_1..omega_N.
struct SpectrumTable {
    DeformationParams params;
    int n_levels;             // N
    std::vector<double> eps;  // size N+1, eps[n]
    std::vector<double> omega; // size N+1, omega[n] = eps[n]-eps[n-1] for n>=1; omega[0] unused

    static SpectrumTable build(const DeformationParams& params, int n_levels);

    double eps_at(int n) const;
    // omega_n = eps_n - eps_{n-1}; valid for 1 <= n <= N.
    double omega_at(int n) const;
};

// Convenience wrapper with the spec's range checking.
double bohr_frequency(const SpectrumTable& table, int n);

// Scan-vs-closed-form dual verdict for one monotonicity predicate.
struct DualVerdict {
    bool scan = false;         // numeric scan over levels
    bool closed_form = false;  // the paper's iff-condition
    int disagreement_level = -1;

    bool agree() const { return scan == closed_form; }
};

// Three predicates checked both numerically (levels 1..n_check, tolerance
// 1e-12 * max(1,|eps_n|)) and analytically:
//   eps non-decreasing        <=>  r+q >= 1
//   omega non-decreasing      <=>  r+q >= 2
//   eps_k/omega_k >= 1+1/(r+q+c) for k >= 2   <=>  (1+c)(r+q)+rq >= 0
// The ratio predicate's iff holds under the hypothesis r+q >= 2.
struct MonotonicityReport {
    DualVerdict eps_nondecreasing;
    DualVerdict omega_nondecreasing;
    DualVerdict ratio_bound;
    double c = 1.0;

    bool all_agree() const {
        return eps_nondecreasing.agree() && omega_nondecreasing.agree() && ratio_bound.agree();
    }
};

MonotonicityReport monotonicity_report(const DeformationParams& params, int n_check,
                                       double c = 1.0);

// Truncated ladder operators: a has sqrt(eps_n) at (n-1, n), a_dag is its
// transpose, h_s = a_dag * a = diag(eps_0..eps_{N-1}).
struct LadderMatrices {
    int dim = 0;
    Eigen::MatrixXd a;
    Eigen::MatrixXd a_dag;
    Eigen::MatrixXd number_op;
    Eigen::MatrixXd h_s;
};

LadderMatrices ladder_matrices(const SpectrumTable& table);

// Max-norm residuals of a a† − r a†a − q^N and a a† − q a†a − r^N on the
// truncation interior (rows/cols 0..N-2; the top level is truncation-polluted).
// Residuals are scale-relative: |R| / max(1, magnitude of contributing terms),
// the same convention as the recurrence residual bound on SpectrumTable.
struct CommutationResiduals {
    double res_r = 0.0;
    double res_q = 0.0;
};

CommutationResiduals commutation_residuals(const LadderMatrices& mats,
                                           const DeformationParams& params);

} // namespace fibosc
