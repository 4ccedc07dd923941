// generator.hpp — truncated GKLS generator: thermal rates, rank-one Kraus
// operators, the diagonal operator G, primal/predual application and the
// closed-form off-diagonal eigenvalues.

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fibosc/algebra.hpp"

namespace fibosc {

// Planck factors at inverse temperature beta for a single positive frequency.
// Overflow-safe: beta*omega up to ~1e308 returns (1, 0) gracefully, and
// gamma_minus - gamma_plus = 1 holds exactly by construction.
struct GammaPair {
    double minus = 0.0; // e^{bw}/(e^{bw}-1) > 1
    double plus = 0.0;  // 1/(e^{bw}-1) > 0
};

GammaPair gamma_rates(double omega, double beta);

// Gamma^∓_n evaluated at omega_n for n = 1..N, plus the Hamiltonian constants
// kappa^∓_n (all zero by default; only the imaginary parts of the off-diagonal
// eigenvalues see them).
struct RateTable {
    int n_levels = 0;
    std::vector<double> gamma_minus; // index 1..N, [0] unused
    std::vector<double> gamma_plus;
    std::vector<double> kappa_minus;
    std::vector<double> kappa_plus;
};

RateTable make_rate_table(const SpectrumTable& table,
                          std::optional<std::vector<double>> kappa_minus = std::nullopt,
                          std::optional<std::vector<double>> kappa_plus = std::nullopt);

// Hermitian, unit-trace, positive semidefinite matrix on the truncation.
// checked() validates (hermiticity 1e-12, trace 1e-10, eigenvalues >= -1e-10).
struct DensityMatrix {
    Eigen::MatrixXcd mat;

    int dim() const { return static_cast<int>(mat.rows()); }

    static DensityMatrix checked(Eigen::MatrixXcd m, double herm_tol = 1e-12,
                                 double trace_tol = 1e-10, double psd_tol = 1e-10);
};

// The truncated generator. Reflecting boundary: the top level keeps only
// in-truncation terms (no Gamma^+_N eps_N outflow, no ladder term to level N),
// which preserves trace and stationarity of the truncated invariant state
// exactly. Never materialized as an N^2 x N^2 matrix; applied in O(N^2).
struct TruncatedGenerator {
    DeformationParams params;
    int dim = 0;
    SpectrumTable table; // eps_0..eps_N
    RateTable rates;
    std::vector<std::complex<double>> g_diag; // g_n per the displayed G; g[N-1] flagged
    struct KrausTerm {
        double coeff = 0.0; // sqrt(Gamma eps)
        int from = 0;       // level annihilated
        int to = 0;         // level created
    };
    std::vector<KrausTerm> kraus; // down (l -> l-1) and up (l-1 -> l), l = 1..N-1
};

TruncatedGenerator build_generator(const DeformationParams& params, int n_levels,
                                   std::optional<std::vector<double>> kappa_minus = std::nullopt,
                                   std::optional<std::vector<double>> kappa_plus = std::nullopt);

// Heisenberg action: G x + sum_l L_l^* x L_l + x G^*. On the truncation
// interior this is the exact GKLS form; off-diagonal units are eigenvectors.
Eigen::MatrixXcd apply_primal(const TruncatedGenerator& gen, const Eigen::MatrixXcd& x);

// Predual (Schrödinger) action: G^* rho + sum_l L_l rho L_l^* + rho G.
// Trace of the output vanishes identically on the reflecting truncation.
Eigen::MatrixXcd apply_predual(const TruncatedGenerator& gen, const Eigen::MatrixXcd& rho);

// Closed-form eigenvalue of |e_j><e_k| (j != k), no truncation involved:
//     i(k-_j - k-_k + k+_{j+1} - k+_{k+1})
//   - (G-_j eps_j + G+_{j+1} eps_{j+1} + G-_k eps_k + G+_{k+1} eps_{k+1}) / 2
// with the convention Gamma^-_0 eps_0 = 0. kappas beyond the rate table are 0.
std::complex<double> offdiag_eigenvalue(const TruncatedGenerator& gen, int j, int k);

} // namespace fibosc
