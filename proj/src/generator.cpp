#include "fibosc/generator.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace fibosc {

GammaPair gamma_rates(double omega, double beta) {
    if (!(omega > 0.0))
        throw DegenerateFrequency("gamma_rates: omega must be > 0, got " +
                                  std::to_string(omega) + " (r+q = 1 boundary?)");
    if (!(beta > 0.0))
        throw DegenerateParams("gamma_rates: beta must be > 0");
    const double x = beta * omega;
    GammaPair g;
    // 1/expm1 overflows its argument near x ~ 709; past that gamma_plus is
    // below double's smallest normal anyway.
    g.plus = (x < 700.0) ? 1.0 / std::expm1(x) : std::exp(-x);
    g.minus = 1.0 + g.plus; // keeps gamma_minus - gamma_plus = 1 exact
    return g;
}

namespace {

// Gamma^-_n eps_n and Gamma^+_n eps_n in overflow-safe form (never forms
// e^{+beta omega}).
double mu_term(const SpectrumTable& t, int n) {
    if (n == 0)
        return 0.0; // Gamma^-_0 eps_0 convention
    return gamma_rates(t.omega_at(n), t.params.beta).minus * t.eps_at(n);
}

double lambda_term(const SpectrumTable& t, int n) {
    if (n == 0)
        return 0.0;
    return gamma_rates(t.omega_at(n), t.params.beta).plus * t.eps_at(n);
}

void require_square(const Eigen::MatrixXcd& m, int dim, const char* who) {
    if (m.rows() != dim || m.cols() != dim)
        throw DimensionMismatch(std::string(who) + ": expected " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " matrix");
}

} // namespace

RateTable make_rate_table(const SpectrumTable& table, std::optional<std::vector<double>> kappa_minus,
                          std::optional<std::vector<double>> kappa_plus) {
    const int n = table.n_levels;
    RateTable r;
    r.n_levels = n;
    r.gamma_minus.assign(n + 1, 0.0);
    r.gamma_plus.assign(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
        auto g = gamma_rates(table.omega_at(k), table.params.beta);
        r.gamma_minus[k] = g.minus;
        r.gamma_plus[k] = g.plus;
    }
    const auto fit = [n](std::optional<std::vector<double>>&& in, const char* name) {
        std::vector<double> v = in ? std::move(*in) : std::vector<double>{};
        if (!v.empty() && static_cast<int>(v.size()) != n + 1)
            throw DimensionMismatch(std::string(name) + " must have n_levels+1 entries (index 0 unused)");
        v.resize(n + 1, 0.0);
        return v;
    };
    r.kappa_minus = fit(std::move(kappa_minus), "kappa_minus");
    r.kappa_plus = fit(std::move(kappa_plus), "kappa_plus");
    return r;
}

DensityMatrix DensityMatrix::checked(Eigen::MatrixXcd m, double herm_tol, double trace_tol,
                                     double psd_tol) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw DimensionMismatch("DensityMatrix: matrix must be square and nonempty");
    double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol)
        throw DegenerateParams("DensityMatrix: hermiticity residual " + std::to_string(herm));
    double tr = std::abs(m.trace() - std::complex<double>(1.0, 0.0));
    if (tr > trace_tol)
        throw DegenerateParams("DensityMatrix: trace residual " + std::to_string(tr));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw NegativeEigenvalue("DensityMatrix: min eigenvalue " +
                                 std::to_string(es.eigenvalues().minCoeff()));
    return DensityMatrix{std::move(m)};
}

TruncatedGenerator build_generator(const DeformationParams& params, int n_levels,
                                   std::optional<std::vector<double>> kappa_minus,
                                   std::optional<std::vector<double>> kappa_plus) {
    if (n_levels < 2)
        throw DimensionMismatch("build_generator: need at least two levels");
    if (!params.region_a())
        throw RegionViolation(region_diagnostic(params, 'A'));
    if (params.r + params.q <= 1.0)
        throw DegenerateParams("r+q > 1 required (omega_2 = 0 makes the rates diverge), got r+q = " +
                               std::to_string(params.r + params.q));

    auto table = SpectrumTable::build(params, n_levels);
    auto rates = make_rate_table(table, std::move(kappa_minus), std::move(kappa_plus));

    TruncatedGenerator gen{params, n_levels, std::move(table), std::move(rates), {}, {}};
    gen.g_diag.resize(n_levels);
    for (int n = 0; n < n_levels; ++n) {
        double im = gen.rates.kappa_minus[n] + (n + 1 <= n_levels ? gen.rates.kappa_plus[n + 1] : 0.0);
        double re = -0.5 * mu_term(gen.table, n);
        if (n + 1 <= n_levels - 1) // reflecting: top level keeps in-truncation terms only
            re -= 0.5 * lambda_term(gen.table, n + 1);
        gen.g_diag[n] = {re, im};
    }
    gen.kraus.reserve(2 * (n_levels - 1));
    for (int l = 1; l <= n_levels - 1; ++l) {
        gen.kraus.push_back({std::sqrt(mu_term(gen.table, l)), l, l - 1});
        gen.kraus.push_back({std::sqrt(lambda_term(gen.table, l)), l - 1, l});
    }
    return gen;
}

Eigen::MatrixXcd apply_primal(const TruncatedGenerator& gen, const Eigen::MatrixXcd& x) {
    require_square(x, gen.dim, "apply_primal");
    Eigen::MatrixXcd out(gen.dim, gen.dim);
    for (int j = 0; j < gen.dim; ++j)
        for (int k = 0; k < gen.dim; ++k)
            out(j, k) = (gen.g_diag[j] + std::conj(gen.g_diag[k])) * x(j, k);
    // L^* x L for L = c |to><from| contributes c^2 x(to,to) at (from, from)
    for (const auto& t : gen.kraus)
        out(t.from, t.from) += t.coeff * t.coeff * x(t.to, t.to);
    return out;
}

Eigen::MatrixXcd apply_predual(const TruncatedGenerator& gen, const Eigen::MatrixXcd& rho) {
    require_square(rho, gen.dim, "apply_predual");
    Eigen::MatrixXcd out(gen.dim, gen.dim);
    for (int j = 0; j < gen.dim; ++j)
        for (int k = 0; k < gen.dim; ++k)
            out(j, k) = (std::conj(gen.g_diag[j]) + gen.g_diag[k]) * rho(j, k);
    // L rho L^* for L = c |to><from| contributes c^2 rho(from,from) at (to, to)
    for (const auto& t : gen.kraus)
        out(t.to, t.to) += t.coeff * t.coeff * rho(t.from, t.from);
    return out;
}

std::complex<double> offdiag_eigenvalue(const TruncatedGenerator& gen, int j, int k) {
    if (j == k)
        throw InvalidPair("offdiag_eigenvalue: j and k must differ");
    if (j < 0 || k < 0)
        throw IndexError("offdiag_eigenvalue: negative level index");

    const auto& p = gen.params;
    // Closed form needs no truncation; extend eps on demand.
    const auto eps = [&](int n) { return qr_integer(p, n); };
    const auto gamma_eps = [&](int n) -> std::pair<double, double> {
        if (n == 0)
            return {0.0, 0.0};
        double e_n = eps(n);
        auto g = gamma_rates(e_n - eps(n - 1), p.beta);
        return {g.minus * e_n, g.plus * e_n};
    };
    const auto kappa = [&](const std::vector<double>& arr, int n) {
        return (n >= 1 && n < static_cast<int>(arr.size())) ? arr[n] : 0.0;
    };

    double re = -0.5 * (gamma_eps(j).first + gamma_eps(j + 1).second + gamma_eps(k).first +
                        gamma_eps(k + 1).second);
    double im = kappa(gen.rates.kappa_minus, j) - kappa(gen.rates.kappa_minus, k) +
                kappa(gen.rates.kappa_plus, j + 1) - kappa(gen.rates.kappa_plus, k + 1);
    return {re, im};
}

} // namespace fibosc
