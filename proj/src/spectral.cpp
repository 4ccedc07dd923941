#include "fibosc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace fibosc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_offdiag_domain(const DeformationParams& p) {
    if (!p.region_a())
        throw RegionViolation(region_diagnostic(p, 'A'));
    if (p.r + p.q <= 1.0)
        throw DegenerateParams("r+q > 1 required, got r+q = " + std::to_string(p.r + p.q));
}

double bisect(double lo, double hi, double f_lo, const std::function<double(double)>& f,
              double tol) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        double v = f(mid);
        if ((v >= 0.0) == (f_lo >= 0.0)) {
            lo = mid;
            f_lo = v;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

DensityMatrix invariant_state(const DeformationParams& params, int n_levels) {
    auto sd = stationary_density(params, n_levels, 1e-12);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_levels, n_levels);
    for (int n = 0; n < n_levels; ++n)
        m(n, n) = sd.weight(n);
    return DensityMatrix{std::move(m)};
}

Eigen::MatrixXcd embed_l2(const DensityMatrix& rho_inv, const Eigen::MatrixXcd& x) {
    const int n = rho_inv.dim();
    if (x.rows() != n || x.cols() != n)
        throw DimensionMismatch("embed_l2: x must match the invariant state dimension");
    double max_diag = 0.0, max_off = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            (i == j ? max_diag : max_off) = std::max(i == j ? max_diag : max_off,
                                                     std::abs(rho_inv.mat(i, j)));
    if (max_off > 1e-14 * std::max(1.0, max_diag))
        throw NonDiagonalInvariant("embed_l2: invariant state must be diagonal");

    Eigen::VectorXd quarter(n);
    for (int i = 0; i < n; ++i) {
        double w = std::real(rho_inv.mat(i, i));
        if (w < 0.0)
            throw NegativeEigenvalue("embed_l2: negative invariant weight");
        quarter(i) = std::pow(w, 0.25);
    }
    Eigen::MatrixXcd out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = quarter(i) * quarter(j) * x(i, j);
    return out;
}

OffdiagMin offdiag_minimum(const DeformationParams& params) {
    require_offdiag_domain(params);

    std::vector<double> eps{0.0, 1.0};
    const auto eps_at = [&](int n) {
        while (static_cast<int>(eps.size()) <= n) {
            double next = (params.r + params.q) * eps[eps.size() - 1] -
                          params.r * params.q * eps[eps.size() - 2];
            if (!std::isfinite(next))
                throw OverflowError("offdiag_minimum: eps overflow during search");
            eps.push_back(next);
        }
        return eps[n];
    };
    // E(|e_j><e_k|) = term(j) + term(k) with term(n) >= eps_n / 2 and eps
    // divergent, so levels past the first m with eps_m / 2 > value(0,1) cannot
    // participate in the minimum.
    const auto term = [&](int n) {
        if (n == 0)
            return 0.5 * gamma_rates(eps_at(1) - eps_at(0), params.beta).plus * eps_at(1);
        double mu = gamma_rates(eps_at(n) - eps_at(n - 1), params.beta).minus * eps_at(n);
        double lam = gamma_rates(eps_at(n + 1) - eps_at(n), params.beta).plus * eps_at(n + 1);
        return 0.5 * (mu + lam);
    };

    const double incumbent01 = term(0) + term(1);
    int cutoff = 2;
    while (0.5 * eps_at(cutoff) <= incumbent01) {
        if (++cutoff > 200000)
            throw NoConvergence("offdiag_minimum: cutoff search exceeded 200000 levels");
    }

    std::vector<double> terms(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n)
        terms[n] = term(n);

    OffdiagMin best{incumbent01, 0, 1};
    for (int j = 0; j <= cutoff; ++j)
        for (int k = j + 1; k <= cutoff; ++k)
            if (terms[j] + terms[k] < best.value)
                best = {terms[j] + terms[k], j, k};
    return best;
}

double offdiag_min_closed_form(const DeformationParams& params) {
    require_offdiag_domain(params);
    const double s = params.r + params.q;
    return 0.5 * (1.0 + 2.0 / std::expm1(params.beta) + s / std::expm1(params.beta * (s - 1.0)));
}

DiagLowerBounds diag_lower_bounds(const DeformationParams& params) {
    if (!params.region_b())
        throw RegionViolation(region_diagnostic(params, 'B'));
    DiagLowerBounds b;
    b.strong = partition_function(params) * (-std::expm1(-params.beta));
    b.weak = -std::expm1(-2.0 * params.beta);
    return b;
}

double diag_upper_alpha(const DeformationParams& params) {
    double z = partition_function(params);
    return 1.0 / (std::expm1(params.beta) * (1.0 - 1.0 / z));
}

double bose_alpha(double beta) {
    return 1.0 / (-std::expm1(-beta));
}

double bose_offdiag_min(double beta) {
    return (1.0 + 3.0 * std::exp(-beta)) / (2.0 * (-std::expm1(-beta)));
}

double bose_crossover_beta(double tol) {
    const auto f = [](double b) { return bose_offdiag_min(b) - bose_alpha(b); };
    double lo = 1e-3, hi = 20.0;
    if (f(lo) <= 0.0 || f(hi) >= 0.0)
        throw NoConvergence("bose_crossover_beta: bracket failed");
    return bisect(lo, hi, f(lo), f, tol);
}

GapReport gap_report(const DeformationParams& params, int n_levels) {
    require_offdiag_domain(params);

    auto om = offdiag_minimum(params);
    GapReport rep{params};
    rep.n_levels = n_levels;
    rep.offdiag_min = om.value;
    rep.offdiag_argmin_j = om.j;
    rep.offdiag_argmin_k = om.k;
    rep.diag_numeric = diagonal_gap_numeric(params, n_levels);
    rep.diag_upper_alpha = diag_upper_alpha(params);
    rep.gap_numeric = std::min(rep.diag_numeric, rep.offdiag_min);
    rep.region_b = params.region_b();
    if (rep.region_b) {
        auto lb = diag_lower_bounds(params);
        rep.diag_lower_strong = lb.strong;
        rep.diag_lower_weak = lb.weak;
        rep.gap_formula_paper = std::min(lb.weak, om.value);
        rep.paper_formula_below_numeric = rep.gap_formula_paper < rep.gap_numeric - 1e-8;
    } else {
        rep.diag_lower_strong = kNaN;
        rep.diag_lower_weak = kNaN;
        rep.gap_formula_paper = kNaN;
        rep.paper_formula_below_numeric = false;
    }
    rep.alpha_below_diag_numeric = rep.diag_upper_alpha < rep.diag_numeric - 1e-8;
    return rep;
}

CrossingCurves crossing_curves(double q_fixed, double r_lo, double r_hi, double beta_lo,
                               double beta_hi, int resolution, double tol) {
    if (resolution < 2)
        throw DimensionMismatch("crossing_curves: resolution must be >= 2");
    if (!(beta_lo > 0.0 && beta_hi > beta_lo))
        throw DegenerateParams("crossing_curves: need 0 < beta_lo < beta_hi");

    CrossingCurves curves;
    curves.rows.reserve(resolution);
    for (int i = 0; i < resolution; ++i) {
        double r = r_lo + (r_hi - r_lo) * i / (resolution - 1);
        CrossingCurves::Row row;
        row.r = r;
        bool admissible = false;
        try {
            DeformationParams probe(r, q_fixed, 1.0);
            admissible = probe.region_b();
        } catch (const Error&) {
            admissible = false;
        }
        if (admissible) {
            const auto offdiag = [&](double b) {
                return offdiag_min_closed_form(DeformationParams(r, q_fixed, b));
            };
            // upper curve: offdiag = 1 - e^{-2 beta}; left side decreasing,
            // right side increasing, so the sign change is unique.
            const auto f_up = [&](double b) { return offdiag(b) - (-std::expm1(-2.0 * b)); };
            double flo = f_up(beta_lo), fhi = f_up(beta_hi);
            if (flo > 0.0 && fhi < 0.0) {
                row.has_upper = true;
                row.beta_upper = bisect(beta_lo, beta_hi, flo, f_up, tol);
            }
            // lower curve: offdiag = alpha(beta, r, q); bracket by grid scan.
            const auto f_lo_fn = [&](double b) {
                return offdiag(b) - diag_upper_alpha(DeformationParams(r, q_fixed, b));
            };
            double prev_b = beta_lo, prev_v = f_lo_fn(beta_lo);
            for (int j = 1; j < resolution; ++j) {
                double b = beta_lo + (beta_hi - beta_lo) * j / (resolution - 1);
                double v = f_lo_fn(b);
                if ((prev_v >= 0.0) != (v >= 0.0)) {
                    row.has_lower = true;
                    row.beta_lower = bisect(prev_b, b, prev_v, f_lo_fn, tol);
                    break;
                }
                prev_b = b;
                prev_v = v;
            }
        }
        curves.rows.push_back(row);
    }
    return curves;
}

} // namespace fibosc
