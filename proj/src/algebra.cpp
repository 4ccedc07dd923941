#include "fibosc/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fibosc {

namespace {

constexpr double kOverflowGuard = 1e300;
constexpr int kPowerFormulaMax = 64;

double eps_power_formula(const DeformationParams& p, int n) {
    return (std::pow(p.r, n) - std::pow(p.q, n)) / (p.r - p.q);
}

} // namespace

double qr_integer(const DeformationParams& params, int n, int max_level) {
    if (n < 0)
        throw IndexError("qr_integer: n must be >= 0, got " + std::to_string(n));
    if (n > max_level)
        throw OverflowError("qr_integer: level " + std::to_string(n) + " exceeds max " +
                            std::to_string(max_level));
    if (n == 0)
        return 0.0;
    if (n == 1)
        return 1.0;
    if (n <= kPowerFormulaMax) {
        double v = eps_power_formula(params, n);
        if (!std::isfinite(v) || std::abs(v) > kOverflowGuard)
            throw OverflowError("qr_integer: eps_" + std::to_string(n) +
                                " exceeds representable range");
        return v;
    }
    // eps_{k+1} = (r+q) eps_k - rq eps_{k-1}
    const double s = params.r + params.q;
    const double p = params.r * params.q;
    double prev = eps_power_formula(params, kPowerFormulaMax - 1);
    double cur = eps_power_formula(params, kPowerFormulaMax);
    for (int k = kPowerFormulaMax; k < n; ++k) {
        double next = s * cur - p * prev;
        if (!std::isfinite(next) || std::abs(next) > kOverflowGuard)
            throw OverflowError("qr_integer: eps_" + std::to_string(k + 1) +
                                " exceeds representable range");
        prev = cur;
        cur = next;
    }
    return cur;
}

SpectrumTable SpectrumTable::build(const DeformationParams& params, int n_levels) {
    if (n_levels < 1)
        throw DimensionMismatch("SpectrumTable: n_levels must be >= 1, got " +
                                std::to_string(n_levels));
    SpectrumTable t{params, n_levels, {}, {}};
    t.eps.resize(n_levels + 1);
    t.omega.assign(n_levels + 1, 0.0);
    for (int n = 0; n <= std::min(n_levels, kPowerFormulaMax); ++n)
        t.eps[n] = qr_integer(params, n);
    const double s = params.r + params.q;
    const double p = params.r * params.q;
    for (int n = kPowerFormulaMax + 1; n <= n_levels; ++n) {
        double next = s * t.eps[n - 1] - p * t.eps[n - 2];
        if (!std::isfinite(next) || std::abs(next) > kOverflowGuard)
            throw OverflowError("SpectrumTable: eps_" + std::to_string(n) +
                                " exceeds representable range");
        t.eps[n] = next;
    }
    for (int n = 1; n <= n_levels; ++n)
        t.omega[n] = t.eps[n] - t.eps[n - 1];
    return t;
}

double SpectrumTable::eps_at(int n) const {
    if (n < 0 || n > n_levels)
        throw IndexError("eps index " + std::to_string(n) + " outside table range 0.." +
                         std::to_string(n_levels));
    return eps[n];
}

double SpectrumTable::omega_at(int n) const {
    if (n < 1 || n > n_levels)
        throw IndexError("omega index " + std::to_string(n) + " outside table range 1.." +
                         std::to_string(n_levels));
    return omega[n];
}

double bohr_frequency(const SpectrumTable& table, int n) {
    return table.omega_at(n);
}

MonotonicityReport monotonicity_report(const DeformationParams& params, int n_check, double c) {
    if (n_check < 3)
        throw DimensionMismatch("monotonicity_report: n_check must be >= 3");
    if (c < 0.0)
        throw DegenerateParams("monotonicity_report: c must be >= 0");

    const auto table = SpectrumTable::build(params, n_check);
    const auto tol = [&](double x) { return 1e-12 * std::max(1.0, std::abs(x)); };

    MonotonicityReport rep;
    rep.c = c;

    rep.eps_nondecreasing.scan = true;
    for (int n = 1; n <= n_check; ++n) {
        if (table.eps[n] - table.eps[n - 1] < -tol(table.eps[n])) {
            rep.eps_nondecreasing.scan = false;
            rep.eps_nondecreasing.disagreement_level = n;
            break;
        }
    }
    rep.eps_nondecreasing.closed_form = params.r + params.q >= 1.0;

    rep.omega_nondecreasing.scan = true;
    for (int n = 2; n <= n_check; ++n) {
        if (table.omega[n] - table.omega[n - 1] < -tol(table.omega[n])) {
            rep.omega_nondecreasing.scan = false;
            rep.omega_nondecreasing.disagreement_level = n;
            break;
        }
    }
    rep.omega_nondecreasing.closed_form = params.r + params.q >= 2.0;

    // eps_k/omega_k >= 1 + 1/(r+q+c) for k >= 2; checked as
    // eps_k (r+q+c) >= (r+q+c+1) omega_k to avoid dividing by small omega.
    rep.ratio_bound.scan = true;
    const double s = params.r + params.q;
    for (int k = 2; k <= n_check; ++k) {
        double lhs = table.eps[k] * (s + c);
        double rhs = (s + c + 1.0) * table.omega[k];
        if (lhs - rhs < -tol(rhs)) {
            rep.ratio_bound.scan = false;
            rep.ratio_bound.disagreement_level = k;
            break;
        }
    }
    rep.ratio_bound.closed_form = (1.0 + c) * s + params.r * params.q >= 0.0;

    const auto finalize = [](DualVerdict& v) {
        if (v.agree())
            v.disagreement_level = -1;
    };
    finalize(rep.eps_nondecreasing);
    finalize(rep.omega_nondecreasing);
    finalize(rep.ratio_bound);
    return rep;
}

LadderMatrices ladder_matrices(const SpectrumTable& table) {
    const int n = table.n_levels;
    for (int k = 0; k < n; ++k)
        if (table.eps[k] < 0.0)
            throw NegativeEigenvalue("eps_" + std::to_string(k) + " = " +
                                     std::to_string(table.eps[k]) + " < 0");
    LadderMatrices m;
    m.dim = n;
    m.a = Eigen::MatrixXd::Zero(n, n);
    m.number_op = Eigen::MatrixXd::Zero(n, n);
    m.h_s = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k)
        m.a(k - 1, k) = std::sqrt(table.eps[k]);
    m.a_dag = m.a.transpose();
    for (int k = 0; k < n; ++k) {
        m.number_op(k, k) = static_cast<double>(k);
        m.h_s(k, k) = table.eps[k];
    }
    return m;
}

CommutationResiduals commutation_residuals(const LadderMatrices& mats,
                                           const DeformationParams& params) {
    const int n = mats.dim;
    if (n < 3)
        throw DimensionMismatch("commutation_residuals: need N >= 3 to exclude the boundary");

    const Eigen::MatrixXd lower = mats.a * mats.a_dag;
    const Eigen::MatrixXd upper = mats.a_dag * mats.a;

    CommutationResiduals res;
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n - 1; ++j) {
            double qn = (i == j) ? std::pow(params.q, i) : 0.0;
            double rn = (i == j) ? std::pow(params.r, i) : 0.0;
            double scale_r = std::max({1.0, std::abs(lower(i, j)),
                                       std::abs(params.r * upper(i, j)), std::abs(qn)});
            double scale_q = std::max({1.0, std::abs(lower(i, j)),
                                       std::abs(params.q * upper(i, j)), std::abs(rn)});
            res.res_r = std::max(res.res_r,
                                 std::abs(lower(i, j) - params.r * upper(i, j) - qn) / scale_r);
            res.res_q = std::max(res.res_q,
                                 std::abs(lower(i, j) - params.q * upper(i, j) - rn) / scale_q);
        }
    }
    return res;
}

} // namespace fibosc
