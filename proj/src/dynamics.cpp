#include "fibosc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace fibosc {

namespace {

// log pi~_n over the truncation (renormalized; exact kernel of the reflecting
// generator, so distances are measured to the true truncated fixed point).
std::vector<double> truncated_log_weights(const TruncatedGenerator& gen) {
    std::vector<double> lw(gen.dim);
    double z = 0.0;
    for (int n = 0; n < gen.dim; ++n)
        z += std::exp(-gen.params.beta * gen.table.eps[n]);
    double log_z = std::log(z);
    for (int n = 0; n < gen.dim; ++n)
        lw[n] = -gen.params.beta * gen.table.eps[n] - log_z;
    return lw;
}

// || rho^{-1/4} delta rho^{-1/4} ||_HS with diagonal weights exp(lw). Entries
// combine in log space; exact zeros are skipped so underflowed layers cannot
// poison the sum with 0 * inf.
double weighted_l2(const Eigen::MatrixXcd& delta, const std::vector<double>& lw) {
    const int n = static_cast<int>(delta.rows());
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double a = std::abs(delta(i, j));
            if (a == 0.0)
                continue;
            acc += std::exp(2.0 * std::log(a) - 0.5 * (lw[i] + lw[j]));
        }
    }
    return std::sqrt(acc);
}

double trace_norm_distance(const Eigen::MatrixXcd& delta) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(delta, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace

double stable_dt(const TruncatedGenerator& gen) {
    std::vector<double> outflow(gen.dim, 0.0);
    for (const auto& t : gen.kraus)
        outflow[t.from] += t.coeff * t.coeff;
    double max_rate = *std::max_element(outflow.begin(), outflow.end());
    return 0.1 / std::max(max_rate, 1e-300);
}

Trajectory evolve(const TruncatedGenerator& gen, const DensityMatrix& rho0, double t_max,
                  double dt, int max_samples) {
    const int n = gen.dim;
    if (rho0.dim() != n)
        throw DimensionMismatch("evolve: state dimension does not match the generator");
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw StabilityViolation("evolve: need dt > 0 and t_max > 0");
    if (dt > stable_dt(gen) * (1.0 + 1e-12))
        throw StabilityViolation("evolve: dt exceeds the stability bound 0.1/max(lambda+mu)");
    double boundary_mass = std::real(rho0.mat(n - 1, n - 1)) +
                           (n >= 2 ? std::real(rho0.mat(n - 2, n - 2)) : 0.0);
    if (boundary_mass > 1e-10)
        throw TruncationLeak("evolve: initial state carries " + std::to_string(boundary_mass) +
                             " mass on the top two levels");

    const auto lw = truncated_log_weights(gen);
    Eigen::MatrixXcd rho_inv = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        rho_inv(i, i) = std::exp(lw[i]);

    const long steps = static_cast<long>(std::ceil(t_max / dt));
    const long stride = std::max<long>(1, (steps + max_samples - 1) / max_samples);

    Trajectory traj;
    traj.dt = dt;
    traj.steps = steps;

    Eigen::MatrixXcd rho = rho0.mat;
    const auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(rho);
        Eigen::MatrixXcd delta = rho - rho_inv;
        traj.l2_distances.push_back(weighted_l2(delta, lw));
        traj.trace_distances.push_back(trace_norm_distance(delta));
        traj.min_eigenvalues.push_back(min_eigenvalue(rho));
        traj.traces.push_back(std::real(rho.trace()));
    };
    record(0.0);

    for (long s = 1; s <= steps; ++s) {
        Eigen::MatrixXcd k1 = apply_predual(gen, rho);
        Eigen::MatrixXcd k2 = apply_predual(gen, rho + (0.5 * dt) * k1);
        Eigen::MatrixXcd k3 = apply_predual(gen, rho + (0.5 * dt) * k2);
        Eigen::MatrixXcd k4 = apply_predual(gen, rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint()).eval();

        double drift = std::abs(std::real(rho.trace()) - 1.0);
        traj.trace_drift = std::max(traj.trace_drift, drift);
        if (drift > 1e-6)
            throw StabilityViolation("evolve: trace drift " + std::to_string(drift) +
                                     " at step " + std::to_string(s));
        double top = std::real(rho(n - 1, n - 1));
        if (top > 1e-6)
            throw TruncationLeak("evolve: top-level mass " + std::to_string(top) + " at step " +
                                 std::to_string(s));
        if (s % stride == 0 || s == steps)
            record(s * dt);
    }
    return traj;
}

double decay_rate_fit(const Trajectory& traj, double tail_fraction) {
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw DimensionMismatch("decay_rate_fit: tail_fraction must lie in (0, 1]");
    const std::size_t n = traj.l2_distances.size();
    if (n < 4)
        throw InsufficientDecay("decay_rate_fit: too few samples");
    double d0 = traj.l2_distances.front();
    double dN = traj.l2_distances.back();
    if (!(d0 > 0.0) || !(dN < 1e-3 * d0))
        throw InsufficientDecay("decay_rate_fit: final distance did not drop below 1e-3 of initial");

    std::size_t start = n - std::max<std::size_t>(3, static_cast<std::size_t>(tail_fraction * n));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (std::size_t i = start; i < n; ++i) {
        double d = traj.l2_distances[i];
        if (!(d > 0.0) || !std::isfinite(d))
            continue;
        double x = traj.times[i], y = std::log(d);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3)
        throw InsufficientDecay("decay_rate_fit: too few usable samples in the tail window");
    double denom = m * sxx - sx * sx;
    if (denom <= 0.0)
        throw InsufficientDecay("decay_rate_fit: degenerate time window");
    double slope = (m * sxy - sx * sy) / denom;
    if (!(slope < 0.0))
        throw InsufficientDecay("decay_rate_fit: distances are not decaying");
    return -slope;
}

} // namespace fibosc
