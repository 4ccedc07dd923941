// dynamics.hpp — time integration of the master equation on the truncated
// space and empirical decay-rate extraction.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fibosc/generator.hpp"

namespace fibosc {

// Sampled trajectory of d rho/dt = predual(rho). States are re-symmetrized
// each step; trace is monitored every step, eigenvalues per sample.
// l2_distances is the pi~-weighted norm || rho^{-1/4} (rho(t)-rho_inv) rho^{-1/4} ||_HS
// (the norm in which the spectral gap governs decay); trace_distances are
// observational.
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> states;
    std::vector<double> l2_distances;
    std::vector<double> trace_distances;
    std::vector<double> min_eigenvalues;
    std::vector<double> traces;
    double trace_drift = 0.0; // max |tr rho(t) - 1| over every step
    double dt = 0.0;
    long steps = 0;
};

// Classical fixed-step RK4. Preconditions: dt <= 0.1 / max_n(lambda_n + mu_n)
// and the initial state carries <= 1e-10 mass on the top two levels.
// Aborts with StabilityViolation if the trace drifts beyond 1e-6 mid-run and
// TruncationLeak if the top-level mass exceeds 1e-6.
Trajectory evolve(const TruncatedGenerator& gen, const DensityMatrix& rho0, double t_max,
                  double dt, int max_samples = 2048);

// Stability-bound step size 0.1 / max(lambda_n + mu_n) for the truncation.
double stable_dt(const TruncatedGenerator& gen);

// Least-squares slope of log(weighted-L2 distance) over the trailing
// tail_fraction of samples, returned as a positive rate. InsufficientDecay
// unless the final distance dropped below 1e-3 of the initial one.
double decay_rate_fit(const Trajectory& traj, double tail_fraction);

} // namespace fibosc
