#include "fibosc/birthdeath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fibosc/generator.hpp"

namespace fibosc {

namespace {

void require_rates_defined(const DeformationParams& p) {
    if (!p.region_a())
        throw RegionViolation(region_diagnostic(p, 'A'));
    if (p.r + p.q <= 1.0)
        throw DegenerateParams("r+q > 1 required for finite rates, got r+q = " +
                               std::to_string(p.r + p.q));
}

// Smallest k >= 1 such that omega_{j+1} >= omega_j for all j >= k. Uses
// (r-q)(omega_{j+1}-omega_j) = r^{j-1}(r-1)^2 - q^{j-1}(1-q)^2; once the first
// term dominates in magnitude it does so forever (ratio (r/|q|)^{j-1} grows).
int omega_monotone_from(const DeformationParams& p) {
    if (p.q == 0.0 || p.r + p.q >= 2.0)
        return 1;
    double num = (1.0 - p.q) * (1.0 - p.q);
    double den = (p.r - 1.0) * (p.r - 1.0);
    if (num <= den)
        return 1;
    double aq = std::abs(p.q);
    if (aq >= 1.0) // q = -1: |q|^{j-1} stays 1, but (r-1)^2 >= (1-q)^2 iff r >= 2; else scan
        return (den >= num) ? 1 : 1 + static_cast<int>(std::ceil(std::log(num / den) /
                                                                 std::log(p.r / 1.0)));
    return 1 + static_cast<int>(std::ceil(std::log(num / den) / std::log(p.r / aq)));
}

// Kahan-compensated accumulator.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity())
        return b;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

// Partial sums over the stationary tail in ratio form: for pow in {0, 1},
//   S = sum_{y > u} (y-u)^pow e^{-beta (eps_y - eps_{u+1})}.
// Returns the plain partial sum (an under-estimate) and a certified
// over-estimate including a geometric bound on the unsummed tail.
struct TailSum {
    double lower = 0.0;
    double upper = 0.0;
};

TailSum stationary_tail_series(const DeformationParams& p, int u, int pow) {
    const int mono = omega_monotone_from(p);
    Kahan sum;
    std::vector<double> eps{0.0, 1.0};
    const auto eps_at = [&](int n) {
        while (static_cast<int>(eps.size()) <= n) {
            double next = (p.r + p.q) * eps[eps.size() - 1] - p.r * p.q * eps[eps.size() - 2];
            eps.push_back(next);
        }
        return eps[n];
    };
    const double e_ref = eps_at(u + 1);
    double tail_bound = std::numeric_limits<double>::infinity();
    int y = u + 1;
    for (; y - u <= 200000; ++y) {
        double term = std::pow(static_cast<double>(y - u), pow) * std::exp(-p.beta * (eps_at(y) - e_ref));
        sum.add(term);
        // certified ratio bound once omega is increasing past y+1:
        // t_{y+1}/t_y <= 2^pow e^{-beta omega_{y+1}} for y-u >= 1
        if (y + 1 >= mono) {
            double omega_next = eps_at(y + 1) - eps_at(y);
            double ratio = (pow == 1 ? 2.0 : 1.0) * std::exp(-p.beta * omega_next);
            if (ratio < 1.0) {
                tail_bound = term * ratio / (1.0 - ratio);
                if (tail_bound <= 1e-25 * std::max(sum.sum, 1e-300))
                    break;
            }
        }
    }
    if (!(tail_bound < std::numeric_limits<double>::infinity()))
        throw NoConvergence("stationary_tail_series: tail bound did not certify");
    return {sum.sum, sum.sum + tail_bound};
}

} // namespace

BDChain BDChain::build(const DeformationParams& params, int n_levels) {
    require_rates_defined(params);
    if (n_levels < 2)
        throw DimensionMismatch("BDChain: need at least two levels");
    auto table = SpectrumTable::build(params, n_levels);
    BDChain c;
    c.n_levels = n_levels;
    c.lambda.assign(n_levels, 0.0);
    c.mu.assign(n_levels, 0.0);
    c.log_pi.resize(n_levels);
    for (int n = 0; n < n_levels; ++n) {
        c.log_pi[n] = -params.beta * table.eps[n];
        if (n < n_levels - 1) // reflecting boundary drops the top outflow
            c.lambda[n] = gamma_rates(table.omega_at(n + 1), params.beta).plus * table.eps[n + 1];
        if (n >= 1)
            c.mu[n] = gamma_rates(table.omega_at(n), params.beta).minus * table.eps[n];
    }
    return c;
}

BDRates bd_rates(const DeformationParams& params, int n) {
    require_rates_defined(params);
    if (n < 0)
        throw IndexError("bd_rates: n must be >= 0");
    double eps_n = qr_integer(params, n);
    double eps_n1 = qr_integer(params, n + 1);
    BDRates out;
    out.lambda = gamma_rates(eps_n1 - eps_n, params.beta).plus * eps_n1;
    if (n >= 1)
        out.mu = gamma_rates(eps_n - qr_integer(params, n - 1), params.beta).minus * eps_n;
    return out;
}

BDRates bd_rates_bose(double beta, int n) {
    if (!(beta > 0.0))
        throw DegenerateParams("bd_rates_bose: beta must be > 0");
    if (n < 0)
        throw IndexError("bd_rates_bose: n must be >= 0");
    auto g = gamma_rates(1.0, beta);
    BDRates out;
    out.lambda = (n + 1) * g.plus;
    if (n >= 1)
        out.mu = n * g.minus;
    return out;
}

double partition_function(const DeformationParams& params) {
    require_rates_defined(params);
    TailSum tail = stationary_tail_series(params, -1, 0); // sum_{y >= 0} e^{-beta eps_y}, eps_ref = eps_0
    return tail.lower; // relative tail below 1e-25 by construction
}

double stationary_tail_bound(const DeformationParams& params, int n_levels) {
    require_rates_defined(params);
    // sum_{y >= N} pi_y = e^{-beta eps_N} * sum_{y > N-1} e^{-beta (eps_y - eps_N)}
    double eps_n = qr_integer(params, n_levels);
    TailSum s = stationary_tail_series(params, n_levels - 1, 0);
    return std::exp(-params.beta * eps_n) * s.upper;
}

double StationaryDensity::weight(int n) const {
    if (n < 0 || n >= static_cast<int>(log_weights.size()))
        throw IndexError("StationaryDensity: level outside truncation");
    return std::exp(log_weights[n]);
}

StationaryDensity stationary_density(const DeformationParams& params, int n_levels,
                                     double tail_rel_tol) {
    require_rates_defined(params);
    if (n_levels < 1)
        throw DimensionMismatch("stationary_density: need at least one level");
    auto table = SpectrumTable::build(params, n_levels);

    StationaryDensity sd;
    sd.Z_beta = partition_function(params);
    sd.tail_bound = stationary_tail_bound(params, n_levels);
    if (sd.tail_bound > tail_rel_tol * sd.Z_beta)
        throw TruncationTooSmall("stationary tail bound " + std::to_string(sd.tail_bound) +
                                 " exceeds " + std::to_string(tail_rel_tol) + " * Z_beta");
    Kahan z;
    for (int n = 0; n < n_levels; ++n)
        z.add(std::exp(-params.beta * table.eps[n]));
    sd.Z_truncated = z.sum;
    sd.log_weights.resize(n_levels);
    const double log_z = std::log(sd.Z_truncated);
    for (int n = 0; n < n_levels; ++n)
        sd.log_weights[n] = -params.beta * table.eps[n] - log_z;
    return sd;
}

KMReport km_conservativity(const DeformationParams& params, int n_terms) {
    require_rates_defined(params);
    if (n_terms < 10)
        throw DimensionMismatch("km_conservativity: n_terms must be >= 10");

    auto table = SpectrumTable::build(params, n_terms + 1);
    KMReport rep;
    rep.log_terms.reserve(n_terms);
    rep.log_partial_sums.reserve(n_terms);

    Kahan pi_cum; // sum_{k=1..n} pi_k, bounded by Z - 1
    double log_s = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_terms; ++n) {
        pi_cum.add(std::exp(-params.beta * table.eps[n]));
        // log(1/(lambda_n pi_n)) = beta eps_{n+1} + log(1 - e^{-beta omega_{n+1}}) - log eps_{n+1}
        double log_inv_lampi = params.beta * table.eps[n + 1] +
                               std::log1p(-std::exp(-params.beta * table.omega_at(n + 1))) -
                               std::log(table.eps[n + 1]);
        double log_term = log_inv_lampi + std::log(pi_cum.sum);
        log_s = logaddexp(log_s, log_term);
        rep.log_terms.push_back(log_term);
        rep.log_partial_sums.push_back(log_s);
    }

    bool growing = true;
    double min_increment = std::numeric_limits<double>::infinity();
    int m = static_cast<int>(rep.log_terms.size());
    for (int i = std::max(1, m - 10); i < m; ++i) {
        double inc = rep.log_terms[i] - rep.log_terms[i - 1];
        min_increment = std::min(min_increment, inc);
        if (inc <= 0.0)
            growing = false;
    }
    bool dominates = m >= 2 && rep.log_terms[m - 1] > rep.log_partial_sums[m - 2];
    rep.consistent_with_divergence = growing && dominates;
    rep.witness_rate = min_increment;
    return rep;
}

double dirichlet_form_classical(const BDChain& chain, std::span<const double> f) {
    if (static_cast<int>(f.size()) != chain.n_levels)
        throw DimensionMismatch("dirichlet_form_classical: f must have n_levels entries");
    if (chain.n_levels < 2)
        throw DimensionMismatch("dirichlet_form_classical: need at least two levels");
    Kahan z;
    for (double lp : chain.log_pi)
        z.add(std::exp(lp));
    Kahan e;
    for (int n = 0; n + 1 < chain.n_levels; ++n) {
        double diff = f[n + 1] - f[n];
        e.add(std::exp(chain.log_pi[n]) / z.sum * chain.lambda[n] * diff * diff);
    }
    return e.sum;
}

SymTridiag symmetrized_tridiagonal(const BDChain& chain) {
    SymTridiag t;
    t.diag.resize(chain.n_levels);
    t.offdiag.resize(chain.n_levels - 1);
    for (int n = 0; n < chain.n_levels; ++n)
        t.diag[n] = chain.lambda[n] + chain.mu[n];
    for (int n = 0; n + 1 < chain.n_levels; ++n)
        t.offdiag[n] = -std::sqrt(chain.lambda[n] * chain.mu[n + 1]);
    return t;
}

double diagonal_gap_numeric(const DeformationParams& params, int n_levels) {
    if (n_levels < 16)
        throw DimensionMismatch("diagonal_gap_numeric: need N >= 16");
    double z = partition_function(params);
    double tail = stationary_tail_bound(params, n_levels);
    if (tail > 1e-12 * z)
        throw TruncationTooSmall("diagonal_gap_numeric: stationary tail bound " +
                                 std::to_string(tail) + " above 1e-12 * Z_beta");
    auto chain = BDChain::build(params, n_levels);
    auto tri = symmetrized_tridiagonal(chain);
    return tridiag_eigenvalue(tri, 1, 1e-10);
}

AppendixAReport appendix_a_validators(const DeformationParams& params, int u_max) {
    if (!params.region_b())
        throw RegionViolation(region_diagnostic(params, 'B'));
    if (u_max < 5)
        throw DimensionMismatch("appendix_a_validators: u_max must be >= 5");

    auto table = SpectrumTable::build(params, u_max + 2);
    const double b = params.beta;
    const double t = std::exp(-b);

    AppendixAReport rep;
    rep.rows.reserve(u_max + 1);
    for (int u = 0; u <= u_max; ++u) {
        AppendixAReport::Row row;
        row.u = u;
        const double s = std::exp(-b * table.omega_at(u + 1));

        // A.1 as (1-s)^2 sum_{y>u} (y-u) e^{-b(eps_y - eps_{u+1})} <= 1
        TailSum s1 = stationary_tail_series(params, u, 1);
        row.a1_margin = 1.0 - (1.0 - s) * (1.0 - s) * s1.upper;

        // A.2, linear domain
        Kahan w, plain;
        for (int x = 0; x < u; ++x)
            w.add((u - x) * std::exp(-b * table.eps[x]));
        for (int x = 0; x <= u; ++x)
            plain.add(std::exp(-b * table.eps[x]));
        double rhs_w = u / (1.0 - t) - t * (1.0 - std::exp(-b * u)) / ((1.0 - t) * (1.0 - t));
        double rhs_p = (1.0 - std::exp(-b * (u + 1))) / (1.0 - t);
        row.a2_weighted_slack = rhs_w - w.sum;
        row.a2_plain_slack = rhs_p - plain.sum;

        // A.3: pi_{u+1} <= sum_{y>u} pi_y <= pi_{u+1}/(1-s)
        TailSum s0 = stationary_tail_series(params, u, 0);
        row.a3_lower_log_slack = std::log(s0.lower); // first term is exactly 1
        row.a3_upper_margin = 1.0 - (1.0 - s) * s0.upper;

        rep.rows.push_back(row);
    }
    rep.all_hold = std::all_of(rep.rows.begin(), rep.rows.end(),
                               [](const auto& r) { return r.holds(); });
    return rep;
}

} // namespace fibosc
