// params.hpp — deformation parameters (r, q, β) and the admissible regions

#pragma once

#include <string>

#include "fibosc/errors.hpp"

namespace fibosc {

// The triple (r, q, β). Standing convention r > q; β > 0 strictly.
// Immutable after construction; validation happens once, here.
struct DeformationParams {
    double r;
    double q;
    double beta;

    DeformationParams(double r_, double q_, double beta_) : r(r_), q(q_), beta(beta_) {
        if (!(r > q))
            throw DegenerateParams("r > q required, got r=" + std::to_string(r) +
                                   ", q=" + std::to_string(q));
        if (!(beta > 0.0))
            throw DegenerateParams("beta > 0 required, got " + std::to_string(beta));
    }

    // region_A: -1 <= q <= 1 < r and r+q >= 1
    bool region_a() const { return q >= -1.0 && q <= 1.0 && r > 1.0 && r + q >= 1.0; }
    // region_B: region_A and r+q >= 2 (omega_k non-decreasing)
    bool region_b() const { return region_a() && r + q >= 2.0; }
    // region_C: region_B and q >= -2/3 (Theorem on the off-diagonal minimum applies)
    bool region_c() const { return region_b() && q >= -2.0 / 3.0; }
};

// Human-readable diagnostic naming the first violated inequality of the
// requested region, or "" when the region holds. Used by the CLI.
std::string region_diagnostic(const DeformationParams& p, char region);

} // namespace fibosc
