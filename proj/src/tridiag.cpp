#include "fibosc/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fibosc/errors.hpp"

namespace fibosc {

namespace {

double pivot_guard(const SymTridiag& t) {
    double bmax = 1.0;
    for (double b : t.offdiag)
        bmax = std::max(bmax, b * b);
    return std::numeric_limits<double>::min() * bmax;
}

} // namespace

int sturm_count_below(const SymTridiag& t, double x) {
    const int n = t.size();
    const double pivmin = pivot_guard(t);
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
        double b2 = (i > 0) ? t.offdiag[i - 1] * t.offdiag[i - 1] : 0.0;
        d = t.diag[i] - x - (i > 0 ? b2 / d : 0.0);
        if (std::abs(d) < pivmin)
            d = -pivmin;
        if (d < 0.0)
            ++count;
    }
    return count;
}

double tridiag_eigenvalue(const SymTridiag& t, int k, double rel_tol, double abs_tol,
                          int max_iter) {
    const int n = t.size();
    if (n == 0 || k < 0 || k >= n)
        throw IndexError("tridiag_eigenvalue: k = " + std::to_string(k) + " outside 0.." +
                         std::to_string(n - 1));
    double lo = t.diag[0], hi = t.diag[0];
    for (int i = 0; i < n; ++i) {
        double radius = (i > 0 ? std::abs(t.offdiag[i - 1]) : 0.0) +
                        (i + 1 < n ? std::abs(t.offdiag[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - radius);
        hi = std::max(hi, t.diag[i] + radius);
    }
    // widen a hair so the k-th eigenvalue lies strictly inside
    double span = std::max(hi - lo, 1.0);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;

    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            return mid; // bracket at machine resolution
        if (sturm_count_below(t, mid) >= k + 1)
            hi = mid;
        else
            lo = mid;
        double width = hi - lo;
        if (width <= std::max(abs_tol, rel_tol * std::max(std::abs(lo), std::abs(hi))))
            return 0.5 * (lo + hi);
    }
    throw NoConvergence("tridiag_eigenvalue: bisection failed to converge");
}

std::vector<double> tridiag_eigenvalues(const SymTridiag& t, double rel_tol) {
    std::vector<double> ev(t.size());
    for (int k = 0; k < t.size(); ++k)
        ev[k] = tridiag_eigenvalue(t, k, rel_tol);
    return ev;
}

} // namespace fibosc
