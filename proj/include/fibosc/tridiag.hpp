// tridiag.hpp — symmetric tridiagonal eigenvalues by bisection on Sturm
// sequence counts. Robust for graded matrices whose entries span many orders
// of magnitude (the birth-death generators here reach ~r^N on the diagonal
// while the spectral gap stays O(1)).

#pragma once

#include <vector>

namespace fibosc {

struct SymTridiag {
    std::vector<double> diag;    // size n
    std::vector<double> offdiag; // size n-1

    int size() const { return static_cast<int>(diag.size()); }
};

// Number of eigenvalues strictly below x (LDL^T sign count with pivot guard).
int sturm_count_below(const SymTridiag& t, double x);

// k-th smallest eigenvalue, k 0-based. Bisection from Gershgorin bounds until
// the bracket width drops below max(abs_tol, rel_tol*|mid|).
// Throws NoConvergence if the bracket fails to shrink within max_iter.
double tridiag_eigenvalue(const SymTridiag& t, int k, double rel_tol = 1e-12,
                          double abs_tol = 1e-300, int max_iter = 2000);

// All eigenvalues, ascending. Intended for moderate n (test cross-checks).
std::vector<double> tridiag_eigenvalues(const SymTridiag& t, double rel_tol = 1e-12);

} // namespace fibosc
