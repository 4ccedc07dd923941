// coupling.hpp — Bohr-frequency analysis of a diagonal Hamiltonian and
// extraction of the weak-coupling Kraus operators D_omega.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "fibosc/algebra.hpp"

namespace fibosc {

// All positive spectral gaps of the truncation, grouped into Bohr classes.
// Gaps whose values differ by <= tol chain-merge into one class (required for
// the exactly degenerate Fibonacci case). A pair (upper, lower) records the
// two level indices with eps[upper] - eps[lower] = omega.
struct BohrSpectrum {
    struct Pair {
        int upper = 0;
        int lower = 0;
    };

    std::vector<double> omegas;              // sorted ascending, one per class
    std::vector<std::vector<Pair>> pairs;    // parallel to omegas
    double tol = 0.0;
    int n_levels = 0;

    // Index of the class matching omega within tol, or -1.
    int find(double omega) const;
};

BohrSpectrum bohr_spectrum(const SpectrumTable& table, double tol = 1e-9);

// Genericity check: all eps distinct (within tol) and every Bohr class holds
// exactly one pair. Witnesses list the violating classes / degenerate levels.
struct GenericityReport {
    bool generic = false;
    struct Violation {
        double omega = 0.0;
        std::vector<BohrSpectrum::Pair> pairs;
    };
    std::vector<Violation> multi_pair_classes;
    std::vector<std::pair<int, int>> degenerate_levels; // eps equal within tol
};

GenericityReport is_generic(const BohrSpectrum& spectrum, const SpectrumTable& table);

// D_omega = sum over (upper, lower) in the class of <e_lower, D e_upper>
// |e_lower><e_upper|. rank is the numerical rank of the result.
// touches_top_level flags truncation-polluted extractions (a pair involving
// level N-1).
struct KrausExtraction {
    double omega = 0.0;
    Eigen::MatrixXcd d_omega;
    int rank = 0;
    bool touches_top_level = false;
};

KrausExtraction kraus_from_coupling(const Eigen::MatrixXcd& coupling,
                                    const BohrSpectrum& spectrum, double omega);

} // namespace fibosc
