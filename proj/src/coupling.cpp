#include "fibosc/coupling.hpp"

#include <algorithm>
#include <cmath>

namespace fibosc {

int BohrSpectrum::find(double omega) const {
    for (std::size_t i = 0; i < omegas.size(); ++i)
        if (std::abs(omegas[i] - omega) <= tol)
            return static_cast<int>(i);
    return -1;
}

BohrSpectrum bohr_spectrum(const SpectrumTable& table, double tol) {
    if (tol <= 0.0)
        throw DegenerateParams("bohr_spectrum: tol must be > 0");
    const int n = table.n_levels;
    if (n < 2)
        throw DimensionMismatch("bohr_spectrum: need at least two levels");

    struct Gap {
        double value;
        BohrSpectrum::Pair pair;
    };
    std::vector<Gap> gaps;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double d = table.eps[i] - table.eps[j];
            if (d > tol)
                gaps.push_back({d, {i, j}});
        }
    }
    std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
        if (a.value != b.value)
            return a.value < b.value;
        if (a.pair.upper != b.pair.upper)
            return a.pair.upper < b.pair.upper;
        return a.pair.lower < b.pair.lower;
    });

    BohrSpectrum spec;
    spec.tol = tol;
    spec.n_levels = n;
    // greedy chain merge on the sorted gap list
    std::size_t i = 0;
    while (i < gaps.size()) {
        std::size_t j = i + 1;
        while (j < gaps.size() && gaps[j].value - gaps[j - 1].value <= tol)
            ++j;
        double mean = 0.0;
        std::vector<BohrSpectrum::Pair> cls;
        for (std::size_t k = i; k < j; ++k) {
            mean += gaps[k].value;
            cls.push_back(gaps[k].pair);
        }
        mean /= static_cast<double>(j - i);
        std::sort(cls.begin(), cls.end(), [](const auto& a, const auto& b) {
            if (a.upper != b.upper)
                return a.upper < b.upper;
            return a.lower < b.lower;
        });
        spec.omegas.push_back(mean);
        spec.pairs.push_back(std::move(cls));
        i = j;
    }
    return spec;
}

GenericityReport is_generic(const BohrSpectrum& spectrum, const SpectrumTable& table) {
    GenericityReport rep;
    for (int i = 0; i < spectrum.n_levels; ++i)
        for (int j = i + 1; j < spectrum.n_levels; ++j)
            if (std::abs(table.eps[i] - table.eps[j]) <= spectrum.tol)
                rep.degenerate_levels.emplace_back(i, j);
    for (std::size_t c = 0; c < spectrum.omegas.size(); ++c)
        if (spectrum.pairs[c].size() != 1)
            rep.multi_pair_classes.push_back({spectrum.omegas[c], spectrum.pairs[c]});
    rep.generic = rep.degenerate_levels.empty() && rep.multi_pair_classes.empty();
    return rep;
}

KrausExtraction kraus_from_coupling(const Eigen::MatrixXcd& coupling,
                                    const BohrSpectrum& spectrum, double omega) {
    if (coupling.rows() != coupling.cols() || coupling.rows() != spectrum.n_levels)
        throw DimensionMismatch("kraus_from_coupling: coupling must be N x N with N = " +
                                std::to_string(spectrum.n_levels));
    int cls = spectrum.find(omega);
    if (cls < 0)
        throw UnknownFrequency("no Bohr class within tol of omega = " + std::to_string(omega));

    KrausExtraction ext;
    ext.omega = spectrum.omegas[cls];
    ext.d_omega = Eigen::MatrixXcd::Zero(spectrum.n_levels, spectrum.n_levels);
    for (const auto& p : spectrum.pairs[cls]) {
        ext.d_omega(p.lower, p.upper) = coupling(p.lower, p.upper);
        if (p.upper == spectrum.n_levels - 1 || p.lower == spectrum.n_levels - 1)
            ext.touches_top_level = true;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(ext.d_omega);
    double scale = ext.d_omega.cwiseAbs().maxCoeff();
    qr.setThreshold(scale > 0.0 ? 1e-12 : 1.0);
    ext.rank = scale > 0.0 ? static_cast<int>(qr.rank()) : 0;
    return ext;
}

} // namespace fibosc
