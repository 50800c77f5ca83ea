#pragma once

#include <cstdint>
#include <vector>

#include "harmonic.hpp"
#include "increments.hpp"
#include "stats.hpp"
#include "vestimate.hpp"
#include "walk.hpp"

namespace conewalk {

/// Weighted log-log fit of survival probabilities against n. The slope
/// targets -p/2. Grid points with fewer than `min_survivors` surviving
/// samples are dropped from the top of the grid (recorded in the result).
struct TailFitResult {
    FitResult fit;
    std::vector<int64_t> n_grid;         // grid actually fitted
    std::vector<EstimateCI> survival;    // matching survival estimates
    int truncated_points = 0;            // grid points dropped for thin survival
};
TailFitResult tail_exponent_fit(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                                const std::vector<int64_t>& n_grid, int64_t n_samples,
                                uint64_t seed, uint32_t stream = 0, int threads = 0,
                                int64_t min_survivors = 100);

/// Ratio trace P(tau_x > n) n^(p/2) / V(x) per starting point and horizon.
/// The limit is the tail constant, identical across starting points; the
/// cross-x spread of the large-n ratios is the test statistic.
struct KappaTraceResult {
    struct Row {
        Vec x;
        int64_t n;
        double ratio;
        double stderr_;
    };
    std::vector<Row> rows;
    std::vector<double> final_ratios;      // per x, at the largest n
    double cross_x_spread = 0;             // (max-min)/mean of final ratios
    std::vector<bool> per_x_stabilized;    // last two grid points consistent
};
KappaTraceResult kappa_ratio_trace(const ConeSpec& cone, const IncrementLaw& law,
                                   const std::vector<Vec>& x_list,
                                   const std::vector<int64_t>& n_grid,
                                   const std::vector<EstimateCI>& v_hats, int64_t n_samples,
                                   uint64_t seed, uint32_t stream = 0, int threads = 0);

/// Chi-square test of the scaled surviving endpoints against the limiting
/// conditional law. The binned statistic is the endpoint radius |y|/sqrt(n),
/// whose target density r^(p+d-1) e^(-r^2/2) (normalized) is fully determined
/// by the limit measure; equal-mass bins from its quantiles, bulk cut at the
/// 0.999 quantile with the tail folded into an overflow bin. H0 is the
/// normalizing constant of the full d-dimensional target density.
DensityTestReport conditional_density_test(const HarmonicForm& form, const IncrementLaw& law,
                                           const Vec& x, int64_t n, int64_t n_samples, int bins,
                                           uint64_t seed, uint32_t stream = 0, int threads = 0,
                                           int64_t min_survivors = 10000);

/// Normalizing constant H0 with 1/H0 = integral of u(y) exp(-|y|^2/2) over
/// the cone (radial part in closed form via the gamma function, angular part
/// by quadrature; the orthant is exactly separable).
double h0_normalization(const HarmonicForm& form);

/// Lattice point-probability flatness test. For each admissible y the ratio
///   n^(p/2+d/2) P(x+S(n)=y, tau>n) / (V(x) u(y/sqrt n) e^(-|y|^2/2n))
/// should be flat in y (the missing lattice constant is common to all y), so
/// the coefficient of variation across y is the statistic. Lattice law only.
struct LocalCltResult {
    struct Row {
        Vec y;
        int64_t hits;
        double ratio;
    };
    std::vector<Row> rows;
    std::vector<Vec> dropped_few_hits;  // below the hit floor, excluded
    double cv = 0;                      // coefficient of variation of ratios
    int64_t survivors = 0;
};
LocalCltResult local_clt_ratio(const ConeSpec& cone, const HarmonicForm& form,
                               const IncrementLaw& law, const Vec& x, int64_t n,
                               const std::vector<Vec>& y_set, double v_hat, int64_t n_samples,
                               uint64_t seed, uint32_t stream = 0, int threads = 0,
                               int64_t min_hits = 50);

/// Central lattice points reachable from x in n steps of the product lattice
/// walk: correct parity in every coordinate, inside the cone, |y| <= radius.
std::vector<Vec> lattice_targets(const ConeSpec& cone, const Vec& x, int64_t n, double radius);

}  // namespace conewalk
