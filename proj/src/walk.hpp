#pragma once

#include <cstdint>
#include <vector>

#include "cone.hpp"
#include "increments.hpp"
#include "stats.hpp"
#include "vec.hpp"

namespace conewalk {

/// One simulated killed path, summarized. The position sequence is never
/// materialized; only these aggregates stream out of the sampler.
struct KilledSample {
    bool survived = false;   // tau > horizon
    bool censored = false;   // alias of survived: tau truncated at horizon
    int64_t tau = 0;         // exit step, or horizon when censored
    Vec terminal;            // x + S(min(tau, horizon))
    double running_max = 0;  // max over k <= min(tau,horizon) of |x + S(k)|
    Vec exit_point;          // x + S(tau) when exited (undefined otherwise)
};

/// Walks from x until it leaves the open cone or `horizon` steps elapse.
/// The start point is not tested: tau >= 1. Throws std::invalid_argument
/// when x is outside the cone or horizon < 1.
KilledSample simulate_killed(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                             int64_t horizon, Rng& rng);

/// Monte Carlo survival probability P(tau_x > n) with binomial standard
/// error. Deterministic for fixed (seed, stream); any thread count.
EstimateCI survival_estimate(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                             int64_t n, int64_t n_samples, uint64_t seed, uint32_t stream = 0,
                             int threads = 0);

/// Survival probabilities at every step of an increasing n-grid from shared
/// paths (each path walked once to the largest n).
std::vector<EstimateCI> survival_curve(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                                       const std::vector<int64_t>& n_grid, int64_t n_samples,
                                       uint64_t seed, uint32_t stream = 0, int threads = 0);

/// Estimate of E[min(tau, horizon)^(beta/2)] together with the censored mass.
/// Requires 0 < beta < p(cone); sets kFlagCensoring when the censored part
/// exceeds 1% of the estimate.
struct TauMomentResult {
    EstimateCI estimate;
    double censored_fraction = 0;      // fraction of paths reaching the horizon
    double censored_mass_fraction = 0; // share of the estimate carried by censored paths
};
TauMomentResult tau_moment_probe(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                                 double beta, int64_t horizon, int64_t n_samples, uint64_t seed,
                                 uint32_t stream = 0, int threads = 0);

/// Estimates E[M^t(n); tau_x > n, M(n) > n^(1/2 + eps/2)] with
/// M(n) = max_{k<=n} |S(k)|, and the companion E[tau_x ^ n]; their ratio is
/// the quantity whose decay over an n-grid the tests watch.
struct MaxTailResult {
    EstimateCI truncated;
    EstimateCI tau_companion;
    double ratio = 0;
};
MaxTailResult max_tail_probe(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                             int64_t n, double t_exp, double eps, int64_t n_samples, uint64_t seed,
                             uint32_t stream = 0, int threads = 0);

/// Re-walks selected sample indices with materialized positions (the counter
/// RNG makes any sample reproducible in isolation). Used for path audits.
std::vector<std::vector<Vec>> audit_paths(const ConeSpec& cone, const IncrementLaw& law,
                                          const Vec& x, int64_t horizon,
                                          const std::vector<int64_t>& indices, uint64_t seed,
                                          uint32_t stream = 0);

/// Empirical standardization check: per-coordinate mean/variance and pairwise
/// covariances over n draws, with the 4-sigma acceptance verdict.
struct StandardizationReport {
    std::vector<double> means;
    std::vector<double> variances;
    double max_abs_mean_z = 0;  // |mean| in units of its standard error
    double max_abs_var_z = 0;
    double max_abs_cov_z = 0;
    bool pass_4sigma = false;
};
StandardizationReport standardization_audit(const IncrementLaw& law, int64_t n_samples,
                                            uint64_t seed, uint32_t stream = 0, int threads = 0);

}  // namespace conewalk
