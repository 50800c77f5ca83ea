#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "harmonic.hpp"
#include "increments.hpp"
#include "stats.hpp"

namespace conewalk {

/// Deterministic interior shift g_k = k^(1/2-gamma) * R0 * x0. Keeping
/// gamma inside (0, min(1/2, p)) makes the shifted evaluation points drift
/// away from the boundary slower than the diffusive scale.
struct ShiftSequence {
    double gamma;
    double r0;
    Vec x0;

    ShiftSequence(double gamma_, double r0_, Vec x0_);
    /// Default gamma = min(1/2, p)/4 with the cone's canonical (x0, R0).
    static ShiftSequence standard(const ConeSpec& cone);
    static ShiftSequence with_gamma(const ConeSpec& cone, double gamma);

    double magnitude(int64_t k) const;  // |g_k| = k^(1/2-gamma) * R0
    Vec offset(int64_t k) const;        // g_k
};

/// Geometric horizon schedule n_m = floor(n0^((1-eps)^-m)), strictly
/// increasing, truncated at `cap`.
struct Schedule {
    int64_t n0;
    double epsilon;
    std::vector<int64_t> terms;

    Schedule(int64_t n0_, double epsilon_, int64_t cap);
};

/// One-step discrepancy f(x) = E[u(x+X)] - u(x) by Monte Carlo, using the
/// u = 0 extension outside the cone.
EstimateCI f_hat(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                 int64_t n_samples, uint64_t seed, uint32_t stream = 0, int threads = 0);

/// E[u(x + S(k)); tau_x > k]. k = 0 returns u(x) exactly.
EstimateCI estimate_direct(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                           int64_t k, int64_t n_samples, uint64_t seed, uint32_t stream = 0,
                           int threads = 0);

/// E[u(x + g_k + S(k)); tau_x > k]; the exit time uses unshifted positions.
EstimateCI estimate_shifted(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                            int64_t k, const ShiftSequence& shift, int64_t n_samples,
                            uint64_t seed, uint32_t stream = 0, int threads = 0);

/// Pathwise decomposition of u(x+g_k+S(k)) 1{tau>k} into
///   u(x) - w1 + w2 + w3,
/// with w1 the shifted exit term, w2 the shift-telescoping sum and w3 the
/// step-telescoping sum. The identity is algebraic and must hold on every
/// path; `identity_violations` counts tolerance breaches (always 0 unless
/// the implementation is broken).
struct DecomposeResult {
    EstimateCI w1, w2, w3;
    EstimateCI lhs;          // mean of u(x+g_k+S(k)) 1{tau>k}
    double u0 = 0;           // u(x)
    int64_t identity_violations = 0;
    double max_identity_error = 0;
};
DecomposeResult decompose_paths(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                                int64_t k, const ShiftSequence& shift, int64_t n_samples,
                                uint64_t seed, uint32_t stream = 0, int threads = 0);

/// Construction-I estimator. Walks each path once to the largest grid k and
/// evaluates, with common random numbers, the direct value
/// E[u(x+S(k)); tau>k], the shifted value E[u(x+g_k+S(k)); tau>k], and their
/// pathwise gap. v_hat is the direct value at the largest k: the shifted
/// sequence carries an O(k^-gamma) offset (its expectation minus the direct
/// one) that vanishes only logarithmically slowly in practice, and on the
/// same paths the shifted estimate minus the estimated gap IS the direct
/// estimate. The shifted and gap traces are returned so the drift of the
/// shifted sequence toward the same limit stays observable.
struct Construction1Result {
    EstimateCI v_hat;
    std::vector<int64_t> k_grid;
    std::vector<EstimateCI> direct_trace;
    std::vector<EstimateCI> shifted_trace;
    std::vector<EstimateCI> gap_trace;  // shifted minus direct, per path
    double stabilization = 0;           // max |direct_j - direct_last| over top half
    double stabilization_noise = 0;     // combined stderr scale for the above
    bool stabilized = true;
};
Construction1Result estimate_v_construction1(const HarmonicForm& form, const IncrementLaw& law,
                                             const Vec& x, const ShiftSequence& shift,
                                             const std::vector<int64_t>& k_grid,
                                             int64_t n_samples, uint64_t seed,
                                             uint32_t stream = 0, int threads = 0);

/// Construction-II estimator: direct values along the geometric schedule,
/// shared paths. The per-term trace exposes the contraction of successive
/// ratios toward 1; v_hat is the last term.
struct Construction2Result {
    EstimateCI v_hat;
    std::vector<int64_t> terms;
    std::vector<EstimateCI> per_term;
    std::vector<double> ratios;  // per_term[m+1]/per_term[m]
    bool stabilized = true;
};
Construction2Result estimate_v_construction2(const HarmonicForm& form, const IncrementLaw& law,
                                             const Vec& x, const Schedule& schedule,
                                             int64_t n_samples, uint64_t seed,
                                             uint32_t stream = 0, int threads = 0);

/// Harmonicity residual E[V(x+X); tau_x > 1] - V(x) for a caller-supplied
/// estimate V (nested Monte Carlo). The callable receives the evaluation
/// point and a stream key derived from the outer sample; it returns an
/// estimate with its own stderr. The residual stderr combines outer spread
/// (which already carries the inner noise of the per-sample evaluations)
/// with the stderr of V(x) itself.
using VOracle = std::function<EstimateCI(const Vec& point, uint64_t stream_key)>;
EstimateCI harmonicity_residual(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                                const VOracle& v_oracle, int64_t n_samples, uint64_t seed,
                                uint32_t stream = 0, int threads = 0);

}  // namespace conewalk
