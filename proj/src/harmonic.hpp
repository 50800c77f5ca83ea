#pragma once

#include <memory>

#include "cone.hpp"
#include "rng.hpp"
#include "vec.hpp"

namespace conewalk {

/// Closed-form (or tabulated, for the circular cone) positive harmonic
/// function u of Brownian motion killed on the cone boundary, extended by
/// u = 0 outside the cone.
///
/// Conventions: half-line u = x, half-space u = x_d, wedge u = r^p sin(p
/// theta) with p = pi/alpha, orthant u = prod x_i with p = d, circular cone
/// u = r^p m1(theta) with m1 tabulated and max-normalized to 1.
///
/// Immutable after construction; safe for concurrent evaluation.
class HarmonicForm {
  public:
    explicit HarmonicForm(ConeSpec cone) : cone_(std::move(cone)) {}

    const ConeSpec& cone() const { return cone_; }
    double p() const { return cone_.p(); }

    /// u(x); exactly 0 outside the open cone and on its boundary.
    /// Throws std::logic_error for a circular cone without a built table.
    double u(const Vec& x) const;

    /// Closed-form gradient of u at an interior point. Throws
    /// std::domain_error when x is outside the open cone. On the tabulated
    /// branch the angular part differentiates the m1 table (radial part is
    /// analytic), with error O(1/mesh).
    Vec grad_u(const Vec& x) const;

    /// Samples a point of the open cone: log-uniform radius in
    /// [r_lo, r_hi], direction uniform on the sphere conditioned on
    /// membership.
    Vec sample_point(Rng& rng, double r_lo = 1e-2, double r_hi = 1e4) const;

    /// Empirical two-sided envelope check: inf of u/dist^p and sup of
    /// u/(|x|^(p-1) dist) over sampled points, with the extremal witnesses.
    struct BoundsReport {
        double inf_lower_ratio;
        double sup_upper_ratio;
        Vec inf_witness;
        Vec sup_witness;
        int64_t samples;
    };
    BoundsReport check_u_bounds(int64_t sample_size, uint64_t rng_seed) const;

  private:
    ConeSpec cone_;
};

}  // namespace conewalk
