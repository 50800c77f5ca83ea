#pragma once

#include <memory>
#include <string>

#include "vec.hpp"

namespace conewalk {

struct EigenTable;  // eigen_section.hpp

enum class ConeVariant { HalfLine, HalfSpace, Wedge2D, Orthant, CircularCone3D };

const char* variant_name(ConeVariant v);

/// Interior-set parameters: dist(x, boundary) >= n^(1/2-eps) for the plain
/// variant, >= (n^(1/2-eps) + |x|/n^(2 eps))/2 for the shifted one.
struct InteriorSetParams {
    enum class Variant { Plain, Shifted };
    int64_t n;
    double epsilon;  // in (0, 1/2)
    Variant variant;
};

/// A supported cone: membership and boundary-distance queries, the homogeneity
/// exponent p of the positive harmonic function that vanishes on the boundary,
/// and the starlike data (x0, R0) used by the shift sequences.
///
/// The cone is open; points on the boundary are outside. All geometry is in
/// canonical position: wedges are {0 < theta < alpha}, half-spaces are
/// {x_d > 0}, the circular cone opens around +e3.
///
/// Immutable after construction; safe for concurrent use from any number of
/// threads.
class ConeSpec {
  public:
    static ConeSpec half_line();
    static ConeSpec half_space(int dim);
    static ConeSpec wedge(double alpha);  // opening angle in (0, 2*pi)
    static ConeSpec orthant(int dim);
    /// Circular cone in R^3 with half-angle theta0 in (0, pi). The section
    /// eigenproblem is solved at construction on `mesh` cells.
    static ConeSpec circular(double theta0, int mesh = 4096);

    /// Builds from configuration keys (cone.variant / cone.dimension /
    /// cone.angle). Variant strings: half-line, half-space, wedge, orthant,
    /// circular.
    static ConeSpec from_config(const std::string& variant, int dim, double angle, int mesh = 4096);

    ConeVariant variant() const { return variant_; }
    int dim() const { return dim_; }
    double p() const { return p_; }
    double angle() const { return angle_; }

    /// True iff x lies in the open cone; boundary points are outside.
    bool contains(const Vec& x) const;

    /// Euclidean distance from x to the cone boundary. Points outside the
    /// cone return 0 (callers guard membership separately).
    double dist_boundary(const Vec& x) const;

    /// Evaluates the defining inequality of the interior set exactly as
    /// written for the chosen variant.
    bool in_interior_set(const InteriorSetParams& params, const Vec& x) const;

    /// Unit interior direction x0 with x0 + K inside K, and the radius R0
    /// with dist(R0 x0 + K, boundary) > 1. Deterministic per cone.
    void starlike_data(Vec& x0, double& r0) const;
    const Vec& x0() const { return x0_; }
    double r0() const { return r0_; }

    /// Section eigenfunction table (circular cone only; null otherwise).
    const std::shared_ptr<const EigenTable>& eigen_table() const { return table_; }

    std::string description() const;

  private:
    ConeSpec() = default;

    ConeVariant variant_ = ConeVariant::HalfLine;
    int dim_ = 1;
    double angle_ = 0.0;  // wedge opening or circular half-angle
    double p_ = 1.0;
    Vec x0_;
    double r0_ = 2.0;
    std::shared_ptr<const EigenTable> table_;
};

}  // namespace conewalk
