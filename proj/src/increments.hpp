#pragma once

#include <limits>
#include <string>

#include "rng.hpp"
#include "vec.hpp"

namespace conewalk {

enum class LawKind {
    GaussianStd,        // i.i.d. standard normal coordinates
    RademacherProduct,  // independent +-1 coordinates (lattice law)
    SphereScaled,       // uniform on sqrt(d) * S^{d-1}
    StudentLike,        // symmetric Pareto tail, unit-variance coordinates
};

/// Standardized step distribution: zero mean, unit variance, uncorrelated
/// coordinates. `moment_order` is the supremum of finite absolute moments
/// (infinity for the first three kinds, the tail index for StudentLike).
class IncrementLaw {
  public:
    static IncrementLaw gaussian(int dim);
    static IncrementLaw rademacher(int dim);
    static IncrementLaw sphere(int dim);
    /// Symmetric Pareto-type coordinates with tail index > 2, rescaled to
    /// unit variance at construction.
    static IncrementLaw student(int dim, double tail_index);

    static IncrementLaw from_config(const std::string& variant, int dim, double tail_index);

    LawKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double moment_order() const { return moment_order_; }
    bool lattice() const { return kind_ == LawKind::RademacherProduct; }
    /// Upper bound on the Euclidean step length; infinity when unbounded.
    double max_step() const;
    std::string description() const;

    void sample(Rng& rng, Vec& out) const;
    Vec sample(Rng& rng) const {
        Vec v(dim_);
        sample(rng, v);
        return v;
    }

  private:
    IncrementLaw(LawKind kind, int dim, double moment_order, double tail_index, double scale)
        : kind_(kind), dim_(dim), moment_order_(moment_order), tail_index_(tail_index), scale_(scale) {}

    LawKind kind_;
    int dim_;
    double moment_order_;
    double tail_index_ = 0.0;
    double scale_ = 1.0;
};

}  // namespace conewalk
