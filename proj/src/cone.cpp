#include "cone.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "eigen_section.hpp"

namespace conewalk {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Distance from a planar point at radius r and angular separation `sep`
// (folded into [0, pi]) to a ray from the origin. Beyond a right angle the
// nearest ray point is the origin itself.
double ray_distance(double r, double sep) {
    if (sep <= 0.5 * kPi) return r * std::sin(sep);
    return r;
}

double fold_angle(double a) {
    a = std::abs(a);
    if (a > kPi) a = 2.0 * kPi - a;
    return a;
}

// Largest guaranteed boundary clearance of x0 + K for the canonical unit
// direction of each cone (infimum over the shifted cone, closed form).
double starlike_clearance(ConeVariant v, double angle, int d) {
    switch (v) {
        case ConeVariant::HalfLine:
        case ConeVariant::HalfSpace:
            return 1.0;
        case ConeVariant::Wedge2D:
            return std::sin(0.5 * angle);
        case ConeVariant::Orthant:
            return 1.0 / std::sqrt(static_cast<double>(d));
        case ConeVariant::CircularCone3D:
            return std::sin(angle);
    }
    return 1.0;
}
}  // namespace

const char* variant_name(ConeVariant v) {
    switch (v) {
        case ConeVariant::HalfLine: return "half-line";
        case ConeVariant::HalfSpace: return "half-space";
        case ConeVariant::Wedge2D: return "wedge";
        case ConeVariant::Orthant: return "orthant";
        case ConeVariant::CircularCone3D: return "circular";
    }
    return "?";
}

ConeSpec ConeSpec::half_line() {
    ConeSpec c;
    c.variant_ = ConeVariant::HalfLine;
    c.dim_ = 1;
    c.p_ = 1.0;
    c.x0_ = Vec{1.0};
    c.r0_ = 2.0;
    return c;
}

ConeSpec ConeSpec::half_space(int dim) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("half_space: dimension must lie in [2,8]");
    ConeSpec c;
    c.variant_ = ConeVariant::HalfSpace;
    c.dim_ = dim;
    c.p_ = 1.0;
    c.x0_ = Vec(dim);
    c.x0_[dim - 1] = 1.0;
    c.r0_ = 2.0;
    return c;
}

ConeSpec ConeSpec::wedge(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0 * kPi)) throw std::invalid_argument("wedge: opening angle must lie in (0, 2*pi)");
    ConeSpec c;
    c.variant_ = ConeVariant::Wedge2D;
    c.dim_ = 2;
    c.angle_ = alpha;
    c.p_ = p_exponent(wedge_lambda1(alpha), 2);  // = pi/alpha
    c.x0_ = Vec{std::cos(0.5 * alpha), std::sin(0.5 * alpha)};
    double clr = starlike_clearance(c.variant_, alpha, 2);
    c.r0_ = std::floor(1.0 / clr) + 1.0;
    return c;
}

ConeSpec ConeSpec::orthant(int dim) {
    if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("orthant: dimension must lie in [2,8]");
    ConeSpec c;
    c.variant_ = ConeVariant::Orthant;
    c.dim_ = dim;
    c.p_ = static_cast<double>(dim);
    c.x0_ = Vec(dim);
    double s = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i) c.x0_[i] = s;
    c.r0_ = std::floor(std::sqrt(static_cast<double>(dim))) + 1.0;
    return c;
}

ConeSpec ConeSpec::circular(double theta0, int mesh) {
    if (!(theta0 > 0.0) || !(theta0 < kPi)) throw std::invalid_argument("circular: half-angle must lie in (0, pi)");
    ConeSpec c;
    c.variant_ = ConeVariant::CircularCone3D;
    c.dim_ = 3;
    c.angle_ = theta0;
    auto table = std::make_shared<EigenTable>(circular_cone_lambda1(theta0, mesh));
    c.p_ = p_exponent(table->lambda1, 3);
    c.table_ = std::move(table);
    c.x0_ = Vec{0.0, 0.0, 1.0};
    double clr = starlike_clearance(c.variant_, theta0, 3);
    c.r0_ = std::floor(1.0 / clr) + 1.0;
    return c;
}

ConeSpec ConeSpec::from_config(const std::string& variant, int dim, double angle, int mesh) {
    if (variant == "half-line") return half_line();
    if (variant == "half-space") return half_space(dim);
    if (variant == "wedge") return wedge(angle);
    if (variant == "orthant") return orthant(dim);
    if (variant == "circular") return circular(angle, mesh);
    throw std::invalid_argument("unknown cone variant '" + variant +
                                "' (expected half-line, half-space, wedge, orthant, circular)");
}

bool ConeSpec::contains(const Vec& x) const {
    check_dim(x, dim_, "contains");
    switch (variant_) {
        case ConeVariant::HalfLine:
            return x[0] > 0.0;
        case ConeVariant::HalfSpace:
            return x[dim_ - 1] > 0.0;
        case ConeVariant::Wedge2D: {
            if (x[0] == 0.0 && x[1] == 0.0) return false;
            double th = std::atan2(x[1], x[0]);
            if (th < 0.0) th += 2.0 * kPi;
            return th > 0.0 && th < angle_;
        }
        case ConeVariant::Orthant:
            for (int i = 0; i < dim_; ++i)
                if (!(x[i] > 0.0)) return false;
            return true;
        case ConeVariant::CircularCone3D: {
            double rho = std::hypot(x[0], x[1]);
            if (rho == 0.0 && x[2] == 0.0) return false;
            double polar = std::atan2(rho, x[2]);
            return polar < angle_;
        }
    }
    return false;
}

double ConeSpec::dist_boundary(const Vec& x) const {
    check_dim(x, dim_, "dist_boundary");
    if (!contains(x)) return 0.0;
    switch (variant_) {
        case ConeVariant::HalfLine:
            return x[0];
        case ConeVariant::HalfSpace:
            return x[dim_ - 1];
        case ConeVariant::Wedge2D: {
            double r = std::hypot(x[0], x[1]);
            double th = std::atan2(x[1], x[0]);
            if (th < 0.0) th += 2.0 * kPi;
            double d0 = ray_distance(r, fold_angle(th));
            double d1 = ray_distance(r, fold_angle(angle_ - th));
            return std::min(d0, d1);
        }
        case ConeVariant::Orthant: {
            double m = x[0];
            for (int i = 1; i < dim_; ++i) m = std::min(m, x[i]);
            return m;
        }
        case ConeVariant::CircularCone3D: {
            double r = x.norm();
            double polar = std::atan2(std::hypot(x[0], x[1]), x[2]);
            return ray_distance(r, angle_ - polar);
        }
    }
    return 0.0;
}

bool ConeSpec::in_interior_set(const InteriorSetParams& params, const Vec& x) const {
    if (params.n < 1) throw std::invalid_argument("in_interior_set: n must be >= 1");
    if (!(params.epsilon > 0.0) || !(params.epsilon < 0.5))
        throw std::invalid_argument("in_interior_set: epsilon must lie in (0, 1/2)");
    double g = dist_boundary(x);
    double n = static_cast<double>(params.n);
    double base = std::pow(n, 0.5 - params.epsilon);
    if (params.variant == InteriorSetParams::Variant::Plain) return g >= base;
    return g >= 0.5 * (base + x.norm() / std::pow(n, 2.0 * params.epsilon));
}

void ConeSpec::starlike_data(Vec& x0, double& r0) const {
    x0 = x0_;
    r0 = r0_;
}

std::string ConeSpec::description() const {
    char buf[96];
    switch (variant_) {
        case ConeVariant::HalfLine:
            return "half-line";
        case ConeVariant::HalfSpace:
            std::snprintf(buf, sizeof buf, "half-space(d=%d)", dim_);
            return buf;
        case ConeVariant::Wedge2D:
            std::snprintf(buf, sizeof buf, "wedge(alpha=%.6g)", angle_);
            return buf;
        case ConeVariant::Orthant:
            std::snprintf(buf, sizeof buf, "orthant(d=%d)", dim_);
            return buf;
        case ConeVariant::CircularCone3D:
            std::snprintf(buf, sizeof buf, "circular(theta0=%.6g)", angle_);
            return buf;
    }
    return "?";
}

}  // namespace conewalk
