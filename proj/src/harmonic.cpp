#include "harmonic.hpp"

#include <cmath>
#include <stdexcept>

#include "eigen_section.hpp"

namespace conewalk {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double HarmonicForm::u(const Vec& x) const {
    const ConeSpec& k = cone_;
    check_dim(x, k.dim(), "u_eval");
    if (!k.contains(x)) return 0.0;
    switch (k.variant()) {
        case ConeVariant::HalfLine:
            return x[0];
        case ConeVariant::HalfSpace:
            return x[k.dim() - 1];
        case ConeVariant::Wedge2D: {
            double r = std::hypot(x[0], x[1]);
            double th = std::atan2(x[1], x[0]);
            if (th < 0.0) th += 2.0 * kPi;
            double p = k.p();
            return std::pow(r, p) * std::sin(p * th);
        }
        case ConeVariant::Orthant: {
            double prod = 1.0;
            for (int i = 0; i < k.dim(); ++i) prod *= x[i];
            return prod;
        }
        case ConeVariant::CircularCone3D: {
            if (!k.eigen_table()) throw std::logic_error("u_eval: circular cone has no eigen table built");
            double r = x.norm();
            double polar = std::atan2(std::hypot(x[0], x[1]), x[2]);
            return std::pow(r, k.p()) * k.eigen_table()->interpolate(polar);
        }
    }
    return 0.0;
}

Vec HarmonicForm::grad_u(const Vec& x) const {
    const ConeSpec& k = cone_;
    check_dim(x, k.dim(), "grad_u");
    if (!k.contains(x)) throw std::domain_error("grad_u: point is outside the open cone");
    Vec g(k.dim());
    switch (k.variant()) {
        case ConeVariant::HalfLine:
            g[0] = 1.0;
            return g;
        case ConeVariant::HalfSpace:
            g[k.dim() - 1] = 1.0;
            return g;
        case ConeVariant::Wedge2D: {
            // u = Im(z^p): grad = p r^(p-1) (sin((p-1)theta), cos((p-1)theta)).
            double r = std::hypot(x[0], x[1]);
            double th = std::atan2(x[1], x[0]);
            if (th < 0.0) th += 2.0 * kPi;
            double p = k.p();
            double f = p * std::pow(r, p - 1.0);
            g[0] = f * std::sin((p - 1.0) * th);
            g[1] = f * std::cos((p - 1.0) * th);
            return g;
        }
        case ConeVariant::Orthant: {
            for (int i = 0; i < k.dim(); ++i) {
                double prod = 1.0;
                for (int j = 0; j < k.dim(); ++j)
                    if (j != i) prod *= x[j];
                g[i] = prod;
            }
            return g;
        }
        case ConeVariant::CircularCone3D: {
            if (!k.eigen_table()) throw std::logic_error("grad_u: circular cone has no eigen table built");
            const EigenTable& tab = *k.eigen_table();
            double r = x.norm();
            double rho = std::hypot(x[0], x[1]);
            double polar = std::atan2(rho, x[2]);
            double p = k.p();
            double m = tab.interpolate(polar);
            double mp = tab.fd_slope(polar);
            double rad = p * std::pow(r, p - 1.0) * m;   // coefficient on e_r
            double ang = std::pow(r, p - 1.0) * mp;      // coefficient on e_theta
            double cphi = rho > 0 ? x[0] / rho : 1.0;
            double sphi = rho > 0 ? x[1] / rho : 0.0;
            double ct = std::cos(polar), st = std::sin(polar);
            g[0] = rad * st * cphi + ang * ct * cphi;
            g[1] = rad * st * sphi + ang * ct * sphi;
            g[2] = rad * ct - ang * st;
            return g;
        }
    }
    return g;
}

Vec HarmonicForm::sample_point(Rng& rng, double r_lo, double r_hi) const {
    const int d = cone_.dim();
    const double lg_lo = std::log10(r_lo), lg_hi = std::log10(r_hi);
    for (;;) {
        Vec dir(d);
        double n2 = 0.0;
        for (int i = 0; i < d; ++i) {
            dir[i] = rng.normal();
            n2 += dir[i] * dir[i];
        }
        if (n2 == 0.0) continue;
        double r = std::pow(10.0, lg_lo + (lg_hi - lg_lo) * rng.uniform());
        Vec x = (r / std::sqrt(n2)) * dir;
        if (cone_.contains(x)) return x;
    }
}

HarmonicForm::BoundsReport HarmonicForm::check_u_bounds(int64_t sample_size, uint64_t rng_seed) const {
    if (sample_size < 1) throw std::invalid_argument("check_u_bounds: sample_size must be >= 1");
    Rng rng(rng_seed, 0xB0ull, 0);
    BoundsReport rep{};
    rep.inf_lower_ratio = std::numeric_limits<double>::infinity();
    rep.sup_upper_ratio = 0.0;
    rep.samples = sample_size;
    const double p = cone_.p();
    for (int64_t i = 0; i < sample_size; ++i) {
        Vec x = sample_point(rng);
        double g = cone_.dist_boundary(x);
        if (!(g > 0.0)) continue;
        double val = u(x);
        double lower = val / std::pow(g, p);
        double upper = val / (std::pow(x.norm(), p - 1.0) * g);
        if (lower < rep.inf_lower_ratio) {
            rep.inf_lower_ratio = lower;
            rep.inf_witness = x;
        }
        if (upper > rep.sup_upper_ratio) {
            rep.sup_upper_ratio = upper;
            rep.sup_witness = x;
        }
    }
    return rep;
}

}  // namespace conewalk
