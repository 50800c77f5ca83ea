#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eigen_section.hpp"
#include "harmonic.hpp"
#include "rng.hpp"

using namespace conewalk;

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec fd_gradient(const HarmonicForm& form, const Vec& x) {
    double h = 1e-5 * x.norm();
    Vec g(x.d);
    for (int i = 0; i < x.d; ++i) {
        Vec a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (form.u(a) - form.u(b)) / (2 * h);
    }
    return g;
}

double discrete_laplacian(const HarmonicForm& form, const Vec& x, double h) {
    double s = -2.0 * x.d * form.u(x);
    for (int i = 0; i < x.d; ++i) {
        Vec a = x, b = x;
        a[i] += h;
        b[i] -= h;
        s += form.u(a) + form.u(b);
    }
    return s / (h * h);
}
}  // namespace

TEST_CASE("exponent formula") {
    CHECK(p_exponent(4.0, 2) == doctest::Approx(2.0));   // wedge pi/2
    CHECK(p_exponent(2.0, 3) == doctest::Approx(1.0));   // hemisphere
    CHECK(p_exponent(1.0, 2) == doctest::Approx(1.0));   // half-plane wedge
    CHECK_THROWS_AS(p_exponent(0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(p_exponent(1.0, 1), std::invalid_argument);
}

TEST_CASE("closed-form values") {
    HarmonicForm orth(ConeSpec::orthant(2));
    CHECK(orth.u(Vec{1.0, 1.0}) == 1.0);
    CHECK(orth.u(Vec{2.0, 3.0}) == 6.0);
    HarmonicForm hl(ConeSpec::half_line());
    CHECK(hl.u(Vec{7.0}) == 7.0);
    HarmonicForm w(ConeSpec::wedge(kPi / 2));
    CHECK(w.u(Vec{0.0, -1.0}) == 0.0);  // outside the cone
    CHECK(w.u(Vec{1.0, 1.0}) == doctest::Approx(2.0));  // r^2 sin(2 theta) = 2xy
    // boundary evaluates to exactly zero through the membership gate
    CHECK(orth.u(Vec{1.0, 0.0}) == 0.0);
}

TEST_CASE("wedge and orthant coincide up to normalization on alpha = pi/2") {
    HarmonicForm w(ConeSpec::wedge(kPi / 2));
    HarmonicForm o(ConeSpec::orthant(2));
    Rng rng(5, 0, 0);
    for (int i = 0; i < 100; ++i) {
        Vec x = o.sample_point(rng, 0.1, 50.0);
        CHECK(w.u(x) == doctest::Approx(2.0 * o.u(x)).epsilon(1e-10));
    }
}

TEST_CASE("gradients: closed forms vs central differences") {
    Rng rng(19, 1, 0);
    HarmonicForm orth(ConeSpec::orthant(2));
    Vec g = orth.grad_u(Vec{2.0, 3.0});
    CHECK(g[0] == 3.0);
    CHECK(g[1] == 2.0);
    HarmonicForm hs(ConeSpec::half_space(2));
    g = hs.grad_u(Vec{5.0, 1.0});
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 1.0);
    HarmonicForm w(ConeSpec::wedge(kPi / 2));
    g = w.grad_u(Vec{1.0, 1.0});
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(2.0));

    for (const ConeSpec& cone : {ConeSpec::wedge(2.0943951023931953), ConeSpec::orthant(3),
                                 ConeSpec::half_space(3), ConeSpec::wedge(4.5)}) {
        HarmonicForm form(cone);
        for (int i = 0; i < 80; ++i) {
            Vec x = form.sample_point(rng, 0.5, 100.0);
            if (cone.dist_boundary(x) < 1e-3 * x.norm()) continue;
            Vec a = form.grad_u(x);
            Vec fd = fd_gradient(form, x);
            for (int j = 0; j < x.d; ++j)
                CHECK(a[j] == doctest::Approx(fd[j]).epsilon(1e-6).scale(a.norm() + 1e-12));
        }
    }
    CHECK_THROWS_AS((void)orth.grad_u(Vec{-1.0, 2.0}), std::domain_error);
}

TEST_CASE("tabulated gradient tracks finite differences at table accuracy") {
    ConeSpec cone = ConeSpec::circular(1.2, 2048);
    HarmonicForm form(cone);
    Rng rng(23, 2, 0);
    for (int i = 0; i < 60; ++i) {
        Vec x = form.sample_point(rng, 0.5, 20.0);
        if (cone.dist_boundary(x) < 0.05 * x.norm()) continue;
        Vec a = form.grad_u(x);
        Vec fd = fd_gradient(form, x);
        for (int j = 0; j < 3; ++j)
            CHECK(a[j] == doctest::Approx(fd[j]).epsilon(5e-3).scale(a.norm()));
    }
}

TEST_CASE("homogeneity u(tx) = t^p u(x)") {
    Rng rng(29, 3, 0);
    auto cones = {ConeSpec::half_line(), ConeSpec::half_space(2), ConeSpec::wedge(2.0),
                  ConeSpec::orthant(3), ConeSpec::circular(1.0, 512)};
    for (const ConeSpec& cone : cones) {
        HarmonicForm form(cone);
        double p = cone.p();
        for (int i = 0; i < 100; ++i) {
            Vec x = form.sample_point(rng, 0.5, 2.0);
            double base = form.u(x);
            for (double t : {1e-3, 0.1, 10.0, 1e3}) {
                CHECK(form.u(t * x) == doctest::Approx(std::pow(t, p) * base).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("discrete harmonicity at the third-derivative scale") {
    Rng rng(31, 4, 0);
    auto cones = {ConeSpec::half_space(2), ConeSpec::wedge(2.0943951023931953), ConeSpec::orthant(2),
                  ConeSpec::wedge(4.2)};
    for (const ConeSpec& cone : cones) {
        HarmonicForm form(cone);
        int accepted = 0;
        for (int i = 0; i < 8000 && accepted < 60; ++i) {
            Vec x = form.sample_point(rng, 4.0, 50.0);
            double g = cone.dist_boundary(x);
            // proportionally deep points: with h = 1e-4 dist, rounding noise
            // in the second difference grows like eps * u * (p + r/g) / h^2
            // and would swamp the envelope for shallow samples
            if (g < std::max(2.0, 0.2 * x.norm())) continue;
            ++accepted;
            double h = 1e-4 * g;
            double lap = discrete_laplacian(form, x, h);
            CHECK(std::abs(lap) <= 10.0 * h * h * (form.u(x) / (g * g)) + 1e-12);
        }
        CHECK(accepted == 60);
    }
}

TEST_CASE("difference bounds with empirically stable constants") {
    Rng rng(37, 5, 0);
    // p >= 1 branch: |u(x+y)-u(x)| <= C |y| |x|^(p-1) for |y| <= |x|/2
    for (const ConeSpec& cone : {ConeSpec::orthant(2), ConeSpec::wedge(2.0)}) {
        HarmonicForm form(cone);
        double p = cone.p();
        double worst = 0;
        for (int i = 0; i < 4000; ++i) {
            Vec x = form.sample_point(rng, 1.0, 100.0);
            Vec y(x.d);
            for (int j = 0; j < x.d; ++j) y[j] = rng.normal();
            double scale = (0.01 + 0.49 * rng.uniform()) * x.norm() / y.norm();
            y = scale * y;
            double lhs = std::abs(form.u(x + y) - form.u(x));
            worst = std::max(worst, lhs / (y.norm() * std::pow(x.norm(), p - 1.0)));
        }
        CHECK(worst < 50.0);
        CHECK(worst > 0.0);
    }
    // p < 1 branch: |u(x+y)-u(x)| <= C |y|^p for any y
    ConeSpec wide = ConeSpec::wedge(4.8);  // p = pi/4.8 < 1
    HarmonicForm form(wide);
    double p = wide.p();
    double worst = 0;
    for (int i = 0; i < 4000; ++i) {
        Vec x = form.sample_point(rng, 0.5, 50.0);
        Vec y{rng.normal(), rng.normal()};
        y = (rng.uniform() * 2.0 * x.norm() / y.norm()) * y;
        double lhs = std::abs(form.u(x + y) - form.u(x));
        worst = std::max(worst, lhs / std::pow(y.norm(), p));
    }
    CHECK(worst < 50.0);
}

TEST_CASE("gradient bound |grad u| dist / u stays bounded") {
    Rng rng(41, 6, 0);
    for (const ConeSpec& cone : {ConeSpec::orthant(3), ConeSpec::wedge(1.0), ConeSpec::circular(0.9, 512)}) {
        HarmonicForm form(cone);
        double worst = 0;
        for (int i = 0; i < 500; ++i) {
            Vec x = form.sample_point(rng, 0.1, 1000.0);
            double g = cone.dist_boundary(x);
            double uu = form.u(x);
            if (g <= 0 || uu <= 0) continue;
            worst = std::max(worst, form.grad_u(x).norm() * g / uu);
        }
        CHECK(worst < 100.0);
    }
}

TEST_CASE("two-sided envelope ratios") {
    // half-space and half-line: u == dist exactly, both ratios 1
    HarmonicForm hs(ConeSpec::half_space(2));
    auto rep = hs.check_u_bounds(2000, 99);
    CHECK(rep.inf_lower_ratio == doctest::Approx(1.0));
    CHECK(rep.sup_upper_ratio == doctest::Approx(1.0));
    HarmonicForm hl(ConeSpec::half_line());
    rep = hl.check_u_bounds(500, 99);
    CHECK(rep.inf_lower_ratio == doctest::Approx(1.0));
    CHECK(rep.sup_upper_ratio == doctest::Approx(1.0));
    // orthant(2): u/dist^2 = max/min >= 1; u/(|x| dist) = max/|x| <= 1
    HarmonicForm orth(ConeSpec::orthant(2));
    rep = orth.check_u_bounds(20000, 99);
    CHECK(rep.inf_lower_ratio >= 1.0 - 1e-12);
    CHECK(rep.sup_upper_ratio <= 1.0 + 1e-12);
    CHECK(rep.sup_upper_ratio > 0.5);
    // circular cone: finite and positive is the contract
    HarmonicForm circ(ConeSpec::circular(1.1, 512));
    rep = circ.check_u_bounds(5000, 99);
    CHECK(rep.inf_lower_ratio > 0.0);
    CHECK(std::isfinite(rep.sup_upper_ratio));
}

TEST_CASE("unbuilt eigen table raises a state error") {
    EigenTable empty;
    CHECK_THROWS_AS((void)empty.interpolate(0.5), std::logic_error);
}
