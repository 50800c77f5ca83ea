#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eigen_section.hpp"

using namespace conewalk;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("wedge section eigenvalues") {
    // m'' = -lambda m with m(0)=m(alpha)=0 gives lambda1 = (pi/alpha)^2
    CHECK(wedge_lambda1(kPi) == doctest::Approx(1.0));
    CHECK(wedge_lambda1(kPi / 2) == doctest::Approx(4.0));
    CHECK(wedge_lambda1(2.0 * kPi / 3.0) == doctest::Approx(2.25));
    CHECK_THROWS_AS(wedge_lambda1(0.0), std::invalid_argument);
    CHECK_THROWS_AS(wedge_lambda1(6.3), std::invalid_argument);
}

TEST_CASE("hemisphere ground state. m1 = cos(theta), lambda1 = 2") {
    EigenTable t = circular_cone_lambda1(kPi / 2, 4096);
    CHECK(std::abs(t.lambda1 - 2.0) < 1e-3);
    CHECK(p_exponent(t.lambda1, 3) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(t.est_error < 1e-3);
    // shape: matches cos on the grid at discretization accuracy
    for (size_t i = 0; i < t.theta_grid.size(); i += 97) {
        CHECK(t.m1_values[i] == doctest::Approx(std::cos(t.theta_grid[i])).epsilon(1e-4));
    }
    CHECK(t.m1_values.back() == 0.0);
}

TEST_CASE("eigenvector positivity and max normalization") {
    for (double theta0 : {0.6, 1.2, 2.4}) {
        EigenTable t = circular_cone_lambda1(theta0, 512);
        double mx = 0;
        for (size_t i = 0; i + 1 < t.m1_values.size(); ++i) {
            CHECK(t.m1_values[i] > 0.0);
            mx = std::max(mx, t.m1_values[i]);
        }
        CHECK(mx == doctest::Approx(1.0));
    }
}

TEST_CASE("domain monotonicity of the ground eigenvalue") {
    EigenTable narrow = circular_cone_lambda1(kPi / 3, 1024);
    EigenTable wide = circular_cone_lambda1(kPi / 2, 1024);
    CHECK(narrow.lambda1 > wide.lambda1);
}

TEST_CASE("second-order mesh convergence") {
    double l256 = circular_cone_lambda1(1.1, 256).lambda1;
    double l512 = circular_cone_lambda1(1.1, 512).lambda1;
    double l1024 = circular_cone_lambda1(1.1, 1024).lambda1;
    double ratio = std::abs(l256 - l512) / std::abs(l512 - l1024);
    CHECK(ratio >= 3.5);
}

TEST_CASE("discrete eigen residual is tiny on the solve grid") {
    // rebuild the cell-centered operator and apply it to the table values
    const double theta0 = 1.3;
    const int n = 1024;
    EigenTable t = circular_cone_lambda1(theta0, n);
    const double h = theta0 / (n + 0.5);
    double resid = 0;
    for (int j = 0; j < n; ++j) {
        double center = t.m1_values[j + 1];
        double left = j == 0 ? t.m1_values[1] : t.m1_values[j];  // zero-flux face at the pole
        double right = j + 1 < n ? t.m1_values[j + 2] : 0.0;
        double flux_l = j == 0 ? 0.0 : std::sin(j * h) * (center - left) / h;
        double flux_r = std::sin((j + 1) * h) * (right - center) / h;
        double lhs = -(flux_r - flux_l) / h;
        double rhs = t.lambda1 * std::sin((j + 0.5) * h) * center;
        resid = std::max(resid, std::abs(lhs - rhs));
    }
    CHECK(resid <= 1e-8 * t.lambda1);
}

TEST_CASE("mesh precondition") {
    CHECK_THROWS_AS(circular_cone_lambda1(1.0, 32), std::invalid_argument);
    CHECK_THROWS_AS(circular_cone_lambda1(3.2, 256), std::invalid_argument);
}

TEST_CASE("csv round trip preserves the interpolant") {
    EigenTable t = circular_cone_lambda1(1.0, 64);
    std::string csv = eigen_table_csv(t);
    CHECK(csv.substr(0, 9) == "theta,m1\n");
    size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == t.theta_grid.size() + 1);

    EigenTable back = eigen_table_from_csv(csv, t.lambda1, t.theta0, t.mesh_size, t.est_error);
    CHECK(back.lambda1 == t.lambda1);
    for (double x : {0.0, 0.123, 0.5, 0.77, 0.9999}) CHECK(back.interpolate(x) == t.interpolate(x));
    CHECK_THROWS_AS(eigen_table_from_csv("theta,m1\n0,1\n", t.lambda1, t.theta0, 64, 0.0),
                    std::invalid_argument);
}
