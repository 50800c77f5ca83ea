#include "eigen_section.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace conewalk {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Tridiag {
    std::vector<double> diag;  // symmetric tridiagonal, standard form
    std::vector<double> off;   // off.size() == diag.size()-1
};

// Sturm count: number of eigenvalues strictly below lambda.
int sturm_count(const Tridiag& m, double lambda) {
    int count = 0;
    double d = 1.0;
    const size_t n = m.diag.size();
    for (size_t i = 0; i < n; ++i) {
        double off2 = i ? m.off[i - 1] * m.off[i - 1] : 0.0;
        d = m.diag[i] - lambda - (i ? off2 / d : 0.0);
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

// Solves (M - lambda I) x = rhs in place (Thomas with tiny-pivot guard).
void shifted_solve(const Tridiag& m, double lambda, std::vector<double>& x) {
    const size_t n = m.diag.size();
    std::vector<double> c(n), d(n);
    double piv = m.diag[0] - lambda;
    if (std::abs(piv) < 1e-300) piv = 1e-300;
    c[0] = m.off.empty() ? 0.0 : m.off[0] / piv;
    d[0] = x[0] / piv;
    for (size_t i = 1; i < n; ++i) {
        piv = m.diag[i] - lambda - m.off[i - 1] * c[i - 1];
        if (std::abs(piv) < 1e-300) piv = 1e-300;
        c[i] = (i + 1 < n) ? m.off[i] / piv : 0.0;
        d[i] = (x[i] - m.off[i - 1] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
}

double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct SolveResult {
    double lambda;
    std::vector<double> vec;  // cell-centered eigenvector, positive, max 1
};

// Cell-centered second-order discretization of (sin t m')' = -lambda sin t m
// with the Dirichlet node half a cell beyond the last center. The half-cell
// offset puts the pole face exactly at t=0 where the sin weight vanishes, so
// the matrix stays symmetric positive definite.
SolveResult solve_section(double theta0, int n) {
    const double h = theta0 / (n + 0.5);
    std::vector<double> w(n);      // cell weights sin(t_j)
    std::vector<double> fl(n + 1); // face weights sin(j h)
    for (int j = 0; j <= n; ++j) fl[j] = std::sin(j * h);
    for (int j = 0; j < n; ++j) w[j] = std::sin((j + 0.5) * h);

    // Symmetrized pencil: C = W^{-1/2} A W^{-1/2}.
    Tridiag m;
    m.diag.resize(n);
    m.off.resize(n - 1);
    const double ih2 = 1.0 / (h * h);
    for (int j = 0; j < n; ++j) m.diag[j] = (fl[j] + fl[j + 1]) * ih2 / w[j];
    for (int j = 0; j + 1 < n; ++j) m.off[j] = -fl[j + 1] * ih2 / std::sqrt(w[j] * w[j + 1]);

    // Bisection bracket from Gershgorin discs.
    double hi = 0.0;
    for (int j = 0; j < n; ++j) {
        double r = m.diag[j];
        if (j > 0) r += std::abs(m.off[j - 1]);
        if (j + 1 < n) r += std::abs(m.off[j]);
        hi = std::max(hi, r);
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (sturm_count(m, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    double lambda = 0.5 * (lo + hi);

    // Inverse iteration for the ground state; keep the sweep with the
    // smallest residual (the floor is set by rounding at scale eps*||C||).
    std::vector<double> v(n, 1.0), best;
    double best_res = std::numeric_limits<double>::infinity();
    double shifted = lambda * (1.0 - 1e-10) - 1e-12;
    for (int it = 0; it < 4; ++it) {
        shifted_solve(m, shifted, v);
        double nrm = inf_norm(v);
        if (!(nrm > 0) || !std::isfinite(nrm)) throw std::runtime_error("circular_cone_lambda1: inverse iteration degenerated");
        for (double& x : v) x /= nrm;
        double res = 0;
        for (int j = 0; j < n; ++j) {
            double r = (m.diag[j] - lambda) * v[j];
            if (j > 0) r += m.off[j - 1] * v[j - 1];
            if (j + 1 < n) r += m.off[j] * v[j + 1];
            res = std::max(res, std::abs(r));
        }
        if (res < best_res) {
            best_res = res;
            best = v;
        }
        if (best_res < 1e-13 * hi) break;
    }
    if (best_res > std::max(5e-9 * lambda, 32.0 * 2.2e-16 * hi)) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "circular_cone_lambda1: eigen iteration stalled (theta0=%g mesh=%d lambda=%.12g residual=%.3g)",
                      theta0, n, lambda, best_res);
        throw std::runtime_error(buf);
    }
    v = best;

    // Rayleigh-quotient polish, then fix the sign (ground state has none).
    double num = 0, den = 0;
    for (int j = 0; j < n; ++j) {
        double av = m.diag[j] * v[j];
        if (j > 0) av += m.off[j - 1] * v[j - 1];
        if (j + 1 < n) av += m.off[j] * v[j + 1];
        num += v[j] * av;
        den += v[j] * v[j];
    }
    lambda = num / den;

    double sum = 0;
    for (double x : v) sum += x;
    if (sum < 0)
        for (double& x : v) x = -x;

    // Undo the symmetrization: physical eigenvector is W^{-1/2} v.
    std::vector<double> phys(n);
    for (int j = 0; j < n; ++j) phys[j] = v[j] / std::sqrt(w[j]);
    double mx = inf_norm(phys);
    for (double& x : phys) x /= mx;

    return SolveResult{lambda, std::move(phys)};
}

}  // namespace

double wedge_lambda1(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0 * kPi)) throw std::invalid_argument("wedge_lambda1: alpha must lie in (0, 2*pi)");
    return (kPi / alpha) * (kPi / alpha);
}

double p_exponent(double lambda1, int d) {
    if (!(lambda1 > 0.0)) throw std::invalid_argument("p_exponent: lambda1 must be positive");
    if (d < 2) throw std::invalid_argument("p_exponent: d must be >= 2");
    double q = 0.5 * d - 1.0;
    return std::sqrt(lambda1 + q * q) - q;
}

EigenTable circular_cone_lambda1(double theta0, int mesh) {
    if (!(theta0 > 0.0) || !(theta0 < kPi)) throw std::invalid_argument("circular_cone_lambda1: theta0 must lie in (0, pi)");
    if (mesh < 64) throw std::invalid_argument("circular_cone_lambda1: mesh must be >= 64");

    SolveResult fine = solve_section(theta0, mesh);
    SolveResult coarse = solve_section(theta0, mesh / 2);

    EigenTable t;
    t.lambda1 = fine.lambda;
    t.theta0 = theta0;
    t.mesh_size = mesh;
    t.est_error = std::abs(fine.lambda - coarse.lambda) / 3.0;

    // Node table: even-symmetric extrapolation to the pole, cell centers,
    // and the Dirichlet zero at theta0.
    const int n = mesh;
    const double h = theta0 / (n + 0.5);
    t.theta_grid.resize(n + 2);
    t.m1_values.resize(n + 2);
    t.theta_grid[0] = 0.0;
    for (int j = 0; j < n; ++j) t.theta_grid[j + 1] = (j + 0.5) * h;
    t.theta_grid[n + 1] = theta0;
    double b = (fine.vec[1] - fine.vec[0]) / (2.0 * h * h);
    double pole = fine.vec[0] - b * 0.25 * h * h;
    t.m1_values[0] = pole;
    for (int j = 0; j < n; ++j) t.m1_values[j + 1] = fine.vec[j];
    t.m1_values[n + 1] = 0.0;

    double mx = 0;
    for (double v : t.m1_values) mx = std::max(mx, v);
    for (double& v : t.m1_values) v /= mx;
    return t;
}

double EigenTable::interpolate(double t) const {
    if (mesh_size < 1) throw std::logic_error("EigenTable: not built");
    if (!(t >= 0.0) || t >= theta0) return 0.0;
    const int n = mesh_size;
    const double h = theta0 / (n + 0.5);
    int k;
    if (t < 0.5 * h) {
        k = 0;
    } else {
        k = 1 + static_cast<int>((t - 0.5 * h) / h);
        if (k > n) k = n;
    }
    double t0 = theta_grid[k], t1 = theta_grid[k + 1];
    double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * m1_values[k] + w * m1_values[k + 1];
}

double EigenTable::cell_slope(double t) const {
    if (mesh_size < 1) throw std::logic_error("EigenTable: not built");
    if (t <= 0.0 || t >= theta0) return 0.0;
    const int n = mesh_size;
    const double h = theta0 / (n + 0.5);
    int k;
    if (t < 0.5 * h) {
        k = 0;
    } else {
        k = 1 + static_cast<int>((t - 0.5 * h) / h);
        if (k > n) k = n;
    }
    return (m1_values[k + 1] - m1_values[k]) / (theta_grid[k + 1] - theta_grid[k]);
}

double EigenTable::fd_slope(double t) const {
    const double h = theta0 / (mesh_size + 0.5);
    double a = std::max(t - h, 0.0);
    double b = std::min(t + h, theta0);
    if (b <= a) return 0.0;
    return (interpolate(b) - interpolate(a)) / (b - a);
}

EigenTable eigen_table_from_csv(const std::string& csv, double lambda1, double theta0, int mesh,
                                double est_error) {
    EigenTable t;
    t.lambda1 = lambda1;
    t.theta0 = theta0;
    t.mesh_size = mesh;
    t.est_error = est_error;
    size_t pos = csv.find('\n');
    if (pos == std::string::npos) throw std::invalid_argument("eigen_table_from_csv: missing header row");
    ++pos;
    while (pos < csv.size()) {
        size_t eol = csv.find('\n', pos);
        if (eol == std::string::npos) eol = csv.size();
        std::string line = csv.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("eigen_table_from_csv: bad row '" + line + "'");
        t.theta_grid.push_back(std::stod(line.substr(0, comma)));
        t.m1_values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (static_cast<int>(t.theta_grid.size()) != mesh + 2)
        throw std::invalid_argument("eigen_table_from_csv: row count does not match the mesh");
    return t;
}

std::string eigen_table_csv(const EigenTable& table) {
    std::string out = "theta,m1\n";
    char buf[80];
    for (size_t i = 0; i < table.theta_grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", table.theta_grid[i], table.m1_values[i]);
        out += buf;
    }
    return out;
}

}  // namespace conewalk
