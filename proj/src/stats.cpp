#include "stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace conewalk {

double Welford::stderr_of_mean() const {
    if (n < 2) return 0.0;
    double v = variance() / static_cast<double>(n);
    return v > 0 ? std::sqrt(v) : 0.0;
}

FitResult weighted_line_fit(const std::vector<double>& t, const std::vector<double>& y,
                            const std::vector<double>& var) {
    if (t.size() != y.size() || t.size() != var.size())
        throw std::invalid_argument("weighted_line_fit: size mismatch");
    if (t.size() < 3) throw std::invalid_argument("weighted_line_fit: need at least 3 points");

    double sw = 0, swt = 0, swy = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        double w = var[i] > 0 ? 1.0 / var[i] : 0.0;
        sw += w;
        swt += w * t[i];
        swy += w * y[i];
    }
    if (sw <= 0) throw std::invalid_argument("weighted_line_fit: all weights vanish");
    double tbar = swt / sw, ybar = swy / sw;

    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        double w = var[i] > 0 ? 1.0 / var[i] : 0.0;
        sxx += w * (t[i] - tbar) * (t[i] - tbar);
        sxy += w * (t[i] - tbar) * (y[i] - ybar);
    }
    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * tbar;
    fit.slope_stderr = std::sqrt(1.0 / sxx);

    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        double w = var[i] > 0 ? 1.0 / var[i] : 0.0;
        double r = y[i] - fit.intercept - fit.slope * t[i];
        ss_res += w * r * r;
        ss_tot += w * (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0) throw std::invalid_argument("gamma_p: a must be positive");
    if (x < 0) throw std::invalid_argument("gamma_p: x must be nonnegative");
    if (x == 0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0) throw std::invalid_argument("gamma_q: a must be positive");
    if (x < 0) throw std::invalid_argument("gamma_q: x must be nonnegative");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_pvalue(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
    if (statistic <= 0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double radial_cdf(double a, double r) {
    if (r <= 0) return 0.0;
    return gamma_p(0.5 * a, 0.5 * r * r);
}

double radial_quantile(double a, double prob) {
    if (prob <= 0) return 0.0;
    if (prob >= 1) return std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = 1.0;
    while (radial_cdf(a, hi) < prob) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (radial_cdf(a, mid) < prob)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double integrate(double (*f)(double, const void*), const void* ctx, double a, double b, int panels) {
    if (panels % 2) ++panels;
    double h = (b - a) / panels;
    double s = f(a, ctx) + f(b, ctx);
    for (int i = 1; i < panels; ++i) s += f(a + i * h, ctx) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace conewalk
