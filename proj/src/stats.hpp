#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conewalk {

/// Monte Carlo estimate with provenance. Bit-reproducible for a fixed
/// (seed, stream, n_samples) triple and any thread count.
struct EstimateCI {
    double mean = 0.0;
    double stderr_ = 0.0;
    int64_t n_samples = 0;
    uint64_t seed = 0;
    uint32_t stream = 0;
    uint32_t flags = 0;

    static constexpr uint32_t kFlagCensoring = 1u;      // censored mass above threshold
    static constexpr uint32_t kFlagNotStabilized = 2u;  // trace did not settle
};

/// Streaming mean/variance accumulator (Welford); merge combines two
/// accumulators exactly as if their samples were concatenated.
struct Welford {
    int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    void merge(const Welford& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        double d = o.mean - mean;
        int64_t t = n + o.n;
        mean += d * static_cast<double>(o.n) / static_cast<double>(t);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(t);
        n = t;
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderr_of_mean() const;

    EstimateCI estimate(uint64_t seed, uint32_t stream, uint32_t flags = 0) const {
        return EstimateCI{mean, stderr_of_mean(), n, seed, stream, flags};
    }
};

/// Compensated (Neumaier) summation; keeps pathwise telescoping identities
/// accurate to ~eps * sum of |terms| instead of eps * n * max|term|.
struct Kahan {
    double s = 0.0;
    double carry = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            carry += (s - t) + x;
        else
            carry += (x - t) + s;
        s = t;
    }
    double value() const { return s + carry; }
};

/// Weighted log-log regression output for tail-exponent fits.
struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    struct Point {
        double n;
        double estimate;
        double stderr_;
    };
    std::vector<Point> grid;
};

/// Weighted least squares of y against t with known per-point variances
/// (weights = 1/var). Throws std::invalid_argument on fewer than 3 points.
FitResult weighted_line_fit(const std::vector<double>& t, const std::vector<double>& y,
                            const std::vector<double>& var);

/// Regularized lower incomplete gamma P(a,x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double gamma_q(double a, double x);
/// Chi-square upper tail probability with dof degrees of freedom.
double chi_square_pvalue(double statistic, int dof);
/// Standard normal CDF.
double normal_cdf(double x);

/// CDF of the radial law with density proportional to r^(a-1) e^(-r^2/2)
/// evaluated via P(a/2, r^2/2); 'a' = p + d for cone endpoint radii.
double radial_cdf(double a, double r);
/// Quantile of the same law (bisection on radial_cdf).
double radial_quantile(double a, double prob);

/// Histogram goodness-of-fit report against an analytic target.
struct DensityTestReport {
    std::vector<double> edges;      // bin edges, last finite edge before overflow
    std::vector<int64_t> observed;  // per-bin counts; final entry = overflow bin
    std::vector<double> expected;   // same layout, sums to total observed
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
    double normalization_H0 = 0.0;
    double overflow_fraction = 0.0;
    std::vector<double> coord_means;    // scaled endpoint coordinate means
    std::vector<double> coord_stderrs;  // matching standard errors
    double radius_mean = 0.0;
    double radius_stderr = 0.0;
    int64_t survivors = 0;
};

/// Adaptive Simpson quadrature on [a,b].
double integrate(double (*f)(double, const void*), const void* ctx, double a, double b, int panels = 512);

}  // namespace conewalk
