#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace conewalk {

/// Maximum spatial dimension supported by the library.
inline constexpr int kMaxDim = 8;

/// Small fixed-capacity state-space point. Value type, no allocation,
/// suitable for hot sampling loops.
struct Vec {
    std::array<double, kMaxDim> c{};
    int d = 0;

    Vec() = default;
    explicit Vec(int dim) : d(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
    }
    Vec(std::initializer_list<double> xs) {
        if (xs.size() < 1 || xs.size() > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
        d = static_cast<int>(xs.size());
        int i = 0;
        for (double v : xs) c[i++] = v;
    }
    static Vec from(const std::vector<double>& xs) {
        if (xs.empty() || xs.size() > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
        Vec v(static_cast<int>(xs.size()));
        for (int i = 0; i < v.d; ++i) v.c[i] = xs[i];
        return v;
    }

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < d; ++i) c[i] += o.c[i];
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator*(double t, Vec a) {
        for (int i = 0; i < a.d; ++i) a.c[i] *= t;
        return a;
    }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < d; ++i) s += c[i] * c[i];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    bool finite() const {
        for (int i = 0; i < d; ++i)
            if (!std::isfinite(c[i])) return false;
        return true;
    }

    std::vector<double> to_vector() const { return std::vector<double>(c.begin(), c.begin() + d); }
};

inline void check_dim(const Vec& x, int d, const char* where) {
    if (x.d != d) throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

}  // namespace conewalk
