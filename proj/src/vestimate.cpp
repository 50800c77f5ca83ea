#include "vestimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace conewalk {

ShiftSequence::ShiftSequence(double gamma_, double r0_, Vec x0_) : gamma(gamma_), r0(r0_), x0(x0_) {
    if (!(gamma > 0.0) || !(gamma < 0.5)) throw std::invalid_argument("ShiftSequence: gamma must lie in (0, 1/2)");
    if (!(r0 > 0.0)) throw std::invalid_argument("ShiftSequence: R0 must be positive");
}

ShiftSequence ShiftSequence::standard(const ConeSpec& cone) {
    return with_gamma(cone, 0.25 * std::min(0.5, cone.p()));
}

ShiftSequence ShiftSequence::with_gamma(const ConeSpec& cone, double gamma) {
    if (!(gamma > 0.0) || !(gamma < std::min(0.5, cone.p())))
        throw std::invalid_argument("ShiftSequence: gamma must lie in (0, min(1/2, p))");
    return ShiftSequence(gamma, cone.r0(), cone.x0());
}

double ShiftSequence::magnitude(int64_t k) const {
    if (k <= 0) return 0.0;
    return std::pow(static_cast<double>(k), 0.5 - gamma) * r0;
}

Vec ShiftSequence::offset(int64_t k) const { return magnitude(k) * x0; }

Schedule::Schedule(int64_t n0_, double epsilon_, int64_t cap) : n0(n0_), epsilon(epsilon_) {
    if (n0 < 2) throw std::invalid_argument("Schedule: n0 must be >= 2");
    if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw std::invalid_argument("Schedule: epsilon must lie in (0, 1/2)");
    if (cap < n0) throw std::invalid_argument("Schedule: cap must be >= n0");
    terms.push_back(n0);
    for (int m = 1;; ++m) {
        double expo = std::pow(1.0 - epsilon, -static_cast<double>(m));
        double v = std::pow(static_cast<double>(n0), expo);
        if (v > 9.0e18) break;
        int64_t t = static_cast<int64_t>(std::floor(v + 1e-9));
        if (t > cap) break;
        if (t > terms.back()) terms.push_back(t);
    }
}

EstimateCI f_hat(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                 int64_t n_samples, uint64_t seed, uint32_t stream, int threads) {
    const ConeSpec& cone = form.cone();
    check_dim(x, cone.dim(), "f_hat");
    if (!cone.contains(x)) throw std::invalid_argument("f_hat: x must lie in the open cone");
    const double u0 = form.u(x);
    auto parts = map_chunks<Welford>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Welford& w) {
        Vec step(cone.dim());
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            law.sample(rng, step);
            w.add(form.u(x + step) - u0);
        }
    });
    Welford w;
    for (const auto& p : parts) w.merge(p);
    return w.estimate(seed, stream);
}

namespace {

// Shared walker: evaluates, per sample, the direct and (optionally) shifted
// values at each checkpoint of an increasing k-grid with one pass.
struct TraceAcc {
    std::vector<Welford> direct;
    std::vector<Welford> shifted;
    std::vector<Welford> gap;
};

void trace_walk(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                const std::vector<int64_t>& k_grid, const ShiftSequence* shift,
                int64_t n_samples, uint64_t seed, uint32_t stream, int threads,
                std::vector<Welford>& direct_out, std::vector<Welford>& shifted_out,
                std::vector<Welford>& gap_out) {
    const ConeSpec& cone = form.cone();
    const int64_t k_max = k_grid.back();
    std::vector<Vec> offsets;
    if (shift) {
        offsets.reserve(k_grid.size());
        for (int64_t k : k_grid) offsets.push_back(shift->offset(k));
    }

    auto parts = map_chunks<TraceAcc>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, TraceAcc& acc) {
        acc.direct.resize(k_grid.size());
        if (shift) {
            acc.shifted.resize(k_grid.size());
            acc.gap.resize(k_grid.size());
        }
        Vec pos(cone.dim()), step(cone.dim());
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            pos = x;
            bool alive = true;
            size_t j = 0;
            // k = 0 checkpoints (u(x) deterministic) are allowed in the grid
            while (j < k_grid.size() && k_grid[j] == 0) {
                double d = form.u(x);
                acc.direct[j].add(d);
                if (shift) {
                    acc.shifted[j].add(d);
                    acc.gap[j].add(0.0);
                }
                ++j;
            }
            for (int64_t k = 1; k <= k_max && j < k_grid.size() && alive; ++k) {
                law.sample(rng, step);
                pos += step;
                if (!cone.contains(pos)) {
                    alive = false;
                    break;
                }
                if (k == k_grid[j]) {
                    double d = form.u(pos);
                    acc.direct[j].add(d);
                    if (shift) {
                        double s = form.u(pos + offsets[j]);
                        acc.shifted[j].add(s);
                        acc.gap[j].add(s - d);
                    }
                    ++j;
                }
            }
            for (; j < k_grid.size(); ++j) {  // killed: remaining checkpoints are 0
                acc.direct[j].add(0.0);
                if (shift) {
                    acc.shifted[j].add(0.0);
                    acc.gap[j].add(0.0);
                }
            }
        }
    });

    direct_out.assign(k_grid.size(), Welford{});
    shifted_out.assign(shift ? k_grid.size() : 0, Welford{});
    gap_out.assign(shift ? k_grid.size() : 0, Welford{});
    for (const auto& a : parts) {
        for (size_t j = 0; j < k_grid.size(); ++j) {
            direct_out[j].merge(a.direct[j]);
            if (shift) {
                shifted_out[j].merge(a.shifted[j]);
                gap_out[j].merge(a.gap[j]);
            }
        }
    }
}

void validate_point(const HarmonicForm& form, const Vec& x, const char* where) {
    check_dim(x, form.cone().dim(), where);
    if (!form.cone().contains(x)) throw std::invalid_argument(std::string(where) + ": x must lie in the open cone");
}

}  // namespace

EstimateCI estimate_direct(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                           int64_t k, int64_t n_samples, uint64_t seed, uint32_t stream,
                           int threads) {
    validate_point(form, x, "estimate_direct");
    if (k < 0) throw std::invalid_argument("estimate_direct: k must be >= 0");
    if (k == 0) return EstimateCI{form.u(x), 0.0, n_samples, seed, stream, 0};
    std::vector<Welford> d, s, g;
    trace_walk(form, law, x, {k}, nullptr, n_samples, seed, stream, threads, d, s, g);
    return d[0].estimate(seed, stream);
}

EstimateCI estimate_shifted(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                            int64_t k, const ShiftSequence& shift, int64_t n_samples,
                            uint64_t seed, uint32_t stream, int threads) {
    validate_point(form, x, "estimate_shifted");
    if (k < 0) throw std::invalid_argument("estimate_shifted: k must be >= 0");
    if (k == 0) return EstimateCI{form.u(x), 0.0, n_samples, seed, stream, 0};
    std::vector<Welford> d, s, g;
    trace_walk(form, law, x, {k}, &shift, n_samples, seed, stream, threads, d, s, g);
    return s[0].estimate(seed, stream);
}

DecomposeResult decompose_paths(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                                int64_t k, const ShiftSequence& shift, int64_t n_samples,
                                uint64_t seed, uint32_t stream, int threads) {
    validate_point(form, x, "decompose_paths");
    if (k < 1) throw std::invalid_argument("decompose_paths: k must be >= 1");
    const ConeSpec& cone = form.cone();
    const double u0 = form.u(x);

    std::vector<Vec> offsets(static_cast<size_t>(k) + 1);
    for (int64_t l = 0; l <= k; ++l) offsets[static_cast<size_t>(l)] = shift.offset(l);

    struct Acc {
        Welford w1, w2, w3, lhs;
        int64_t violations = 0;
        double max_err = 0;
    };
    auto parts = map_chunks<Acc>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Acc& acc) {
        Vec pos(cone.dim()), step(cone.dim());
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            pos = x;
            double w1 = 0.0;
            Kahan w2, w3;
            double u_prev = u0;  // u(position + g_{l-1}) carried across steps
            double lhs = 0.0;
            bool alive = true;
            for (int64_t l = 1; l <= k && alive; ++l) {
                law.sample(rng, step);
                pos += step;
                bool inside = cone.contains(pos);
                double u_new_shift = form.u(pos + offsets[static_cast<size_t>(l)]);
                double u_old_shift = form.u(pos + offsets[static_cast<size_t>(l - 1)]);
                w2.add(u_new_shift - u_old_shift);
                w3.add(u_old_shift - u_prev);
                if (!inside) {
                    w1 = u_new_shift;  // exit term u(x + g_tau + S(tau))
                    alive = false;
                } else {
                    u_prev = u_new_shift;
                    if (l == k) lhs = u_new_shift;
                }
            }
            double rhs = u0 - w1 + w2.value() + w3.value();
            double err = std::abs(lhs - rhs);
            double tol = 1e-9 * std::max({1.0, std::abs(u0), std::abs(lhs)});
            if (err > tol) ++acc.violations;
            if (err > acc.max_err) acc.max_err = err;
            acc.w1.add(w1);
            acc.w2.add(w2.value());
            acc.w3.add(w3.value());
            acc.lhs.add(lhs);
        }
    });

    Welford w1, w2, w3, lhs;
    DecomposeResult r;
    for (const auto& a : parts) {
        w1.merge(a.w1);
        w2.merge(a.w2);
        w3.merge(a.w3);
        lhs.merge(a.lhs);
        r.identity_violations += a.violations;
        r.max_identity_error = std::max(r.max_identity_error, a.max_err);
    }
    r.w1 = w1.estimate(seed, stream);
    r.w2 = w2.estimate(seed, stream);
    r.w3 = w3.estimate(seed, stream);
    r.lhs = lhs.estimate(seed, stream);
    r.u0 = u0;
    return r;
}

Construction1Result estimate_v_construction1(const HarmonicForm& form, const IncrementLaw& law,
                                             const Vec& x, const ShiftSequence& shift,
                                             const std::vector<int64_t>& k_grid,
                                             int64_t n_samples, uint64_t seed, uint32_t stream,
                                             int threads) {
    validate_point(form, x, "estimate_v_construction1");
    if (k_grid.size() < 4) throw std::invalid_argument("estimate_v_construction1: k grid needs >= 4 points");
    for (size_t j = 0; j + 1 < k_grid.size(); ++j)
        if (k_grid[j] >= k_grid[j + 1]) throw std::invalid_argument("estimate_v_construction1: k grid must increase");
    if (k_grid.front() < 1) throw std::invalid_argument("estimate_v_construction1: k grid must start at k >= 1");
    if (static_cast<double>(k_grid.back()) < 100.0 * static_cast<double>(k_grid.front()))
        throw std::invalid_argument("estimate_v_construction1: k grid must span at least two decades");

    std::vector<Welford> d, s, g;
    trace_walk(form, law, x, k_grid, &shift, n_samples, seed, stream, threads, d, s, g);

    Construction1Result r;
    r.k_grid = k_grid;
    for (size_t j = 0; j < k_grid.size(); ++j) {
        r.direct_trace.push_back(d[j].estimate(seed, stream));
        r.shifted_trace.push_back(s[j].estimate(seed, stream));
        r.gap_trace.push_back(g[j].estimate(seed, stream));
    }
    size_t half = k_grid.size() / 2;
    const EstimateCI& last = r.direct_trace.back();
    for (size_t j = half; j + 1 < k_grid.size(); ++j) {
        r.stabilization = std::max(r.stabilization, std::abs(r.direct_trace[j].mean - last.mean));
        r.stabilization_noise = std::max(r.stabilization_noise, r.direct_trace[j].stderr_ + last.stderr_);
    }
    r.stabilized = r.stabilization <= 5.0 * std::max(r.stabilization_noise, 1e-300);
    r.v_hat = last;
    if (!r.stabilized) r.v_hat.flags |= EstimateCI::kFlagNotStabilized;
    return r;
}

Construction2Result estimate_v_construction2(const HarmonicForm& form, const IncrementLaw& law,
                                             const Vec& x, const Schedule& schedule,
                                             int64_t n_samples, uint64_t seed, uint32_t stream,
                                             int threads) {
    validate_point(form, x, "estimate_v_construction2");
    if (schedule.n0 < 32) throw std::invalid_argument("estimate_v_construction2: schedule.n0 must be >= 32");
    if (schedule.terms.size() < 2) throw std::invalid_argument("estimate_v_construction2: schedule has fewer than 2 terms");

    std::vector<Welford> d, s, g;
    trace_walk(form, law, x, schedule.terms, nullptr, n_samples, seed, stream, threads, d, s, g);

    Construction2Result r;
    r.terms = schedule.terms;
    for (size_t j = 0; j < schedule.terms.size(); ++j) r.per_term.push_back(d[j].estimate(seed, stream));
    for (size_t j = 0; j + 1 < r.per_term.size(); ++j) {
        double a = r.per_term[j].mean, b = r.per_term[j + 1].mean;
        r.ratios.push_back(a != 0.0 ? b / a : 0.0);
    }
    size_t half = r.per_term.size() / 2;
    double stab = 0, noise = 0;
    const EstimateCI& last = r.per_term.back();
    for (size_t j = half; j + 1 < r.per_term.size(); ++j) {
        stab = std::max(stab, std::abs(r.per_term[j].mean - last.mean));
        noise = std::max(noise, r.per_term[j].stderr_ + last.stderr_);
    }
    r.stabilized = stab <= 5.0 * std::max(noise, 1e-300);
    r.v_hat = last;
    if (!r.stabilized) r.v_hat.flags |= EstimateCI::kFlagNotStabilized;
    return r;
}

EstimateCI harmonicity_residual(const HarmonicForm& form, const IncrementLaw& law, const Vec& x,
                                const VOracle& v_oracle, int64_t n_samples, uint64_t seed,
                                uint32_t stream, int threads) {
    validate_point(form, x, "harmonicity_residual");
    const ConeSpec& cone = form.cone();

    // Outer draws use common random numbers; each inner evaluation runs on a
    // child stream keyed by the outer sample index.
    auto parts = map_chunks<Welford>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Welford& w) {
        Vec step(cone.dim());
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            law.sample(rng, step);
            Vec y = x + step;
            double val = 0.0;
            if (cone.contains(y)) val = v_oracle(y, derive_key(seed, stream + 1, static_cast<uint64_t>(i))).mean;
            w.add(val);
        }
    });
    Welford w;
    for (const auto& p : parts) w.merge(p);

    EstimateCI vx = v_oracle(x, derive_key(seed, stream + 2, 0));
    EstimateCI r;
    r.mean = w.mean - vx.mean;
    r.stderr_ = std::sqrt(w.stderr_of_mean() * w.stderr_of_mean() + vx.stderr_ * vx.stderr_);
    r.n_samples = w.n;
    r.seed = seed;
    r.stream = stream;
    return r;
}

}  // namespace conewalk
