#include "walk.hpp"

#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace conewalk {

KilledSample simulate_killed(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                             int64_t horizon, Rng& rng) {
    check_dim(x, cone.dim(), "simulate_killed");
    if (!cone.contains(x)) throw std::invalid_argument("simulate_killed: start point must lie in the open cone");
    if (horizon < 1) throw std::invalid_argument("simulate_killed: horizon must be >= 1");
    if (law.dim() != cone.dim()) throw std::invalid_argument("simulate_killed: law/cone dimension mismatch");

    KilledSample s;
    Vec pos = x;
    Vec step(cone.dim());
    s.running_max = pos.norm();
    for (int64_t k = 1; k <= horizon; ++k) {
        law.sample(rng, step);
        pos += step;
        double nrm = pos.norm();
        if (nrm > s.running_max) s.running_max = nrm;
        if (!cone.contains(pos)) {
            s.survived = false;
            s.censored = false;
            s.tau = k;
            s.terminal = pos;
            s.exit_point = pos;
            return s;
        }
    }
    s.survived = true;
    s.censored = true;
    s.tau = horizon;
    s.terminal = pos;
    return s;
}

EstimateCI survival_estimate(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                             int64_t n, int64_t n_samples, uint64_t seed, uint32_t stream,
                             int threads) {
    if (n_samples < 100) throw std::invalid_argument("survival_estimate: need at least 100 samples");
    std::vector<int64_t> grid{n};
    return survival_curve(cone, law, x, grid, n_samples, seed, stream, threads)[0];
}

std::vector<EstimateCI> survival_curve(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                                       const std::vector<int64_t>& n_grid, int64_t n_samples,
                                       uint64_t seed, uint32_t stream, int threads) {
    check_dim(x, cone.dim(), "survival_curve");
    if (!cone.contains(x)) throw std::invalid_argument("survival_curve: start point must lie in the open cone");
    if (n_grid.empty()) throw std::invalid_argument("survival_curve: empty n grid");
    for (size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw std::invalid_argument("survival_curve: n must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("survival_curve: n grid must be strictly increasing");
    }
    const int64_t n_max = n_grid.back();

    struct Counts {
        std::vector<int64_t> alive;
    };
    auto parts = map_chunks<Counts>(n_samples, threads, [&](int64_t id, int64_t begin, int64_t end, Counts& c) {
        (void)id;
        c.alive.assign(n_grid.size(), 0);
        Vec pos(cone.dim()), step(cone.dim());
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            pos = x;
            int64_t tau = n_max + 1;  // censored marker
            for (int64_t k = 1; k <= n_max; ++k) {
                law.sample(rng, step);
                pos += step;
                if (!cone.contains(pos)) {
                    tau = k;
                    break;
                }
            }
            for (size_t j = 0; j < n_grid.size(); ++j)
                if (tau > n_grid[j]) ++c.alive[j];
        }
    });

    std::vector<EstimateCI> out(n_grid.size());
    for (size_t j = 0; j < n_grid.size(); ++j) {
        int64_t alive = 0;
        for (const auto& c : parts) alive += c.alive[j];
        double p = static_cast<double>(alive) / static_cast<double>(n_samples);
        EstimateCI e;
        e.mean = p;
        e.stderr_ = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n_samples));
        e.n_samples = n_samples;
        e.seed = seed;
        e.stream = stream;
        out[j] = e;
    }
    return out;
}

TauMomentResult tau_moment_probe(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                                 double beta, int64_t horizon, int64_t n_samples, uint64_t seed,
                                 uint32_t stream, int threads) {
    check_dim(x, cone.dim(), "tau_moment_probe");
    if (!(beta > 0.0) || !(beta < cone.p()))
        throw std::invalid_argument("tau_moment_probe: beta must lie in (0, p); p = " + std::to_string(cone.p()));
    if (!cone.contains(x)) throw std::invalid_argument("tau_moment_probe: start point must lie in the open cone");
    if (horizon < 1) throw std::invalid_argument("tau_moment_probe: horizon must be >= 1");
    if (n_samples < 1) throw std::invalid_argument("tau_moment_probe: need at least one sample");

    struct Acc {
        Welford w;
        int64_t censored = 0;
        double censored_sum = 0;
    };
    const double half_beta = 0.5 * beta;
    auto parts = map_chunks<Acc>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Acc& a) {
        Vec pos(cone.dim()), step(cone.dim());
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            pos = x;
            int64_t tau = horizon;
            bool cens = true;
            for (int64_t k = 1; k <= horizon; ++k) {
                law.sample(rng, step);
                pos += step;
                if (!cone.contains(pos)) {
                    tau = k;
                    cens = false;
                    break;
                }
            }
            double v = std::pow(static_cast<double>(tau), half_beta);
            a.w.add(v);
            if (cens) {
                ++a.censored;
                a.censored_sum += v;
            }
        }
    });

    Welford w;
    int64_t censored = 0;
    double censored_sum = 0;
    for (const auto& a : parts) {
        w.merge(a.w);
        censored += a.censored;
        censored_sum += a.censored_sum;
    }
    TauMomentResult r;
    r.censored_fraction = static_cast<double>(censored) / static_cast<double>(n_samples);
    double total = w.mean * static_cast<double>(w.n);
    r.censored_mass_fraction = total > 0 ? censored_sum / total : 0.0;
    uint32_t flags = r.censored_mass_fraction > 0.01 ? EstimateCI::kFlagCensoring : 0;
    r.estimate = w.estimate(seed, stream, flags);
    return r;
}

MaxTailResult max_tail_probe(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                             int64_t n, double t_exp, double eps, int64_t n_samples, uint64_t seed,
                             uint32_t stream, int threads) {
    check_dim(x, cone.dim(), "max_tail_probe");
    if (!cone.contains(x)) throw std::invalid_argument("max_tail_probe: start point must lie in the open cone");
    if (n < 1) throw std::invalid_argument("max_tail_probe: n must be >= 1");
    if (n_samples < 1) throw std::invalid_argument("max_tail_probe: need at least one sample");
    if (t_exp > law.moment_order())
        throw std::invalid_argument("max_tail_probe: t exceeds the law's finite moment order");

    const double threshold = std::pow(static_cast<double>(n), 0.5 + 0.5 * eps);
    struct Acc {
        Welford trunc;
        Welford tau;
    };
    auto parts = map_chunks<Acc>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Acc& a) {
        Vec pos(cone.dim()), step(cone.dim());
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            pos = x;
            double max_s = 0.0;  // max |S(k)| = |pos - x|
            int64_t tau = n + 1;
            for (int64_t k = 1; k <= n; ++k) {
                law.sample(rng, step);
                pos += step;
                double s2 = 0;
                for (int j = 0; j < x.d; ++j) {
                    double dj = pos[j] - x[j];
                    s2 += dj * dj;
                }
                double snorm = std::sqrt(s2);
                if (snorm > max_s) max_s = snorm;
                if (!cone.contains(pos)) {
                    tau = k;
                    break;
                }
            }
            bool survived = tau > n;
            double v = (survived && max_s > threshold) ? std::pow(max_s, t_exp) : 0.0;
            a.trunc.add(v);
            a.tau.add(static_cast<double>(std::min(tau, n)));
        }
    });

    Welford trunc, tau;
    for (const auto& a : parts) {
        trunc.merge(a.trunc);
        tau.merge(a.tau);
    }
    MaxTailResult r;
    r.truncated = trunc.estimate(seed, stream);
    r.tau_companion = tau.estimate(seed, stream);
    r.ratio = tau.mean > 0 ? trunc.mean / tau.mean : 0.0;
    return r;
}

std::vector<std::vector<Vec>> audit_paths(const ConeSpec& cone, const IncrementLaw& law,
                                          const Vec& x, int64_t horizon,
                                          const std::vector<int64_t>& indices, uint64_t seed,
                                          uint32_t stream) {
    std::vector<std::vector<Vec>> out;
    out.reserve(indices.size());
    Vec step(cone.dim());
    for (int64_t idx : indices) {
        Rng rng(seed, stream, static_cast<uint64_t>(idx));
        std::vector<Vec> path{x};
        Vec pos = x;
        for (int64_t k = 1; k <= horizon; ++k) {
            law.sample(rng, step);
            pos += step;
            path.push_back(pos);
            if (!cone.contains(pos)) break;
        }
        out.push_back(std::move(path));
    }
    return out;
}

StandardizationReport standardization_audit(const IncrementLaw& law, int64_t n_samples,
                                            uint64_t seed, uint32_t stream, int threads) {
    const int d = law.dim();
    struct Acc {
        std::vector<Welford> coord;
        std::vector<Welford> sq;
        std::vector<Welford> cross;  // d*(d-1)/2 pairwise products
    };
    const int n_pairs = d * (d - 1) / 2;
    auto parts = map_chunks<Acc>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Acc& a) {
        a.coord.resize(d);
        a.sq.resize(d);
        a.cross.resize(n_pairs);
        Vec v(d);
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            law.sample(rng, v);
            int pair = 0;
            for (int j = 0; j < d; ++j) {
                a.coord[j].add(v[j]);
                a.sq[j].add(v[j] * v[j]);
                for (int k = j + 1; k < d; ++k) a.cross[pair++].add(v[j] * v[k]);
            }
        }
    });

    std::vector<Welford> coord(d), sq(d), cross(n_pairs);
    for (const auto& a : parts) {
        for (int j = 0; j < d; ++j) {
            coord[j].merge(a.coord[j]);
            sq[j].merge(a.sq[j]);
        }
        for (int k = 0; k < n_pairs; ++k) cross[k].merge(a.cross[k]);
    }

    StandardizationReport rep;
    for (int j = 0; j < d; ++j) {
        rep.means.push_back(coord[j].mean);
        rep.variances.push_back(sq[j].mean);
        double se_m = coord[j].stderr_of_mean();
        double se_v = sq[j].stderr_of_mean();
        if (se_m > 0) rep.max_abs_mean_z = std::max(rep.max_abs_mean_z, std::abs(coord[j].mean) / se_m);
        if (se_v > 0) rep.max_abs_var_z = std::max(rep.max_abs_var_z, std::abs(sq[j].mean - 1.0) / se_v);
    }
    for (int k = 0; k < n_pairs; ++k) {
        double se = cross[k].stderr_of_mean();
        if (se > 0) rep.max_abs_cov_z = std::max(rep.max_abs_cov_z, std::abs(cross[k].mean) / se);
    }
    rep.pass_4sigma = rep.max_abs_mean_z < 4.0 && rep.max_abs_var_z < 4.0 && rep.max_abs_cov_z < 4.0;
    return rep;
}

}  // namespace conewalk
