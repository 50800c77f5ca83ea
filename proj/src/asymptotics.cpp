#include "asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "eigen_section.hpp"
#include "parallel.hpp"

namespace conewalk {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TailFitResult tail_exponent_fit(const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
                                const std::vector<int64_t>& n_grid, int64_t n_samples,
                                uint64_t seed, uint32_t stream, int threads,
                                int64_t min_survivors) {
    if (n_grid.size() < 3) throw std::invalid_argument("tail_exponent_fit: need at least 3 grid points");
    if (static_cast<double>(n_grid.back()) < 100.0 * static_cast<double>(n_grid.front()))
        throw std::invalid_argument("tail_exponent_fit: n grid must span at least two decades");

    auto curve = survival_curve(cone, law, x, n_grid, n_samples, seed, stream, threads);

    TailFitResult r;
    size_t keep = curve.size();
    while (keep > 0 && curve[keep - 1].mean * static_cast<double>(n_samples) < static_cast<double>(min_survivors)) --keep;
    r.truncated_points = static_cast<int>(curve.size() - keep);
    if (keep < 3) throw std::runtime_error("tail_exponent_fit: fewer than 3 grid points have enough survivors");

    std::vector<double> t, y, var;
    for (size_t j = 0; j < keep; ++j) {
        double p = curve[j].mean;
        t.push_back(std::log(static_cast<double>(n_grid[j])));
        y.push_back(std::log(p));
        // delta method: var(log p_hat) = var(p_hat)/p^2
        double se = curve[j].stderr_ / p;
        var.push_back(se * se);
        r.n_grid.push_back(n_grid[j]);
        r.survival.push_back(curve[j]);
        r.fit.grid.push_back({static_cast<double>(n_grid[j]), p, curve[j].stderr_});
    }
    auto grid_backup = r.fit.grid;
    r.fit = weighted_line_fit(t, y, var);
    r.fit.grid = std::move(grid_backup);
    return r;
}

KappaTraceResult kappa_ratio_trace(const ConeSpec& cone, const IncrementLaw& law,
                                   const std::vector<Vec>& x_list,
                                   const std::vector<int64_t>& n_grid,
                                   const std::vector<EstimateCI>& v_hats, int64_t n_samples,
                                   uint64_t seed, uint32_t stream, int threads) {
    if (x_list.empty()) throw std::invalid_argument("kappa_ratio_trace: empty x list");
    if (x_list.size() != v_hats.size()) throw std::invalid_argument("kappa_ratio_trace: x list and v_hats differ in length");
    const double half_p = 0.5 * cone.p();

    KappaTraceResult out;
    for (size_t xi = 0; xi < x_list.size(); ++xi) {
        auto curve = survival_curve(cone, law, x_list[xi], n_grid, n_samples, seed,
                                    stream + static_cast<uint32_t>(xi), threads);
        double last_ratio = 0, prev_ratio = 0, last_se = 0, prev_se = 0;
        for (size_t j = 0; j < n_grid.size(); ++j) {
            double scale = std::pow(static_cast<double>(n_grid[j]), half_p) / v_hats[xi].mean;
            double ratio = curve[j].mean * scale;
            double rel_p = curve[j].mean > 0 ? curve[j].stderr_ / curve[j].mean : 0.0;
            double rel_v = v_hats[xi].mean != 0 ? v_hats[xi].stderr_ / v_hats[xi].mean : 0.0;
            double se = std::abs(ratio) * std::sqrt(rel_p * rel_p + rel_v * rel_v);
            out.rows.push_back({x_list[xi], n_grid[j], ratio, se});
            prev_ratio = last_ratio;
            prev_se = last_se;
            last_ratio = ratio;
            last_se = se;
        }
        out.final_ratios.push_back(last_ratio);
        bool stable = n_grid.size() < 2 || std::abs(last_ratio - prev_ratio) <= 2.0 * (last_se + prev_se);
        out.per_x_stabilized.push_back(stable);
    }
    double mx = *std::max_element(out.final_ratios.begin(), out.final_ratios.end());
    double mn = *std::min_element(out.final_ratios.begin(), out.final_ratios.end());
    double mean = 0;
    for (double v : out.final_ratios) mean += v;
    mean /= static_cast<double>(out.final_ratios.size());
    out.cross_x_spread = mean != 0 ? (mx - mn) / mean : 0.0;
    return out;
}

double h0_normalization(const HarmonicForm& form) {
    const ConeSpec& cone = form.cone();
    const double p = cone.p();
    const int d = cone.dim();
    // Radial factor: integral of r^(p+d-1) e^(-r^2/2) dr over (0, inf).
    double a = 0.5 * (p + d);
    double radial = std::exp((a - 1.0) * std::log(2.0) + std::lgamma(a));

    double angular = 0.0;
    switch (cone.variant()) {
        case ConeVariant::HalfLine:
            angular = 1.0;
            break;
        case ConeVariant::HalfSpace: {
            // integral of cos(phi) over the upper hemisphere of S^{d-1}:
            // vol(S^{d-2}) / (d-1)
            double vol = 2.0 * std::pow(kPi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d - 1));
            angular = vol / static_cast<double>(d - 1);
            break;
        }
        case ConeVariant::Wedge2D: {
            struct Ctx {
                double p;
            } ctx{p};
            angular = integrate(
                [](double t, const void* c) { return std::sin(static_cast<const Ctx*>(c)->p * t); }, &ctx,
                0.0, cone.angle(), 2048);
            break;
        }
        case ConeVariant::Orthant:
            // separable: each factor integrates y e^{-y^2/2} to 1, so the full
            // integral is 1 and H0 = 1 exactly
            return 1.0;
        case ConeVariant::CircularCone3D: {
            const EigenTable* tab = cone.eigen_table().get();
            if (!tab) throw std::logic_error("h0_normalization: circular cone has no eigen table");
            struct Ctx {
                const EigenTable* tab;
            } ctx{tab};
            angular = 2.0 * kPi *
                      integrate([](double t, const void* c) { return static_cast<const Ctx*>(c)->tab->interpolate(t) * std::sin(t); },
                                &ctx, 0.0, tab->theta0, 4096);
            break;
        }
    }
    return 1.0 / (angular * radial);
}

DensityTestReport conditional_density_test(const HarmonicForm& form, const IncrementLaw& law,
                                           const Vec& x, int64_t n, int64_t n_samples, int bins,
                                           uint64_t seed, uint32_t stream, int threads,
                                           int64_t min_survivors) {
    const ConeSpec& cone = form.cone();
    check_dim(x, cone.dim(), "conditional_density_test");
    if (!cone.contains(x)) throw std::invalid_argument("conditional_density_test: x must lie in the open cone");
    if (bins < 4) throw std::invalid_argument("conditional_density_test: need at least 4 bins");

    const int d = cone.dim();
    const double a = cone.p() + static_cast<double>(d);
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    // Equal-mass edges over the bulk; mass beyond the 0.999 quantile goes to
    // the overflow bin.
    const double bulk = 0.999;
    std::vector<double> edges(bins + 1);
    edges[0] = 0.0;
    for (int b = 1; b <= bins; ++b) edges[b] = radial_quantile(a, bulk * static_cast<double>(b) / bins);

    struct Acc {
        std::vector<int64_t> counts;
        std::vector<Welford> coords;
        Welford radius;
    };
    auto parts = map_chunks<Acc>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Acc& acc) {
        acc.counts.assign(bins + 1, 0);
        acc.coords.resize(d);
        Vec pos(d), step(d);
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            pos = x;
            bool alive = true;
            for (int64_t k = 1; k <= n; ++k) {
                law.sample(rng, step);
                pos += step;
                if (!cone.contains(pos)) {
                    alive = false;
                    break;
                }
            }
            if (!alive) continue;
            double r = pos.norm() / sqrt_n;
            acc.radius.add(r);
            for (int j = 0; j < d; ++j) acc.coords[j].add(pos[j] / sqrt_n);
            auto it = std::upper_bound(edges.begin() + 1, edges.end(), r);
            acc.counts[static_cast<size_t>(it - edges.begin()) - 1] += 1;
        }
    });

    std::vector<int64_t> counts(bins + 1, 0);
    std::vector<Welford> coords(d);
    Welford radius;
    for (const auto& acc : parts) {
        for (int b = 0; b <= bins; ++b) counts[b] += acc.counts[b];
        for (int j = 0; j < d; ++j) coords[j].merge(acc.coords[j]);
        radius.merge(acc.radius);
    }
    int64_t survivors = radius.n;
    if (survivors < min_survivors)
        throw std::runtime_error("conditional_density_test: only " + std::to_string(survivors) +
                                 " survivors; increase n_samples (need >= " + std::to_string(min_survivors) + ")");

    DensityTestReport rep;
    rep.survivors = survivors;
    rep.edges = edges;
    rep.observed = counts;
    rep.expected.assign(bins + 1, 0.0);
    double bulk_mass = bulk / bins;
    for (int b = 0; b < bins; ++b) rep.expected[b] = bulk_mass * static_cast<double>(survivors);
    rep.expected[bins] = (1.0 - bulk) * static_cast<double>(survivors);
    double stat = 0;
    for (int b = 0; b <= bins; ++b) {
        double diff = static_cast<double>(counts[b]) - rep.expected[b];
        stat += diff * diff / rep.expected[b];
    }
    rep.statistic = stat;
    rep.dof = bins;  // bins+1 cells, total fixed
    rep.p_value = chi_square_pvalue(stat, rep.dof);
    rep.normalization_H0 = h0_normalization(form);
    rep.overflow_fraction = static_cast<double>(counts[bins]) / static_cast<double>(survivors);
    for (int j = 0; j < d; ++j) {
        rep.coord_means.push_back(coords[j].mean);
        rep.coord_stderrs.push_back(coords[j].stderr_of_mean());
    }
    rep.radius_mean = radius.mean;
    rep.radius_stderr = radius.stderr_of_mean();
    return rep;
}

std::vector<Vec> lattice_targets(const ConeSpec& cone, const Vec& x, int64_t n, double radius) {
    const int d = cone.dim();
    for (int i = 0; i < d; ++i)
        if (x[i] != std::floor(x[i])) throw std::invalid_argument("lattice_targets: x must have integer coordinates");

    // Each coordinate flips parity every step: y_i = x_i + n (mod 2).
    std::vector<int> parity(d);
    for (int i = 0; i < d; ++i) parity[i] = static_cast<int>((static_cast<int64_t>(x[i]) + n) & 1);

    int64_t r_ceil = static_cast<int64_t>(std::floor(radius));
    std::vector<Vec> out;
    std::vector<int64_t> y(d, 0);
    // odd coordinates start at 1, even at 2 (0 is on the boundary)
    std::function<void(int)> recurse = [&](int i) {
        if (i == d) {
            Vec v(d);
            double n2 = 0;
            for (int j = 0; j < d; ++j) {
                v[j] = static_cast<double>(y[j]);
                n2 += v[j] * v[j];
            }
            if (n2 <= radius * radius && cone.contains(v)) out.push_back(v);
            return;
        }
        for (int64_t c = parity[i] ? 1 : 2; c <= r_ceil; c += 2) {
            y[i] = c;
            recurse(i + 1);
        }
    };
    recurse(0);
    return out;
}

LocalCltResult local_clt_ratio(const ConeSpec& cone, const HarmonicForm& form,
                               const IncrementLaw& law, const Vec& x, int64_t n,
                               const std::vector<Vec>& y_set, double v_hat, int64_t n_samples,
                               uint64_t seed, uint32_t stream, int threads, int64_t min_hits) {
    if (!law.lattice()) throw std::invalid_argument("local_clt_ratio: needs the lattice (rademacher) law");
    check_dim(x, cone.dim(), "local_clt_ratio");
    if (!cone.contains(x)) throw std::invalid_argument("local_clt_ratio: x must lie in the open cone");
    if (y_set.empty()) throw std::invalid_argument("local_clt_ratio: empty y set");
    if (!(v_hat > 0)) throw std::invalid_argument("local_clt_ratio: v_hat must be positive");
    const int d = cone.dim();

    // Parity filter: y reachable iff every coordinate matches x_i + n mod 2.
    std::vector<Vec> targets;
    for (const Vec& y : y_set) {
        bool ok = true;
        for (int i = 0; i < d; ++i) {
            if (y[i] != std::floor(y[i])) ok = false;
            else if (((static_cast<int64_t>(y[i]) - static_cast<int64_t>(x[i]) - n) & 1) != 0) ok = false;
        }
        if (ok) targets.push_back(y);
    }
    if (targets.empty()) throw std::invalid_argument("local_clt_ratio: no y with reachable parity");

    // Hash endpoint coordinates to a flat key (coordinates are small ints).
    auto key_of = [d](const Vec& v) {
        int64_t k = 0;
        for (int i = 0; i < d; ++i) k = k * 100000 + static_cast<int64_t>(std::llround(v[i])) + 50000;
        return k;
    };
    std::unordered_map<int64_t, size_t> slot;
    for (size_t j = 0; j < targets.size(); ++j) slot[key_of(targets[j])] = j;

    struct Acc {
        std::vector<int64_t> hits;
        int64_t survivors = 0;
    };
    auto parts = map_chunks<Acc>(n_samples, threads, [&](int64_t, int64_t begin, int64_t end, Acc& acc) {
        acc.hits.assign(targets.size(), 0);
        Vec pos(d), step(d);
        for (int64_t i = begin; i < end; ++i) {
            Rng rng(seed, stream, static_cast<uint64_t>(i));
            pos = x;
            bool alive = true;
            for (int64_t k = 1; k <= n; ++k) {
                law.sample(rng, step);
                pos += step;
                if (!cone.contains(pos)) {
                    alive = false;
                    break;
                }
            }
            if (!alive) continue;
            ++acc.survivors;
            auto it = slot.find(key_of(pos));
            if (it != slot.end()) ++acc.hits[it->second];
        }
    });

    std::vector<int64_t> hits(targets.size(), 0);
    LocalCltResult out;
    for (const auto& acc : parts) {
        out.survivors += acc.survivors;
        for (size_t j = 0; j < targets.size(); ++j) hits[j] += acc.hits[j];
    }

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double scale = std::pow(static_cast<double>(n), 0.5 * (cone.p() + d));
    Welford ratio_stats;
    for (size_t j = 0; j < targets.size(); ++j) {
        if (hits[j] < min_hits) {
            out.dropped_few_hits.push_back(targets[j]);
            continue;
        }
        double prob = static_cast<double>(hits[j]) / static_cast<double>(n_samples);
        double target = v_hat * form.u((1.0 / sqrt_n) * targets[j]) *
                        std::exp(-targets[j].norm2() / (2.0 * static_cast<double>(n)));
        double ratio = scale * prob / target;
        out.rows.push_back({targets[j], hits[j], ratio});
        ratio_stats.add(ratio);
    }
    if (ratio_stats.n >= 2) out.cv = std::sqrt(ratio_stats.variance()) / ratio_stats.mean;
    return out;
}

}  // namespace conewalk
