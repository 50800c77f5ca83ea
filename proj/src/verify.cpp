#include "verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "asymptotics.hpp"
#include "eigen_section.hpp"
#include "harmonic.hpp"
#include "parallel.hpp"
#include "vestimate.hpp"
#include "walk.hpp"

namespace conewalk {

namespace {

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Budget {
    int64_t c1_samples, c2_samples, c3_samples, c4_samples, c6_samples, c9_samples, c10_samples;
    int64_t c8_outer, c8_inner, c8_vx;
    int64_t c1_kmax, c10_n;
};

Budget budget_for(VerifySuite suite) {
    if (suite == VerifySuite::Full)
        return Budget{1000000, 4000000, 100000, 1000000, 1000000, 1000000, 100000000, 400, 16384, 16384, 4096, 256};
    return Budget{500000, 1000000, 100000, 200000, 700000, 250000, 20000000, 256, 8192, 8192, 4096, 256};
}

std::vector<int64_t> dyadic(int64_t lo, int64_t hi) {
    std::vector<int64_t> g;
    for (int64_t n = lo; n <= hi; n *= 2) g.push_back(n);
    return g;
}

// Runtime budgets in the criteria are stated for 8 hardware threads.
double scale_budget(double seconds_on_8, int threads) {
    int t = resolve_threads(threads);
    return seconds_on_8 * std::max(1.0, 8.0 / static_cast<double>(t));
}

}  // namespace

VerifySuite suite_from_name(const std::string& name) {
    if (name == "quick") return VerifySuite::Quick;
    if (name == "full") return VerifySuite::Full;
    throw std::invalid_argument("unknown verify suite '" + name + "' (expected quick or full)");
}

std::vector<CriterionResult> run_battery(VerifySuite suite, uint64_t seed, int threads) {
    const Budget B = budget_for(suite);
    std::vector<CriterionResult> out;

    auto push = [&](int id, const std::string& name, bool pass, double measured, double tol,
                    const std::string& detail, double t0) {
        out.push_back(CriterionResult{id, name, pass, measured, tol, detail, now_s() - t0});
    };

    // ---- 1: exact harmonic oracle in d=1 --------------------------------
    {
        double t0 = now_s();
        try {
            ConeSpec cone = ConeSpec::half_line();
            HarmonicForm form(cone);
            IncrementLaw law = IncrementLaw::rademacher(1);
            Vec x{5.0};
            std::vector<int64_t> kg;
            for (int64_t k = 4; k <= B.c1_kmax; k *= 4) kg.push_back(k);
            ShiftSequence shift = ShiftSequence::standard(cone);
            auto c1 = estimate_v_construction1(form, law, x, shift, kg, B.c1_samples, seed, 100, threads);
            double rel = std::abs(c1.v_hat.mean - 5.0) / 5.0;
            bool ok1 = rel <= 0.02 && std::abs(c1.v_hat.mean - 5.0) <= 3.0 * c1.v_hat.stderr_;

            Schedule sched(64, 1.0 / 3.0, 16384);
            auto c2 = estimate_v_construction2(form, law, x, sched, B.c1_samples, seed, 110, threads);
            bool ok2 = true;
            std::string terms;
            for (const auto& term : c2.per_term) {
                ok2 = ok2 && std::abs(term.mean - 5.0) <= 3.0 * term.stderr_;
                terms += " " + fmt(term.mean);
            }
            double budget = scale_budget(60.0, threads);
            double elapsed = now_s() - t0;
            bool ok3 = elapsed < budget;
            push(1, "exact-harmonic-d1", ok1 && ok2 && ok3, c1.v_hat.mean, 0.02,
                 "v1=" + fmt(c1.v_hat.mean) + "+-" + fmt(c1.v_hat.stderr_) + " rel=" + fmt(rel) +
                     " v2 terms:" + terms + " runtime=" + fmt(elapsed) + "s budget=" + fmt(budget) + "s",
                 t0);
        } catch (const std::exception& e) {
            push(1, "exact-harmonic-d1", false, 0, 0.02, std::string("error: ") + e.what(), t0);
        }
    }

    // ---- 2: exact harmonic oracle in d=2 --------------------------------
    {
        double t0 = now_s();
        try {
            ConeSpec cone = ConeSpec::orthant(2);
            HarmonicForm form(cone);
            IncrementLaw law = IncrementLaw::rademacher(2);
            std::vector<int64_t> kg = suite == VerifySuite::Full ? std::vector<int64_t>{2, 8, 32, 128, 256}
                                                                 : std::vector<int64_t>{1, 4, 16, 64, 128};
            ShiftSequence shift = ShiftSequence::standard(cone);
            auto va = estimate_v_construction1(form, law, Vec{2.0, 3.0}, shift, kg, B.c2_samples, seed, 200, threads);
            auto vb = estimate_v_construction1(form, law, Vec{1.0, 1.0}, shift, kg, B.c2_samples, seed, 200, threads);
            double ratio = va.v_hat.mean / vb.v_hat.mean;
            double rel = std::abs(ratio - 6.0) / 6.0;
            double budget = scale_budget(120.0, threads);
            double elapsed = now_s() - t0;
            bool ok = rel <= 0.05 && elapsed < budget;
            push(2, "exact-harmonic-d2", ok, ratio, 0.05,
                 "V(2,3)=" + fmt(va.v_hat.mean) + " V(1,1)=" + fmt(vb.v_hat.mean) + " ratio=" + fmt(ratio) +
                     " rel=" + fmt(rel) + " runtime=" + fmt(elapsed) + "s",
                 t0);
        } catch (const std::exception& e) {
            push(2, "exact-harmonic-d2", false, 0, 0.05, std::string("error: ") + e.what(), t0);
        }
    }

    // ---- 3: pathwise decomposition identity ------------------------------
    {
        double t0 = now_s();
        try {
            int64_t total_violations = 0;
            int64_t total_paths = 0;
            std::string detail;
            auto run_one = [&](const ConeSpec& cone, const IncrementLaw& law, const Vec& x, int64_t k,
                               double gamma, uint32_t stream) {
                HarmonicForm form(cone);
                ShiftSequence shift = gamma > 0 ? ShiftSequence::with_gamma(cone, gamma) : ShiftSequence::standard(cone);
                auto r = decompose_paths(form, law, x, k, shift, B.c3_samples, seed, stream, threads);
                total_violations += r.identity_violations;
                total_paths += B.c3_samples;
                detail += " [" + cone.description() + "/" + law.description() + " max_err=" + fmt(r.max_identity_error) + "]";
            };
            run_one(ConeSpec::half_line(), IncrementLaw::gaussian(1), Vec{5.0}, 512, 0.0, 300);
            run_one(ConeSpec::half_line(), IncrementLaw::rademacher(1), Vec{5.0}, 512, 0.4, 301);
            run_one(ConeSpec::orthant(2), IncrementLaw::rademacher(2), Vec{2.0, 3.0}, 512, 0.0, 302);
            run_one(ConeSpec::half_space(2), IncrementLaw::gaussian(2), Vec{0.0, 3.0}, 512, 0.0, 303);
            run_one(ConeSpec::wedge(2.0 * 3.14159265358979323846 / 3.0), IncrementLaw::gaussian(2), Vec{1.0, 1.7}, 256, 0.0, 304);
            run_one(ConeSpec::circular(1.0, 512), IncrementLaw::gaussian(3), Vec{0.0, 0.0, 3.0}, 256, 0.0, 305);
            run_one(ConeSpec::half_line(), IncrementLaw::student(1, 4.5), Vec{5.0}, 256, 0.0, 306);
            bool ok = total_violations == 0;
            push(3, "pathwise-decomposition", ok, static_cast<double>(total_violations), 0.0,
                 "paths=" + std::to_string(total_paths) + detail, t0);
        } catch (const std::exception& e) {
            push(3, "pathwise-decomposition", false, -1, 0.0, std::string("error: ") + e.what(), t0);
        }
    }

    // ---- 4 & 5: tail exponents and universality ---------------------------
    {
        double t0 = now_s();
        try {
            auto grid_hl = dyadic(64, 16384);
            auto grid_qp = dyadic(128, 16384);
            auto fit_hl = tail_exponent_fit(ConeSpec::half_line(), IncrementLaw::rademacher(1), Vec{1.0},
                                            grid_hl, B.c4_samples, seed, 400, threads);
            auto fit_qp_g = tail_exponent_fit(ConeSpec::orthant(2), IncrementLaw::gaussian(2), Vec{2.0, 2.0},
                                              grid_qp, B.c4_samples, seed, 410, threads);
            auto fit_wg = tail_exponent_fit(ConeSpec::wedge(2.0 * 3.14159265358979323846 / 3.0),
                                            IncrementLaw::gaussian(2), Vec{1.0, 1.7320508075688772},
                                            grid_hl, B.c4_samples, seed, 420, threads);
            bool ok_hl = std::abs(fit_hl.fit.slope + 0.5) <= 0.05;
            bool ok_qp = std::abs(fit_qp_g.fit.slope + 1.0) <= 0.10;
            bool ok_wg = std::abs(fit_wg.fit.slope + 0.75) <= 0.08;
            double budget = scale_budget(600.0, threads);
            double elapsed = now_s() - t0;
            bool ok = ok_hl && ok_qp && ok_wg && elapsed < budget;
            push(4, "tail-exponents", ok, fit_hl.fit.slope, 0.05,
                 "half-line=" + fmt(fit_hl.fit.slope) + "+-" + fmt(fit_hl.fit.slope_stderr) +
                     " quarter-plane=" + fmt(fit_qp_g.fit.slope) + "+-" + fmt(fit_qp_g.fit.slope_stderr) +
                     " wedge(2pi/3)=" + fmt(fit_wg.fit.slope) + "+-" + fmt(fit_wg.fit.slope_stderr) +
                     " runtime=" + fmt(elapsed) + "s",
                 t0);

            double t5 = now_s();
            auto fit_qp_r = tail_exponent_fit(ConeSpec::orthant(2), IncrementLaw::rademacher(2), Vec{2.0, 2.0},
                                              grid_qp, B.c4_samples, seed, 430, threads);
            double diff = std::abs(fit_qp_r.fit.slope - fit_qp_g.fit.slope);
            double combined = fit_qp_r.fit.slope_stderr + fit_qp_g.fit.slope_stderr;
            push(5, "universality", diff <= 2.0 * combined, diff, 2.0 * combined,
                 "rademacher=" + fmt(fit_qp_r.fit.slope) + "+-" + fmt(fit_qp_r.fit.slope_stderr) +
                     " gaussian=" + fmt(fit_qp_g.fit.slope) + "+-" + fmt(fit_qp_g.fit.slope_stderr),
                 t5);
        } catch (const std::exception& e) {
            push(4, "tail-exponents", false, 0, 0.05, std::string("error: ") + e.what(), t0);
            push(5, "universality", false, 0, 0, "skipped after criterion-4 error", t0);
        }
    }

    // ---- 6: conditional scaling limit ------------------------------------
    {
        double t0 = now_s();
        try {
            ConeSpec cone = ConeSpec::half_line();
            HarmonicForm form(cone);
            auto rep = conditional_density_test(form, IncrementLaw::gaussian(1), Vec{1.0}, 4096,
                                                B.c6_samples, 40, seed, 600, threads, 10000);
            double target = 1.2533141373155003;  // sqrt(pi/2)
            bool ok_mean = std::abs(rep.radius_mean - target) <= 3.0 * rep.radius_stderr;
            bool ok_p = rep.p_value > 0.01;
            push(6, "conditional-limit", ok_mean && ok_p, rep.radius_mean, 3.0 * rep.radius_stderr,
                 "mean=" + fmt(rep.radius_mean) + "+-" + fmt(rep.radius_stderr) + " target=" + fmt(target) +
                     " chi2=" + fmt(rep.statistic) + " p=" + fmt(rep.p_value) +
                     " survivors=" + std::to_string(rep.survivors),
                 t0);
        } catch (const std::exception& e) {
            push(6, "conditional-limit", false, 0, 0, std::string("error: ") + e.what(), t0);
        }
    }

    // ---- 7: eigen solver --------------------------------------------------
    {
        double t0 = now_s();
        try {
            EigenTable t4096 = circular_cone_lambda1(1.5707963267948966, 4096);
            EigenTable t2048 = circular_cone_lambda1(1.5707963267948966, 2048);
            EigenTable t1024 = circular_cone_lambda1(1.5707963267948966, 1024);
            double p = p_exponent(t4096.lambda1, 3);
            double e_l = std::abs(t4096.lambda1 - 2.0);
            double e_p = std::abs(p - 1.0);
            double ratio = std::abs(t1024.lambda1 - t2048.lambda1) /
                           std::max(std::abs(t2048.lambda1 - t4096.lambda1), 1e-300);
            bool ok = e_l <= 1e-3 && e_p <= 1e-3 && ratio >= 3.5;
            push(7, "eigen-solver", ok, t4096.lambda1, 1e-3,
                 "lambda1=" + fmt(t4096.lambda1) + " p=" + fmt(p) + " doubling-ratio=" + fmt(ratio) +
                     " est_error=" + fmt(t4096.est_error),
                 t0);
        } catch (const std::exception& e) {
            push(7, "eigen-solver", false, 0, 1e-3, std::string("error: ") + e.what(), t0);
        }
    }

    // ---- 8: harmonicity residual ------------------------------------------
    {
        double t0 = now_s();
        try {
            ConeSpec cone = ConeSpec::half_space(2);
            HarmonicForm form(cone);
            IncrementLaw law = IncrementLaw::gaussian(2);
            const int64_t k_inner = 512;
            VOracle oracle = [&](const Vec& y, uint64_t key) {
                return estimate_direct(form, law, y, k_inner, B.c8_inner, key, 0, threads);
            };
            auto res = harmonicity_residual(form, law, Vec{0.0, 3.0}, oracle, B.c8_outer, seed, 800, threads);
            bool ok = std::abs(res.mean) <= 3.0 * res.stderr_;
            push(8, "harmonicity-residual", ok, res.mean, 3.0 * res.stderr_,
                 "residual=" + fmt(res.mean) + "+-" + fmt(res.stderr_) + " inner=" + std::to_string(B.c8_inner) +
                     "@k=" + std::to_string(k_inner) + " outer=" + std::to_string(B.c8_outer),
                 t0);
        } catch (const std::exception& e) {
            push(8, "harmonicity-residual", false, 0, 0, std::string("error: ") + e.what(), t0);
        }
    }

    // ---- 9: tail-constant ratio across starting points ---------------------
    {
        double t0 = now_s();
        try {
            ConeSpec cone = ConeSpec::half_space(2);
            HarmonicForm form(cone);
            IncrementLaw law = IncrementLaw::gaussian(2);
            std::vector<Vec> xs{Vec{0.0, 2.0}, Vec{0.0, 4.0}, Vec{1.0, 3.0}};
            ShiftSequence shift = ShiftSequence::standard(cone);
            std::vector<int64_t> kg{8, 32, 128, 512, 1024};
            std::vector<EstimateCI> v_hats;
            for (size_t i = 0; i < xs.size(); ++i) {
                auto c1 = estimate_v_construction1(form, law, xs[i], shift, kg, B.c9_samples, seed,
                                                   900 + static_cast<uint32_t>(i), threads);
                v_hats.push_back(c1.v_hat);
            }
            auto trace = kappa_ratio_trace(cone, law, xs, dyadic(64, 8192), v_hats, B.c9_samples, seed, 910, threads);
            bool ok = trace.cross_x_spread < 0.10;
            std::string detail = "spread=" + fmt(trace.cross_x_spread) + " ratios=";
            for (double r : trace.final_ratios) detail += " " + fmt(r);
            push(9, "kappa-ratio", ok, trace.cross_x_spread, 0.10, detail, t0);
        } catch (const std::exception& e) {
            push(9, "kappa-ratio", false, 0, 0.10, std::string("error: ") + e.what(), t0);
        }
    }

    // ---- 10: local limit theorem flatness ----------------------------------
    {
        double t0 = now_s();
        try {
            ConeSpec cone = ConeSpec::orthant(2);
            HarmonicForm form(cone);
            IncrementLaw law = IncrementLaw::rademacher(2);
            Vec x{2.0, 2.0};
            ShiftSequence shift = ShiftSequence::standard(cone);
            std::vector<int64_t> kg{2, 8, 32, 128, 256};
            auto c1 = estimate_v_construction1(form, law, x, shift, kg, std::min<int64_t>(B.c10_samples, 1000000),
                                               seed, 1000, threads);
            auto ys = lattice_targets(cone, x, B.c10_n, 1.5 * std::sqrt(static_cast<double>(B.c10_n)));
            auto r = local_clt_ratio(cone, form, law, x, B.c10_n, ys, c1.v_hat.mean, B.c10_samples, seed, 1010,
                                     threads, 50);
            bool ok = r.cv < 0.10 && !r.rows.empty();
            push(10, "local-clt-flatness", ok, r.cv, 0.10,
                 "points=" + std::to_string(r.rows.size()) + " dropped=" + std::to_string(r.dropped_few_hits.size()) +
                     " survivors=" + std::to_string(r.survivors) + " v_hat=" + fmt(c1.v_hat.mean),
                 t0);
        } catch (const std::exception& e) {
            push(10, "local-clt-flatness", false, 0, 0.10, std::string("error: ") + e.what(), t0);
        }
    }

    return out;
}

std::string battery_report_json(const std::vector<CriterionResult>& results) {
    nlohmann::json rows = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"pass", r.pass},
                        {"measured", r.measured},
                        {"tolerance", r.tolerance},
                        {"detail", r.detail},
                        {"seconds", r.seconds}});
    }
    nlohmann::json j{{"all_pass", all}, {"criteria", rows}};
    return j.dump(2) + "\n";
}

std::string battery_report_text(const std::vector<CriterionResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) {
        char line[160];
        std::snprintf(line, sizeof line, "%s criterion-%d %-24s measured=%-12.6g tol=%-10.6g (%.1fs)\n",
                      r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured, r.tolerance, r.seconds);
        os << line << "       " << r.detail << "\n";
    }
    return os.str();
}

}  // namespace conewalk
