#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "asymptotics.hpp"
#include "eigen_section.hpp"
#include "harmonic.hpp"
#include "vestimate.hpp"
#include "walk.hpp"

namespace conewalk {

using nlohmann::json;
namespace fs = std::filesystem;

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json estimate_json(const EstimateCI& e) {
    return json{{"mean", e.mean},     {"stderr", e.stderr_}, {"n_samples", e.n_samples},
                {"seed", e.seed},     {"stream", e.stream},  {"flags", e.flags}};
}

struct StageContext {
    const Config& cfg;
    fs::path out_dir;
    uint64_t seed;
    int threads;
    int64_t samples;
    ConeSpec cone;
    HarmonicForm form;
    IncrementLaw law;
    Vec x;
    json* stage_record;
    json* warnings;

    void emit(const std::string& name, const std::string& content) const {
        fs::path p = out_dir / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write output file " + p.string());
        f << content;
        f.close();
        (*stage_record)["outputs"].push_back(json{{"file", name}, {"fnv64", fnv1a64(content)}});
    }
};

Vec vec_from(const std::vector<double>& v) { return Vec::from(v); }

std::vector<int64_t> default_dyadic(int64_t lo, int64_t hi) {
    std::vector<int64_t> g;
    for (int64_t n = lo; n <= hi; n *= 2) g.push_back(n);
    return g;
}

// ---- stages -------------------------------------------------------------

void stage_eigen(StageContext& ctx, uint32_t /*stream*/) {
    double theta0 = ctx.cfg.get_real("eigen.theta0", ctx.cone.variant() == ConeVariant::CircularCone3D ? ctx.cone.angle() : 1.5707963267948966);
    int mesh = static_cast<int>(ctx.cfg.get_int("eigen.mesh", 4096));
    EigenTable t = circular_cone_lambda1(theta0, mesh);
    ctx.emit("eigen_table.csv", eigen_table_csv(t));
    json j{{"lambda1", t.lambda1},
           {"theta0", t.theta0},
           {"mesh", t.mesh_size},
           {"est_error", t.est_error},
           {"p", p_exponent(t.lambda1, 3)}};
    ctx.emit("eigen_table.json", j.dump(2) + "\n");
}

void stage_simulate(StageContext& ctx, uint32_t stream) {
    int64_t n = ctx.cfg.get_int("simulate.n", 1024);
    EstimateCI surv = survival_estimate(ctx.cone, ctx.law, ctx.x, n, ctx.samples, ctx.seed, stream, ctx.threads);
    json j{{"op", "survival"},
           {"cone", ctx.cone.description()},
           {"law", ctx.law.description()},
           {"x", ctx.x.to_vector()},
           {"n", n},
           {"estimate", estimate_json(surv)}};

    std::string probe = ctx.cfg.get_string("simulate.probe", "none");
    if (probe == "tau-moment") {
        double beta = ctx.cfg.get_real("simulate.beta", 0.5);
        int64_t horizon = ctx.cfg.get_int("simulate.horizon", 65536);
        TauMomentResult tm = tau_moment_probe(ctx.cone, ctx.law, ctx.x, beta, horizon, ctx.samples, ctx.seed, stream + 1, ctx.threads);
        j["tau_moment"] = {{"beta", beta},
                           {"horizon", horizon},
                           {"estimate", estimate_json(tm.estimate)},
                           {"censored_fraction", tm.censored_fraction},
                           {"censored_mass_fraction", tm.censored_mass_fraction}};
    } else if (probe == "max-tail") {
        double t_exp = ctx.cfg.get_real("simulate.t-exp", 2.0);
        double eps = ctx.cfg.get_real("simulate.epsilon", 0.2);
        MaxTailResult mt = max_tail_probe(ctx.cone, ctx.law, ctx.x, n, t_exp, eps, ctx.samples, ctx.seed, stream + 1, ctx.threads);
        j["max_tail"] = {{"t_exp", t_exp},
                         {"epsilon", eps},
                         {"truncated", estimate_json(mt.truncated)},
                         {"tau_companion", estimate_json(mt.tau_companion)},
                         {"ratio", mt.ratio}};
    } else if (probe != "none") {
        throw ConfigError("simulate.probe: unknown probe '" + probe + "'");
    }
    ctx.emit("survival.json", j.dump(2) + "\n");

    int64_t audit = ctx.cfg.get_int("simulate.audit", 0);
    if (audit > 0) {
        std::vector<int64_t> idx(audit);
        for (int64_t i = 0; i < audit; ++i) idx[i] = i;
        auto paths = audit_paths(ctx.cone, ctx.law, ctx.x, n, idx, ctx.seed, stream);
        std::string csv = "sample,step";
        for (int i = 0; i < ctx.cone.dim(); ++i) csv += ",x" + std::to_string(i + 1);
        csv += "\n";
        for (size_t s = 0; s < paths.size(); ++s)
            for (size_t k = 0; k < paths[s].size(); ++k) {
                csv += std::to_string(idx[s]) + "," + std::to_string(k);
                for (int i = 0; i < ctx.cone.dim(); ++i) csv += "," + fmt(paths[s][k][i]);
                csv += "\n";
            }
        ctx.emit("paths.csv", csv);
    }
}

ShiftSequence make_shift(const StageContext& ctx, const std::string& gamma_key) {
    double gamma = ctx.cfg.get_real(gamma_key, 0.0);
    if (gamma <= 0.0) return ShiftSequence::standard(ctx.cone);
    return ShiftSequence::with_gamma(ctx.cone, gamma);
}

void stage_estimate_v(StageContext& ctx, uint32_t stream) {
    int64_t construction = ctx.cfg.get_int("estimate-v.construction", 1);
    json j{{"op", "estimate-v"},
           {"construction", construction},
           {"cone", ctx.cone.description()},
           {"law", ctx.law.description()},
           {"x", ctx.x.to_vector()}};
    std::string csv;
    if (construction == 1) {
        std::vector<int64_t> k_grid = ctx.cfg.has("estimate-v.k-grid")
                                          ? ctx.cfg.get_ints("estimate-v.k-grid")
                                          : std::vector<int64_t>{8, 32, 128, 512, 2048};
        ShiftSequence shift = make_shift(ctx, "estimate-v.gamma");
        auto r = estimate_v_construction1(ctx.form, ctx.law, ctx.x, shift, k_grid, ctx.samples, ctx.seed, stream, ctx.threads);
        j["v_hat"] = estimate_json(r.v_hat);
        j["gamma"] = shift.gamma;
        j["stabilized"] = r.stabilized;
        j["stabilization"] = r.stabilization;
        csv = "k,direct,direct_stderr,shifted,shifted_stderr,gap,gap_stderr\n";
        for (size_t i = 0; i < r.k_grid.size(); ++i)
            csv += std::to_string(r.k_grid[i]) + "," + fmt(r.direct_trace[i].mean) + "," + fmt(r.direct_trace[i].stderr_) + "," +
                   fmt(r.shifted_trace[i].mean) + "," + fmt(r.shifted_trace[i].stderr_) + "," + fmt(r.gap_trace[i].mean) + "," +
                   fmt(r.gap_trace[i].stderr_) + "\n";
    } else if (construction == 2) {
        Schedule sched(ctx.cfg.get_int("estimate-v.n0", 64), ctx.cfg.get_real("estimate-v.epsilon", 0.25),
                       ctx.cfg.get_int("estimate-v.cap", 16384));
        auto r = estimate_v_construction2(ctx.form, ctx.law, ctx.x, sched, ctx.samples, ctx.seed, stream, ctx.threads);
        j["v_hat"] = estimate_json(r.v_hat);
        j["stabilized"] = r.stabilized;
        j["terms"] = r.terms;
        j["ratios"] = r.ratios;
        csv = "n,estimate,stderr\n";
        for (size_t i = 0; i < r.terms.size(); ++i)
            csv += std::to_string(r.terms[i]) + "," + fmt(r.per_term[i].mean) + "," + fmt(r.per_term[i].stderr_) + "\n";
    } else {
        throw ConfigError("estimate-v.construction: must be 1 or 2");
    }
    ctx.emit("estimate_v.json", j.dump(2) + "\n");
    ctx.emit("estimate_v_trace.csv", csv);
}

void stage_decompose(StageContext& ctx, uint32_t stream) {
    int64_t k = ctx.cfg.get_int("decompose.k", 256);
    ShiftSequence shift = make_shift(ctx, "decompose.gamma");
    auto r = decompose_paths(ctx.form, ctx.law, ctx.x, k, shift, ctx.samples, ctx.seed, stream, ctx.threads);
    json j{{"op", "decompose"},
           {"k", k},
           {"gamma", shift.gamma},
           {"u0", r.u0},
           {"w1", estimate_json(r.w1)},
           {"w2", estimate_json(r.w2)},
           {"w3", estimate_json(r.w3)},
           {"lhs", estimate_json(r.lhs)},
           {"identity_violations", r.identity_violations},
           {"max_identity_error", r.max_identity_error}};
    ctx.emit("decompose.json", j.dump(2) + "\n");
    if (r.identity_violations > 0)
        throw std::runtime_error("decompose: pathwise identity violated on " +
                                 std::to_string(r.identity_violations) + " paths (implementation bug)");
}

void stage_tail_fit(StageContext& ctx, uint32_t stream) {
    std::vector<int64_t> grid = ctx.cfg.has("tail-fit.n-grid") ? ctx.cfg.get_ints("tail-fit.n-grid")
                                                               : default_dyadic(64, 16384);
    int64_t min_surv = ctx.cfg.get_int("tail-fit.min-survivors", 100);
    auto r = tail_exponent_fit(ctx.cone, ctx.law, ctx.x, grid, ctx.samples, ctx.seed, stream, ctx.threads, min_surv);
    if (r.truncated_points > 0)
        (*ctx.warnings).push_back("tail-fit: dropped " + std::to_string(r.truncated_points) +
                                  " grid points with fewer than " + std::to_string(min_surv) + " survivors");
    json j{{"op", "tail-fit"},
           {"slope", r.fit.slope},
           {"slope_stderr", r.fit.slope_stderr},
           {"intercept", r.fit.intercept},
           {"r_squared", r.fit.r_squared},
           {"target_slope", -0.5 * ctx.cone.p()},
           {"truncated_points", r.truncated_points}};
    ctx.emit("tail_fit.json", j.dump(2) + "\n");
    std::string csv = "n,survival,stderr\n";
    for (size_t i = 0; i < r.n_grid.size(); ++i)
        csv += std::to_string(r.n_grid[i]) + "," + fmt(r.survival[i].mean) + "," + fmt(r.survival[i].stderr_) + "\n";
    ctx.emit("tail_fit.csv", csv);
    if (ctx.cfg.get_bool("run.plot-data", false)) {
        std::string dat;
        for (size_t i = 0; i < r.n_grid.size(); ++i)
            dat += fmt(std::log(static_cast<double>(r.n_grid[i]))) + " " + fmt(std::log(r.survival[i].mean)) + " " +
                   fmt(r.survival[i].stderr_ / r.survival[i].mean) + "\n";
        ctx.emit("tail_fit.dat", dat);
    }
}

void stage_kappa(StageContext& ctx, uint32_t stream) {
    auto pts = ctx.cfg.has("kappa.x-list") ? ctx.cfg.get_points("kappa.x-list")
                                           : std::vector<std::vector<double>>{ctx.x.to_vector()};
    std::vector<Vec> xs;
    for (auto& p : pts) xs.push_back(vec_from(p));
    std::vector<int64_t> grid = ctx.cfg.has("kappa.n-grid") ? ctx.cfg.get_ints("kappa.n-grid")
                                                            : default_dyadic(64, 8192);
    std::vector<int64_t> k_grid = ctx.cfg.has("kappa.k-grid") ? ctx.cfg.get_ints("kappa.k-grid")
                                                              : std::vector<int64_t>{8, 32, 128, 512, 1024};
    ShiftSequence shift = make_shift(ctx, "kappa.gamma");
    std::vector<EstimateCI> v_hats;
    for (size_t i = 0; i < xs.size(); ++i) {
        auto c1 = estimate_v_construction1(ctx.form, ctx.law, xs[i], shift, k_grid, ctx.samples, ctx.seed,
                                           stream + 10 + static_cast<uint32_t>(i), ctx.threads);
        v_hats.push_back(c1.v_hat);
    }
    auto r = kappa_ratio_trace(ctx.cone, ctx.law, xs, grid, v_hats, ctx.samples, ctx.seed, stream + 30, ctx.threads);
    json j{{"op", "kappa-trace"},
           {"cross_x_spread", r.cross_x_spread},
           {"final_ratios", r.final_ratios},
           {"per_x_stabilized", r.per_x_stabilized}};
    json vh = json::array();
    for (auto& v : v_hats) vh.push_back(estimate_json(v));
    j["v_hats"] = vh;
    ctx.emit("kappa_trace.json", j.dump(2) + "\n");
    std::string csv = "x,n,ratio,stderr\n";
    for (const auto& row : r.rows) {
        std::string xs_str;
        for (int i = 0; i < row.x.d; ++i) xs_str += (i ? " " : "") + fmt(row.x[i]);
        csv += "\"" + xs_str + "\"," + std::to_string(row.n) + "," + fmt(row.ratio) + "," + fmt(row.stderr_) + "\n";
    }
    ctx.emit("kappa_trace.csv", csv);
    if (ctx.cfg.get_bool("run.plot-data", false)) {
        std::string dat;
        int64_t prev_n = -1;
        for (const auto& row : r.rows) {
            if (row.n <= prev_n) dat += "\n";  // blank line between x-blocks
            dat += fmt(static_cast<double>(row.n)) + " " + fmt(row.ratio) + " " + fmt(row.stderr_) + "\n";
            prev_n = row.n;
        }
        ctx.emit("kappa_trace.dat", dat);
    }
}

void stage_conditional(StageContext& ctx, uint32_t stream) {
    int64_t n = ctx.cfg.get_int("conditional.n", 4096);
    int bins = static_cast<int>(ctx.cfg.get_int("conditional.bins", 40));
    int64_t min_surv = ctx.cfg.get_int("conditional.min-survivors", 10000);
    auto rep = conditional_density_test(ctx.form, ctx.law, ctx.x, n, ctx.samples, bins, ctx.seed, stream, ctx.threads, min_surv);
    json j{{"op", "conditional-dist"},
           {"n", n},
           {"bins", bins},
           {"survivors", rep.survivors},
           {"statistic", rep.statistic},
           {"dof", rep.dof},
           {"p_value", rep.p_value},
           {"H0", rep.normalization_H0},
           {"overflow_fraction", rep.overflow_fraction},
           {"radius_mean", rep.radius_mean},
           {"radius_stderr", rep.radius_stderr},
           {"coord_means", rep.coord_means},
           {"coord_stderrs", rep.coord_stderrs}};
    ctx.emit("conditional_dist.json", j.dump(2) + "\n");
    std::string csv = "bin,lo,hi,observed,expected\n";
    for (size_t b = 0; b < rep.observed.size(); ++b) {
        double lo = rep.edges[b];
        bool overflow = b + 1 >= rep.edges.size();
        std::string hi = overflow ? "inf" : fmt(rep.edges[b + 1]);
        csv += std::to_string(b) + "," + fmt(lo) + "," + hi + "," + std::to_string(rep.observed[b]) + "," +
               fmt(rep.expected[b]) + "\n";
    }
    ctx.emit("conditional_hist.csv", csv);
    if (ctx.cfg.get_bool("run.plot-data", false)) {
        std::string dat;
        for (int b = 0; b < bins; ++b) {
            double mid = 0.5 * (rep.edges[b] + rep.edges[b + 1]);
            dat += fmt(mid) + " " + fmt(static_cast<double>(rep.observed[b])) + " " +
                   fmt(std::sqrt(rep.expected[b])) + "\n";
        }
        ctx.emit("conditional_hist.dat", dat);
    }
}

void stage_local_clt(StageContext& ctx, uint32_t stream) {
    int64_t n = ctx.cfg.get_int("local-clt.n", 256);
    double radius_factor = ctx.cfg.get_real("local-clt.radius-factor", 1.5);
    int64_t min_hits = ctx.cfg.get_int("local-clt.min-hits", 50);
    std::vector<Vec> ys;
    if (ctx.cfg.has("local-clt.y-set")) {
        for (auto& p : ctx.cfg.get_points("local-clt.y-set")) ys.push_back(vec_from(p));
    } else {
        ys = lattice_targets(ctx.cone, ctx.x, n, radius_factor * std::sqrt(static_cast<double>(n)));
    }
    std::vector<int64_t> k_grid = ctx.cfg.has("local-clt.k-grid") ? ctx.cfg.get_ints("local-clt.k-grid")
                                                                  : std::vector<int64_t>{8, 32, 128, 512, 1024};
    ShiftSequence shift = make_shift(ctx, "local-clt.gamma");
    int64_t v_samples = ctx.cfg.get_int("local-clt.v-samples", std::min<int64_t>(ctx.samples, 1000000));
    auto c1 = estimate_v_construction1(ctx.form, ctx.law, ctx.x, shift, k_grid, v_samples, ctx.seed, stream + 1, ctx.threads);
    auto r = local_clt_ratio(ctx.cone, ctx.form, ctx.law, ctx.x, n, ys, c1.v_hat.mean, ctx.samples, ctx.seed, stream, ctx.threads, min_hits);
    json j{{"op", "local-clt"},
           {"n", n},
           {"survivors", r.survivors},
           {"cv", r.cv},
           {"points_used", r.rows.size()},
           {"points_dropped", r.dropped_few_hits.size()},
           {"v_hat", estimate_json(c1.v_hat)}};
    ctx.emit("local_clt.json", j.dump(2) + "\n");
    std::string csv = "y,hits,ratio\n";
    for (const auto& row : r.rows) {
        std::string ys_str;
        for (int i = 0; i < row.y.d; ++i) ys_str += (i ? " " : "") + fmt(row.y[i]);
        csv += "\"" + ys_str + "\"," + std::to_string(row.hits) + "," + fmt(row.ratio) + "\n";
    }
    ctx.emit("local_clt.csv", csv);
}

// ---- validation ---------------------------------------------------------

const std::vector<std::string> kStageNames = {"eigen",      "simulate",         "estimate-v", "decompose",
                                              "tail-fit",   "kappa-trace",      "conditional-dist", "local-clt"};

void validate(const Config& cfg, const ConeSpec& cone, const IncrementLaw& law, const Vec& x,
              const std::vector<std::string>& stages, json& warnings) {
    for (const auto& s : stages) {
        bool known = false;
        for (const auto& k : kStageNames) known = known || (k == s);
        if (!known) throw ConfigError("run.stages: unknown stage '" + s + "'");
    }
    if (law.dim() != cone.dim()) throw ConfigError("law dimension does not match cone dimension");
    check_dim(x, cone.dim(), "run.x");
    if (!x.finite()) throw ConfigError("run.x must have finite coordinates");
    if (!cone.contains(x)) throw ConfigError("run.x must lie in the open cone");

    // The harmonic-function construction needs E|X|^alpha finite for
    // alpha = p when p > 2, else for some alpha > 2. Violations are
    // flagged, not refused.
    double need = std::max(cone.p(), 2.0 + 1e-9);
    if (law.moment_order() <= need)
        warnings.push_back("law moment order " + std::to_string(law.moment_order()) +
                           " does not exceed required " + std::to_string(need) +
                           "; tail/limit asymptotics are outside their guaranteed range");

    for (const auto& s : stages) {
        if (s == "simulate" && cfg.get_string("simulate.probe", "none") == "tau-moment") {
            double beta = cfg.get_real("simulate.beta", 0.5);
            if (!(beta > 0.0) || !(beta < cone.p()))
                throw ConfigError("simulate.beta: precondition 0 < beta < p violated (beta=" +
                                  std::to_string(beta) + ", p=" + std::to_string(cone.p()) + ")");
        }
        if (s == "local-clt" && !law.lattice()) throw ConfigError("local-clt requires law.variant = rademacher");
    }
}

}  // namespace

RunResult run_experiment(const Config& cfg, const std::string& out_dir) {
    RunResult result;
    json manifest;
    manifest["tool"] = "conewalk";
    manifest["version"] = kVersion;
    manifest["started"] = iso_now();
    manifest["config"] = cfg.entries();
    json warnings = json::array();
    json stage_records = json::array();

    try {
        fs::create_directories(out_dir);

        ConeSpec cone = ConeSpec::from_config(cfg.get_string("cone.variant"),
                                              static_cast<int>(cfg.get_int("cone.dimension", 1)),
                                              cfg.get_real("cone.angle", 0.0),
                                              static_cast<int>(cfg.get_int("cone.mesh", 4096)));
        IncrementLaw law = IncrementLaw::from_config(cfg.get_string("law.variant", "gaussian"),
                                                     static_cast<int>(cfg.get_int("law.dimension", cone.dim())),
                                                     cfg.get_real("law.tail-index", 4.5));
        Vec x = cfg.has("run.x") ? Vec::from(cfg.get_reals("run.x")) : cone.x0();
        auto stages = cfg.get_names("run.stages");
        validate(cfg, cone, law, x, stages, warnings);

        StageContext ctx{cfg,
                         fs::path(out_dir),
                         cfg.get_u64("run.seed", kDefaultSeed),
                         static_cast<int>(cfg.get_int("run.threads", 0)),
                         cfg.get_int("run.samples", 100000),
                         cone,
                         HarmonicForm(cone),
                         law,
                         x,
                         nullptr,
                         &warnings};

        uint32_t base_stream = 1000;
        for (const auto& name : stages) {
            json rec{{"stage", name}, {"seed", ctx.seed}, {"stream_base", base_stream}, {"outputs", json::array()}};
            ctx.stage_record = &rec;
            try {
                if (name == "eigen") stage_eigen(ctx, base_stream);
                else if (name == "simulate") stage_simulate(ctx, base_stream);
                else if (name == "estimate-v") stage_estimate_v(ctx, base_stream);
                else if (name == "decompose") stage_decompose(ctx, base_stream);
                else if (name == "tail-fit") stage_tail_fit(ctx, base_stream);
                else if (name == "kappa-trace") stage_kappa(ctx, base_stream);
                else if (name == "conditional-dist") stage_conditional(ctx, base_stream);
                else if (name == "local-clt") stage_local_clt(ctx, base_stream);
                rec["status"] = "completed";
                stage_records.push_back(rec);
            } catch (const std::exception& e) {
                rec["status"] = "failed";
                rec["error"] = e.what();
                stage_records.push_back(rec);
                throw;
            }
            base_stream += 1000;
        }
        result.ok = true;
    } catch (const ConfigError& e) {
        result.ok = false;
        result.config_error = true;
        result.error = e.what();
        manifest["error"] = e.what();
    } catch (const std::exception& e) {
        result.ok = false;
        result.error = e.what();
        manifest["error"] = e.what();
    }

    manifest["stages"] = stage_records;
    manifest["warnings"] = warnings;
    manifest["finished"] = iso_now();
    result.manifest_json = manifest.dump(2) + "\n";

    // Config errors can fire before the output directory exists; the manifest
    // is written only when the directory is usable.
    std::error_code ec;
    if (fs::exists(out_dir, ec)) {
        fs::path mp = fs::path(out_dir) / "manifest.json";
        std::ofstream f(mp, std::ios::binary);
        if (f) {
            f << result.manifest_json;
            result.manifest_path = mp.string();
        }
    }
    return result;
}

}  // namespace conewalk
