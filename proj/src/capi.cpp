#include "conewalk/conewalk.h"

#include <cstring>
#include <json.hpp>
#include <string>

#include "config.hpp"
#include "harmonic.hpp"
#include "runner.hpp"
#include "verify.hpp"
#include "vestimate.hpp"
#include "walk.hpp"

using namespace conewalk;

struct cw_cone {
    ConeSpec spec;
    HarmonicForm form;
    explicit cw_cone(ConeSpec s) : spec(s), form(std::move(s)) {}
};

struct cw_law {
    IncrementLaw law;
};

namespace {

thread_local std::string t_last_error;

cw_status fail(cw_status code, const char* what) {
    t_last_error = what ? what : "";
    return code;
}

template <class Fn>
cw_status guarded(Fn&& fn) {
    try {
        fn();
        t_last_error.clear();
        return CW_OK;
    } catch (const ConfigError& e) {
        return fail(CW_ERR_CONFIG, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(CW_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(CW_ERR_DOMAIN, e.what());
    } catch (const std::logic_error& e) {
        return fail(CW_ERR_STATE, e.what());
    } catch (const std::runtime_error& e) {
        return fail(CW_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(CW_ERR_UNKNOWN, e.what());
    }
}

Vec vec_of(const double* x, int dim) {
    if (!x || dim < 1 || dim > kMaxDim) throw std::invalid_argument("bad point argument");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = x[i];
    if (!v.finite()) throw std::invalid_argument("point has non-finite coordinates");
    return v;
}

cw_estimate convert(const EstimateCI& e) {
    return cw_estimate{e.mean, e.stderr_, e.n_samples, e.seed, e.stream, e.flags};
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* cw_version(void) { return kVersion; }

const char* cw_last_error(void) { return t_last_error.c_str(); }

cw_status cw_cone_create(const char* variant, int dim, double angle, int mesh, cw_cone** out) {
    if (!variant || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        ConeSpec spec = ConeSpec::from_config(variant, dim, angle, mesh > 0 ? mesh : 4096);
        *out = new cw_cone(std::move(spec));
    });
}

void cw_cone_free(cw_cone* cone) { delete cone; }

int cw_cone_dim(const cw_cone* cone) { return cone ? cone->spec.dim() : 0; }

cw_status cw_cone_p(const cw_cone* cone, double* out) {
    if (!cone || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    *out = cone->spec.p();
    return CW_OK;
}

cw_status cw_cone_contains(const cw_cone* cone, const double* x, int dim, int* out) {
    if (!cone || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = cone->spec.contains(vec_of(x, dim)) ? 1 : 0; });
}

cw_status cw_cone_dist_boundary(const cw_cone* cone, const double* x, int dim, double* out) {
    if (!cone || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = cone->spec.dist_boundary(vec_of(x, dim)); });
}

cw_status cw_cone_starlike(const cw_cone* cone, double* x0, double* r0) {
    if (!cone || !x0 || !r0) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    Vec v;
    cone->spec.starlike_data(v, *r0);
    for (int i = 0; i < v.d; ++i) x0[i] = v[i];
    return CW_OK;
}

cw_status cw_cone_u(const cw_cone* cone, const double* x, int dim, double* out) {
    if (!cone || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = cone->form.u(vec_of(x, dim)); });
}

cw_status cw_cone_grad_u(const cw_cone* cone, const double* x, int dim, double* grad) {
    if (!cone || !grad) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        Vec g = cone->form.grad_u(vec_of(x, dim));
        for (int i = 0; i < g.d; ++i) grad[i] = g[i];
    });
}

cw_status cw_law_create(const char* variant, int dim, double param, cw_law** out) {
    if (!variant || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new cw_law{IncrementLaw::from_config(variant, dim, param)}; });
}

void cw_law_free(cw_law* law) { delete law; }

cw_status cw_survival(const cw_cone* cone, const cw_law* law, const double* x, int dim, int64_t n,
                      int64_t n_samples, uint64_t seed, uint32_t stream, int threads,
                      cw_estimate* out) {
    if (!cone || !law || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = convert(survival_estimate(cone->spec, law->law, vec_of(x, dim), n, n_samples, seed, stream, threads));
    });
}

cw_status cw_estimate_direct(const cw_cone* cone, const cw_law* law, const double* x, int dim,
                             int64_t k, int64_t n_samples, uint64_t seed, uint32_t stream,
                             int threads, cw_estimate* out) {
    if (!cone || !law || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = convert(estimate_direct(cone->form, law->law, vec_of(x, dim), k, n_samples, seed, stream, threads));
    });
}

cw_status cw_estimate_v(const cw_cone* cone, const cw_law* law, const double* x, int dim,
                        int construction, int64_t k_max, double gamma, int64_t n0, double eps,
                        int64_t n_samples, uint64_t seed, uint32_t stream, int threads,
                        cw_estimate* out) {
    if (!cone || !law || !out) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        Vec pt = vec_of(x, dim);
        if (construction == 1) {
            std::vector<int64_t> grid;
            for (int64_t k = std::max<int64_t>(1, k_max / 512); k <= k_max; k *= 4) grid.push_back(k);
            if (grid.empty() || grid.back() != k_max) grid.push_back(k_max);
            ShiftSequence shift = gamma > 0 ? ShiftSequence::with_gamma(cone->spec, gamma)
                                            : ShiftSequence::standard(cone->spec);
            auto r = estimate_v_construction1(cone->form, law->law, pt, shift, grid, n_samples, seed, stream, threads);
            *out = convert(r.v_hat);
        } else if (construction == 2) {
            Schedule sched(n0, eps, k_max);
            auto r = estimate_v_construction2(cone->form, law->law, pt, sched, n_samples, seed, stream, threads);
            *out = convert(r.v_hat);
        } else {
            throw std::invalid_argument("construction must be 1 or 2");
        }
    });
}

cw_status cw_run(const char* config_text, const char* out_dir, char** manifest_json) {
    if (!config_text || !out_dir) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    try {
        Config cfg = Config::parse(config_text);
        RunResult r = run_experiment(cfg, out_dir);
        if (manifest_json) *manifest_json = dup_string(r.manifest_json);
        if (!r.ok) return fail(r.config_error ? CW_ERR_CONFIG : CW_ERR_NUMERIC, r.error.c_str());
        t_last_error.clear();
        return CW_OK;
    } catch (const ConfigError& e) {
        return fail(CW_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(CW_ERR_UNKNOWN, e.what());
    }
}

cw_status cw_verify(const char* suite, uint64_t seed, int threads, char** report_json, int* all_pass) {
    if (!suite) return fail(CW_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto results = run_battery(suite_from_name(suite), seed, threads);
        bool ok = true;
        for (const auto& r : results) ok = ok && r.pass;
        if (report_json) *report_json = dup_string(battery_report_json(results));
        if (all_pass) *all_pass = ok ? 1 : 0;
    });
}

void cw_string_free(char* s) { delete[] s; }

}  // extern "C"
