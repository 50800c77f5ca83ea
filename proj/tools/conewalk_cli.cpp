// Command-line front end. Builds a flat key-value configuration from flags
// (optionally seeded from --config) and drives everything through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "conewalk/conewalk.h"

namespace {

struct CommonOpts {
    std::string config_file;
    std::string cone = "half-line";
    int dim = 1;
    double angle = 0.0;
    int mesh = 4096;
    std::string law = "gaussian";
    double tail_index = 4.5;
    std::string x;
    int64_t samples = 100000;
    uint64_t seed = 1;
    int threads = 0;
    std::string out = "out";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_file, "configuration file (flags override its keys)");
    cmd->add_option("--cone", o.cone, "cone variant: half-line|half-space|wedge|orthant|circular");
    cmd->add_option("--dim", o.dim, "dimension (half-space, orthant)");
    cmd->add_option("--angle", o.angle, "opening angle / half-angle in radians (wedge, circular)");
    cmd->add_option("--mesh", o.mesh, "eigen solve mesh (circular)");
    cmd->add_option("--law", o.law, "increment law: gaussian|rademacher|sphere|student");
    cmd->add_option("--tail-index", o.tail_index, "tail index for the student law");
    cmd->add_option("--x", o.x, "starting point, comma-separated coordinates");
    cmd->add_option("--samples", o.samples, "Monte Carlo sample count");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all)");
    cmd->add_option("--out", o.out, "output directory");
}

class ConfigBuilder {
  public:
    explicit ConfigBuilder(const CommonOpts& o) {
        if (!o.config_file.empty()) {
            std::ifstream f(o.config_file);
            if (!f) {
                std::cerr << "error: cannot open config file " << o.config_file << "\n";
                std::exit(1);
            }
            std::stringstream ss;
            ss << f.rdbuf();
            text_ = ss.str();
            if (!text_.empty() && text_.back() != '\n') text_ += '\n';
        }
        set("cone.variant", o.cone);
        set("cone.dimension", std::to_string(o.dim));
        set("cone.angle", std::to_string(o.angle));
        set("cone.mesh", std::to_string(o.mesh));
        set("law.variant", o.law);
        set("law.tail-index", std::to_string(o.tail_index));
        if (!o.x.empty()) set("run.x", o.x);
        set("run.samples", std::to_string(o.samples));
        set("run.seed", std::to_string(o.seed));
        set("run.threads", std::to_string(o.threads));
    }

    void set(const std::string& key, const std::string& value) {
        text_ += key + " = " + value + "\n";
    }

    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

int run_stage(const CommonOpts& o, ConfigBuilder& cb, const std::string& stage) {
    cb.set("run.stages", stage);
    char* manifest = nullptr;
    cw_status rc = cw_run(cb.text().c_str(), o.out.c_str(), &manifest);
    if (rc != CW_OK) {
        std::cerr << "error: " << cw_last_error() << "\n";
        cw_string_free(manifest);
        return 1;
    }
    std::cout << "wrote " << o.out << "/manifest.json\n";
    if (manifest) {
        auto j = nlohmann::json::parse(manifest);
        for (const auto& st : j["stages"])
            for (const auto& f : st["outputs"])
                std::cout << "  " << o.out << "/" << f["file"].get<std::string>() << "\n";
        for (const auto& w : j["warnings"]) std::cout << "warning: " << w.get<std::string>() << "\n";
    }
    cw_string_free(manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conewalk: killed random walks in cones, harmonic-function estimators, limit-theorem checks"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* cmd;
        CommonOpts opts;
        std::deque<std::string> values;
        std::vector<std::pair<std::string, std::string*>> extra;
    };

    // Stage subcommands share the common flag set; stage-specific knobs are
    // plain strings passed through as config keys.
    std::vector<std::unique_ptr<Sub>> subs;
    auto make_stage = [&](const std::string& name, const std::string& help,
                          std::vector<std::pair<std::string, std::string>> keys) {
        auto s = std::make_unique<Sub>();
        s->cmd = app.add_subcommand(name, help);
        add_common(s->cmd, s->opts);
        for (auto& [flag, key] : keys) {
            s->values.emplace_back();
            std::string* store = &s->values.back();
            s->cmd->add_option(flag, *store, "config key " + key);
            s->extra.push_back({key, store});
        }
        subs.push_back(std::move(s));
    };

    make_stage("eigen", "solve the section eigenproblem, emit CSV+JSON table",
               {{"--theta0", "eigen.theta0"}, {"--eigen-mesh", "eigen.mesh"}});
    make_stage("simulate", "survival probability (and optional probes/audit)",
               {{"--n", "simulate.n"},
                {"--audit", "simulate.audit"},
                {"--probe", "simulate.probe"},
                {"--beta", "simulate.beta"},
                {"--horizon", "simulate.horizon"},
                {"--t-exp", "simulate.t-exp"},
                {"--epsilon", "simulate.epsilon"}});
    make_stage("estimate-v", "harmonic-function estimate (construction 1 or 2)",
               {{"--construction", "estimate-v.construction"},
                {"--k-grid", "estimate-v.k-grid"},
                {"--gamma", "estimate-v.gamma"},
                {"--n0", "estimate-v.n0"},
                {"--epsilon", "estimate-v.epsilon"},
                {"--cap", "estimate-v.cap"}});
    make_stage("decompose", "pathwise exit/shift/step decomposition",
               {{"--k", "decompose.k"}, {"--gamma", "decompose.gamma"}});
    make_stage("tail-fit", "log-log survival fit; slope targets -p/2",
               {{"--n-grid", "tail-fit.n-grid"}, {"--min-survivors", "tail-fit.min-survivors"}});
    make_stage("kappa-trace", "tail-constant ratio across starting points",
               {{"--x-list", "kappa.x-list"}, {"--n-grid", "kappa.n-grid"}, {"--k-grid", "kappa.k-grid"}});
    make_stage("conditional-dist", "scaled-endpoint law vs the limit density",
               {{"--n", "conditional.n"},
                {"--bins", "conditional.bins"},
                {"--min-survivors", "conditional.min-survivors"}});
    make_stage("local-clt", "lattice point-probability flatness check",
               {{"--n", "local-clt.n"},
                {"--radius-factor", "local-clt.radius-factor"},
                {"--min-hits", "local-clt.min-hits"},
                {"--y-set", "local-clt.y-set"},
                {"--v-samples", "local-clt.v-samples"}});

    // verify has its own shape: a positional suite plus a few globals.
    std::string suite = "quick";
    uint64_t vseed = 1;
    int vthreads = 0;
    std::string vout;
    CLI::App* s_verify = app.add_subcommand("verify", "run the acceptance battery");
    s_verify->add_option("suite", suite, "battery: quick or full");
    s_verify->add_option("--seed", vseed, "RNG seed");
    s_verify->add_option("--threads", vthreads, "worker threads (0 = all)");
    s_verify->add_option("--out", vout, "directory for verify_report.json");

    CLI11_PARSE(app, argc, argv);

    if (s_verify->parsed()) {
        char* report = nullptr;
        int all_pass = 0;
        cw_status rc = cw_verify(suite.c_str(), vseed, vthreads, &report, &all_pass);
        if (rc != CW_OK) {
            std::cerr << "error: " << cw_last_error() << "\n";
            return 2;
        }
        auto j = nlohmann::json::parse(report);
        for (const auto& c : j["criteria"]) {
            std::printf("%s criterion-%d %-24s measured=%-12.6g tol=%-10.6g (%.1fs)\n",
                        c["pass"].get<bool>() ? "PASS" : "FAIL", c["id"].get<int>(),
                        c["name"].get<std::string>().c_str(), c["measured"].get<double>(),
                        c["tolerance"].get<double>(), c["seconds"].get<double>());
            std::printf("       %s\n", c["detail"].get<std::string>().c_str());
        }
        if (!vout.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(vout, ec);
            std::ofstream f(vout + "/verify_report.json", std::ios::binary);
            if (f) f << report;
        }
        cw_string_free(report);
        std::printf("%s\n", all_pass ? "ALL PASS" : "FAILURES PRESENT");
        return all_pass ? 0 : 1;
    }

    for (auto& s : subs) {
        if (!s->cmd->parsed()) continue;
        ConfigBuilder cb(s->opts);
        for (auto& [key, store] : s->extra)
            if (!store->empty()) cb.set(key, *store);
        return run_stage(s->opts, cb, s->cmd->get_name());
    }
    return 0;
}
