#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "runner.hpp"

using namespace conewalk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("conewalk_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing, typed getters, round trip") {
    std::string text =
        "# experiment\n"
        "cone.variant = orthant\n"
        "cone.dimension = 2\n"
        "run.x = 1.5, 2.5\n"
        "run.samples = 100000\n"
        "kappa.x-list = 0,2; 0,4; 1,3\n"
        "run.stages = tail-fit,estimate-v\n"
        "\n";
    Config c = Config::parse(text);
    CHECK(c.get_string("cone.variant") == "orthant");
    CHECK(c.get_int("cone.dimension") == 2);
    CHECK(c.get_reals("run.x") == std::vector<double>{1.5, 2.5});
    CHECK(c.get_points("kappa.x-list").size() == 3);
    CHECK(c.get_points("kappa.x-list")[2] == std::vector<double>{1.0, 3.0});
    CHECK(c.get_names("run.stages") == std::vector<std::string>{"tail-fit", "estimate-v"});
    CHECK(c.get_int("missing.key", 7) == 7);
    CHECK_THROWS_AS(c.get_string("missing.key"), ConfigError);
    CHECK_THROWS_AS(c.get_int("cone.variant"), ConfigError);

    // parse(serialize(c)) == c
    Config round = Config::parse(c.serialize());
    CHECK(round == c);
    Config round2 = Config::parse(round.serialize());
    CHECK(round2 == round);

    CHECK_THROWS_AS(Config::parse("not a key value line\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse(".bad.key = 1\n"), ConfigError);
}

TEST_CASE("runner rejects invalid configurations before sampling") {
    TempDir tmp("validate");
    auto run_text = [&](const std::string& text) { return run_experiment(Config::parse(text), tmp.path.string()); };

    RunResult r = run_text("run.stages = fly-to-the-moon\ncone.variant = half-line\n");
    CHECK_FALSE(r.ok);
    CHECK(r.config_error);
    CHECK(r.error.find("unknown stage") != std::string::npos);

    r = run_text("cone.variant = half-line\nrun.x = -3\nrun.stages = simulate\n");
    CHECK_FALSE(r.ok);
    CHECK(r.error.find("open cone") != std::string::npos);

    // beta >= p: named precondition, rejected before any sampling
    r = run_text(
        "cone.variant = half-line\nrun.x = 2\nrun.stages = simulate\n"
        "simulate.probe = tau-moment\nsimulate.beta = 1.5\n");
    CHECK_FALSE(r.ok);
    CHECK(r.config_error);
    CHECK(r.error.find("beta") != std::string::npos);
    CHECK(r.error.find("p=") != std::string::npos);

    r = run_text("cone.variant = half-line\nrun.x = 2\nrun.stages = local-clt\nlaw.variant = gaussian\n");
    CHECK_FALSE(r.ok);
}

TEST_CASE("moment-condition violations warn but run") {
    TempDir tmp("warn");
    // student tail index 2.5 < p = 3 for the 3-orthant: hypothesis violated
    std::string text =
        "cone.variant = orthant\ncone.dimension = 3\nlaw.variant = student\nlaw.tail-index = 2.5\n"
        "run.x = 2,2,2\nrun.stages = simulate\nsimulate.n = 16\nrun.samples = 2000\n";
    RunResult r = run_experiment(Config::parse(text), tmp.path.string());
    CHECK(r.ok);
    CHECK(r.manifest_json.find("outside their guaranteed range") != std::string::npos);
}

TEST_CASE("pipeline writes artifacts and reruns byte-identically") {
    std::string text =
        "cone.variant = half-line\n"
        "law.variant = rademacher\n"
        "run.x = 2\n"
        "run.samples = 20000\n"
        "run.seed = 7\n"
        "run.stages = simulate,estimate-v,tail-fit\n"
        "simulate.n = 64\n"
        "estimate-v.k-grid = 2,8,32,128,256\n"
        "tail-fit.n-grid = 16,32,64,128,256,512,1024,2048\n"
        "run.plot-data = true\n";
    TempDir a("run_a"), b("run_b");
    RunResult ra = run_experiment(Config::parse(text), a.path.string());
    REQUIRE(ra.ok);
    RunResult rb = run_experiment(Config::parse(text), b.path.string());
    REQUIRE(rb.ok);

    for (const char* name : {"survival.json", "estimate_v.json", "estimate_v_trace.csv", "tail_fit.csv",
                             "tail_fit.json", "tail_fit.dat"}) {
        CAPTURE(name);
        CHECK(fs::exists(a.path / name));
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    CHECK(fs::exists(a.path / "manifest.json"));

    // a different seed changes the sampled artifacts
    std::string text2 = text;
    text2.replace(text2.find("run.seed = 7"), 12, "run.seed = 8");
    TempDir c("run_c");
    RunResult rc = run_experiment(Config::parse(text2), c.path.string());
    REQUIRE(rc.ok);
    CHECK(slurp(a.path / "tail_fit.csv") != slurp(c.path / "tail_fit.csv"));
}

TEST_CASE("decompose and eigen stages") {
    TempDir tmp("stages");
    std::string text =
        "cone.variant = orthant\ncone.dimension = 2\nlaw.variant = rademacher\n"
        "run.x = 2,3\nrun.samples = 20000\nrun.stages = decompose,eigen\n"
        "decompose.k = 64\neigen.theta0 = 1.5707963267948966\neigen.mesh = 256\n";
    RunResult r = run_experiment(Config::parse(text), tmp.path.string());
    REQUIRE(r.ok);
    CHECK(fs::exists(tmp.path / "decompose.json"));
    CHECK(fs::exists(tmp.path / "eigen_table.csv"));
    CHECK(fs::exists(tmp.path / "eigen_table.json"));
    std::string dec = slurp(tmp.path / "decompose.json");
    CHECK(dec.find("\"identity_violations\": 0") != std::string::npos);
}

TEST_CASE("simulate probes and path audit through the pipeline") {
    TempDir tmp("probes");
    std::string text =
        "cone.variant = half-line\nlaw.variant = rademacher\nrun.x = 2\n"
        "run.samples = 20000\nrun.stages = simulate\nsimulate.n = 64\n"
        "simulate.probe = tau-moment\nsimulate.beta = 0.5\nsimulate.horizon = 4096\n"
        "simulate.audit = 5\n";
    RunResult r = run_experiment(Config::parse(text), tmp.path.string());
    REQUIRE(r.ok);
    std::string surv = slurp(tmp.path / "survival.json");
    CHECK(surv.find("tau_moment") != std::string::npos);
    CHECK(surv.find("censored_fraction") != std::string::npos);
    std::string paths = slurp(tmp.path / "paths.csv");
    CHECK(paths.rfind("sample,step,x1", 0) == 0);

    TempDir tmp2("maxtail");
    std::string text2 =
        "cone.variant = half-space\ncone.dimension = 2\nlaw.variant = gaussian\nrun.x = 0,2\n"
        "run.samples = 10000\nrun.stages = simulate\nsimulate.n = 256\n"
        "simulate.probe = max-tail\nsimulate.t-exp = 2\nsimulate.epsilon = 0.2\n";
    RunResult r2 = run_experiment(Config::parse(text2), tmp2.path.string());
    REQUIRE(r2.ok);
    CHECK(slurp(tmp2.path / "survival.json").find("max_tail") != std::string::npos);
}

TEST_CASE("partial failure: manifest records completed stages") {
    TempDir tmp("partial");
    // simulate succeeds, then conditional-dist aborts on too few survivors
    std::string text =
        "cone.variant = half-line\nlaw.variant = gaussian\nrun.x = 1\n"
        "run.samples = 500\nrun.stages = simulate,conditional-dist\nsimulate.n = 16\n"
        "conditional.n = 1024\nconditional.min-survivors = 10000\n";
    RunResult r = run_experiment(Config::parse(text), tmp.path.string());
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.config_error);
    CHECK(r.error.find("increase n_samples") != std::string::npos);
    CHECK(r.manifest_json.find("\"status\": \"completed\"") != std::string::npos);
    CHECK(r.manifest_json.find("\"status\": \"failed\"") != std::string::npos);
    CHECK(fs::exists(tmp.path / "survival.json"));
    CHECK(fs::exists(tmp.path / "manifest.json"));
}

TEST_CASE("manifest inventories outputs with hashes") {
    TempDir tmp("manifest");
    std::string text =
        "cone.variant = half-line\nlaw.variant = rademacher\nrun.x = 1\n"
        "run.samples = 5000\nrun.stages = simulate\nsimulate.n = 8\n";
    RunResult r = run_experiment(Config::parse(text), tmp.path.string());
    REQUIRE(r.ok);
    CHECK(r.manifest_json.find("survival.json") != std::string::npos);
    CHECK(r.manifest_json.find("fnv64") != std::string::npos);
    CHECK(fnv1a64(slurp(tmp.path / "survival.json")) != 0);
}
