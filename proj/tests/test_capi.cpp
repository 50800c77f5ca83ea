#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "conewalk/conewalk.h"

namespace fs = std::filesystem;

TEST_CASE("cone handle lifecycle and queries") {
    cw_cone* cone = nullptr;
    REQUIRE(cw_cone_create("orthant", 2, 0, 0, &cone) == CW_OK);
    REQUIRE(cone != nullptr);
    CHECK(cw_cone_dim(cone) == 2);

    double p = 0;
    CHECK(cw_cone_p(cone, &p) == CW_OK);
    CHECK(p == doctest::Approx(2.0));

    double x[2] = {3.0, 1.0};
    int inside = 0;
    CHECK(cw_cone_contains(cone, x, 2, &inside) == CW_OK);
    CHECK(inside == 1);
    double d = 0;
    CHECK(cw_cone_dist_boundary(cone, x, 2, &d) == CW_OK);
    CHECK(d == doctest::Approx(1.0));

    double u = 0;
    CHECK(cw_cone_u(cone, x, 2, &u) == CW_OK);
    CHECK(u == doctest::Approx(3.0));
    double grad[2];
    CHECK(cw_cone_grad_u(cone, x, 2, grad) == CW_OK);
    CHECK(grad[0] == doctest::Approx(1.0));
    CHECK(grad[1] == doctest::Approx(3.0));

    double x0[2], r0 = 0;
    CHECK(cw_cone_starlike(cone, x0, &r0) == CW_OK);
    CHECK(r0 == 2.0);
    CHECK(x0[0] == doctest::Approx(std::sqrt(0.5)));

    // error paths: dimension mismatch and outside-domain gradient
    CHECK(cw_cone_contains(cone, x, 3, &inside) == CW_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(cw_last_error()) > 0);
    double bad[2] = {-1.0, 1.0};
    CHECK(cw_cone_grad_u(cone, bad, 2, grad) == CW_ERR_DOMAIN);

    cw_cone_free(cone);
}

TEST_CASE("cone creation errors") {
    cw_cone* cone = nullptr;
    CHECK(cw_cone_create("dodecahedron", 3, 0, 0, &cone) == CW_ERR_INVALID_ARGUMENT);
    CHECK(cw_cone_create("wedge", 2, 9.0, 0, &cone) == CW_ERR_INVALID_ARGUMENT);
    CHECK(cw_cone_create(nullptr, 2, 0, 0, &cone) == CW_ERR_INVALID_ARGUMENT);
}

TEST_CASE("survival and estimators through the C surface") {
    cw_cone* cone = nullptr;
    cw_law* law = nullptr;
    REQUIRE(cw_cone_create("half-line", 1, 0, 0, &cone) == CW_OK);
    REQUIRE(cw_law_create("rademacher", 1, 0, &law) == CW_OK);

    double x[1] = {1.0};
    cw_estimate est{};
    REQUIRE(cw_survival(cone, law, x, 1, 3, 200000, 7, 0, 0, &est) == CW_OK);
    CHECK(std::abs(est.value - 0.375) <= 4.0 * est.stderr_);
    CHECK(est.n_samples == 200000);

    // deterministic across thread counts
    cw_estimate est2{};
    REQUIRE(cw_survival(cone, law, x, 1, 3, 200000, 7, 0, 2, &est2) == CW_OK);
    CHECK(est.value == est2.value);

    double x5[1] = {5.0};
    cw_estimate v1{};
    REQUIRE(cw_estimate_v(cone, law, x5, 1, 1, 1024, 0.0, 0, 0, 100000, 7, 1, 0, &v1) == CW_OK);
    CHECK(std::abs(v1.value - 5.0) / 5.0 < 0.05);
    cw_estimate v2{};
    REQUIRE(cw_estimate_v(cone, law, x5, 1, 2, 4096, 0.0, 64, 0.25, 100000, 7, 2, 0, &v2) == CW_OK);
    CHECK(std::abs(v2.value - 5.0) / 5.0 < 0.05);
    cw_estimate dk{};
    REQUIRE(cw_estimate_direct(cone, law, x5, 1, 0, 1000, 7, 3, 0, &dk) == CW_OK);
    CHECK(dk.value == 5.0);

    CHECK(cw_estimate_v(cone, law, x5, 1, 3, 1024, 0.0, 0, 0, 1000, 7, 1, 0, &v1) == CW_ERR_INVALID_ARGUMENT);
    CHECK(cw_survival(cone, law, x5, 1, 3, 10, 7, 0, 0, &est) == CW_ERR_INVALID_ARGUMENT);

    cw_law_free(law);
    cw_cone_free(cone);
}

TEST_CASE("run pipeline and verify through the C surface") {
    fs::path out = fs::temp_directory_path() / "conewalk_capi_run";
    fs::remove_all(out);

    const char* config =
        "cone.variant = half-line\n"
        "law.variant = rademacher\n"
        "run.x = 2\n"
        "run.samples = 5000\n"
        "run.stages = simulate\n"
        "simulate.n = 16\n";
    char* manifest = nullptr;
    REQUIRE(cw_run(config, out.string().c_str(), &manifest) == CW_OK);
    REQUIRE(manifest != nullptr);
    CHECK(std::string(manifest).find("survival.json") != std::string::npos);
    cw_string_free(manifest);
    CHECK(fs::exists(out / "manifest.json"));
    fs::remove_all(out);

    // config errors come back as CW_ERR_CONFIG with a diagnostic
    char* m2 = nullptr;
    CHECK(cw_run("run.stages = warp\ncone.variant = half-line\n", out.string().c_str(), &m2) == CW_ERR_CONFIG);
    CHECK(std::string(cw_last_error()).find("unknown stage") != std::string::npos);
    cw_string_free(m2);
    fs::remove_all(out);

    char* report = nullptr;
    int ok = -1;
    CHECK(cw_verify("not-a-suite", 42, 0, &report, &ok) == CW_ERR_INVALID_ARGUMENT);
    CHECK(cw_version() != nullptr);
}
