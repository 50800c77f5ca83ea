#pragma once

#include <string>

#include "config.hpp"

namespace conewalk {

inline constexpr const char* kVersion = "0.1.0";
/// Default seed; fixed so every run (including `verify`) is deterministic
/// out of the box. Override with run.seed / --seed.
inline constexpr uint64_t kDefaultSeed = 1;

/// Outcome of a pipeline run. `manifest_json` echoes the config, records
/// per-stage seeds and stream layouts, and inventories every output file
/// with a content hash; it is written to <out_dir>/manifest.json as well.
struct RunResult {
    bool ok = false;
    bool config_error = false;  // failed validation before/at stage setup
    std::string error;          // first failing stage's diagnostic
    std::string manifest_json;
    std::string manifest_path;
};

/// Validates the configuration (before any sampling) and executes the
/// requested stages, writing CSV/JSON artifacts into out_dir. Stage names:
/// eigen, simulate, estimate-v, decompose, tail-fit, kappa-trace,
/// conditional-dist, local-clt.
RunResult run_experiment(const Config& config, const std::string& out_dir);

/// 64-bit FNV-1a content hash used in the manifest file inventory.
uint64_t fnv1a64(const std::string& data);

}  // namespace conewalk
