#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conewalk {

/// One acceptance-battery criterion outcome. `measured` and `tolerance`
/// carry the headline number of the check; `detail` the sub-measurements.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double measured = 0;
    double tolerance = 0;
    std::string detail;
    double seconds = 0;
};

enum class VerifySuite { Quick, Full };

VerifySuite suite_from_name(const std::string& name);  // "quick" | "full"

/// Runs the named battery. Every criterion is evaluated (failures never
/// throw) and reported with its measured value and pinned tolerance.
/// Runtime budgets are stated for 8 hardware threads and scaled linearly
/// to the thread count actually used.
std::vector<CriterionResult> run_battery(VerifySuite suite, uint64_t seed, int threads);

/// Renders the battery as a machine-readable JSON report.
std::string battery_report_json(const std::vector<CriterionResult>& results);

/// One "PASS criterion-3 ..." line per criterion.
std::string battery_report_text(const std::vector<CriterionResult>& results);

}  // namespace conewalk
