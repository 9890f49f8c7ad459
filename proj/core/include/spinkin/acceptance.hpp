#pragma once

#include <string>
#include <vector>

namespace spinkin::acceptance {

struct CheckInfo {
    int id;
    std::string name;
    double time_limit;  ///< seconds
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  ///< measured values against their thresholds
    double seconds = 0.0;
    double time_limit = 0.0;
};

const std::vector<CheckInfo>& checks();

/// Runs one check. A check passes when every measured quantity meets its threshold and the
/// wall time stays under the limit. Exceptions are reported as failures.
CheckResult run_check(int id);

/// "all", a check name or its number.
std::vector<CheckResult> run_suite(const std::string& which);

/// One line: PASS/FAIL, number, name, detail and timing.
std::string format_line(const CheckResult& r);

}  // namespace spinkin::acceptance
