// selfcheck.hpp — Reduced-size invariant suites with a machine-readable report.

#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace jch::selfcheck {

struct CheckResult {
    std::string name;
    std::string module;
    bool passed{false};
    double value{0.0};
    double threshold{0.0};
    std::string detail;
};

struct Options {
    bool corrupt_coefficients{false};  // perturbs the manifold-2 ladder coefficients before reconstruction
};

std::vector<CheckResult> run(const Options& options = {});

nlohmann::json to_json(const std::vector<CheckResult>& results);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace jch::selfcheck
