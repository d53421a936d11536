#pragma once

#include <functional>
#include <string>
#include <vector>

namespace permot::verify {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

using CriterionFn = std::function<CriterionResult()>;

struct Criterion {
    std::string name;
    CriterionFn run;
};

const std::vector<Criterion>& all_criteria();
std::vector<CriterionResult> run_suite(const std::string& filter = "");

}  // namespace permot::verify
