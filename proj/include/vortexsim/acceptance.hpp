#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace vortexsim {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::set<int> only;          // empty: all criteria
    std::optional<int> perturb;  // tighten this criterion's tolerances past what any run can meet
    std::string scratch_dir;     // empty: system temp directory
};

const std::vector<std::pair<int, std::string>>& acceptance_criteria();

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS [3] pseudo-vortex discrimination (1.20 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace vortexsim
