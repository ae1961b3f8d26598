#pragma once

#include <functional>
#include <string>
#include <vector>

namespace advstab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    /// One-line summary of the measured quantities.
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    int grid_n = 256;
    int jobs = 1;
    /// Criterion ids to run; empty runs all eleven.
    std::vector<int> only;
    /// Called after each criterion finishes.
    std::function<void(const CriterionResult&)> on_result;
};

/// Runs the numbered acceptance checks. A criterion that throws is reported
/// as failed with the error message as detail.
std::vector<CriterionResult> run_validation(const ValidationOptions& opts);

/// "PASS [ 3] name: detail (1.2 s)"
std::string format_result(const CriterionResult& r);

inline constexpr int criterion_count = 11;

}  // namespace advstab
