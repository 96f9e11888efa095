#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mpelab {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string group;
    std::string expected;
    std::string actual;
    std::string tolerance;
    bool passed = false;
    double seconds = 0.0;
};

struct VerifyOptions {
    /// Overrides the solver stopping tolerance in every criterion.
    std::optional<double> solver_tol;
    /// Keeps criteria whose id, group or name contains this text.
    std::string filter;
    std::uint64_t seed = 20230917;
};

struct CriterionInfo {
    int id = 0;
    std::string name;
    std::string group;
};

std::vector<CriterionInfo> acceptance_criteria();

/// Runs the selected criteria in id order.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts);

/// Fixed-width table with one row per criterion.
std::string format_table(const std::vector<CriterionResult>& results);

}  // namespace mpelab
