#pragma once

#include "polaron/config.hpp"
#include "polaron/fit.hpp"
#include "polaron/oracle.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace polaron {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string summary;             // the numbers behind the verdict, one line
    nlohmann::ordered_json details;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::vector<int> only;                        // criterion ids; empty runs all ten
    std::optional<SpectralSweep> sweep;           // reused for 5, 6 and 10 when it covers 4 levels
    std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int criterion_count = 10;

// Runs the checks on cfg (criteria 1 and 8 derive their own configurations
// from cfg.domain). Exceptions inside a criterion turn into a failed result.
std::vector<CriterionResult> run_acceptance(const RunConfig& cfg, const AcceptanceOptions& opts = {});

// "PASS  5 series-order  ..." style line.
std::string format_line(const CriterionResult& r);
nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results);

// Pinned thresholds. The fit margin and floor come from the config.
struct AcceptanceThresholds {
    double ladder_relative = 1e-4;
    double identity = 1e-10;
    double pk1p = 1e-12;
    double odd = 1e-9;
    double explicit_relative = 1e-9;
    double diagonal_M1 = 1e-12;
    double first_order_branch = 1e-10;
    double splitting_relative = 0.05;
    double tau_ceiling = 1e-10;      // tau_k <= 1 + this
    double g_ceiling = 1e-12;        // largest eigenvalue of G
    double kernel_off = 1e-14;       // |B|_HS with the interaction off
    double fault = 1e-3;
};

// Interval length at which two levels of opposite phonon-number parity cross
// in the truncated H0 (so the crossing is exact), found by bracketing the
// energy gap between the second even and second odd eigenvector.
struct DegenerateSetup {
    bool found = false;
    double extent = 0.0;
    int level = 0;         // 1-based first level of the d = 2 cluster
    double gap = 0.0;      // residual level gap at the root
};

DegenerateSetup engineer_crossing(const DomainSpec& base, int n_max, double lo, double hi);

// Phonon-number parity <(-1)^N> of each of the first `count` eigenvectors.
std::vector<double> number_parity(const FluctuationModel& model, int count);

}  // namespace polaron
