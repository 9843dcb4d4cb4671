#pragma once

#include "polaron/config.hpp"
#include "polaron/oracle.hpp"
#include "polaron/report.hpp"
#include "polaron/series.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

namespace polaron {

// Shared setup for the CLI subcommands and the acceptance run.
struct Prepared {
    RunConfig cfg;
    Basis basis;
    PekarSolution sol;
    HessianModel hessian;
    std::shared_ptr<const FluctuationModel> model;  // null unless requested
};

Prepared prepare(const RunConfig& cfg, bool with_fock = true);

// Levels picked by the config: the explicit list, or every ladder level whose
// energy lies in the window. 1-based, ascending, clipped to the Fock dimension.
std::vector<int> resolve_levels(const RunConfig& cfg, const HessianModel& hm, int fock_dim);

// One row per branch: a non-degenerate level gives one result, a cluster of d
// levels gives d results (s = 1..d).
std::vector<SeriesResult> level_series(const std::shared_ptr<const FluctuationModel>& model, int n, int b,
                                       const Tolerances& tol);

OracleOptions oracle_options(const RunConfig& cfg);

// Long format: alpha, level, eigenvalue, base, shift.
CsvTable sweep_table(const SpectralSweep& sw);
// Reads a table written by sweep_table back; throws ConfigError on schema trouble.
SpectralSweep read_sweep_csv(const std::filesystem::path& path);

// A sweep file in the output directory whose stamp matches the config.
std::optional<SpectralSweep> cached_sweep(const RunConfig& cfg);

inline constexpr const char* sweep_file = "sweep.csv";

}  // namespace polaron
