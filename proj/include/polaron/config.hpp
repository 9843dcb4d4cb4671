#pragma once

#include "polaron/basis.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polaron {

inline constexpr const char* artifact_version = "1.0.0";
inline constexpr const char* output_root_env = "POLARON_OUTPUT_ROOT";

struct Tolerances {
    double pekar = 1e-10;         // SCF residual
    double cluster = 1e-9;        // relative merge width for Bogoliubov levels
    double odd = 1e-9;            // odd coefficient vanishing, relative to max(1, |E_{l-1}|)
    double pcg = 1e-15;           // oracle inner solves
    double fit_margin = 0.3;
    double fit_floor = 1e-13;     // r_b below this is not fitted
    double leakage = 1e-6;        // truncated Bogoliubov unitary
    double identity = 1e-10;      // Bogoliubov identity
};

struct RunConfig {
    DomainSpec domain;
    int n_max = 10;
    std::size_t max_fock_dim = 20000;
    std::vector<int> levels{1, 2, 3, 4};                    // 1-based, used when no window is set
    std::optional<std::pair<double, double>> energy_window;  // ladder energies in [lo, hi]
    int b_max = 6;
    double alpha_min = 20.0, alpha_max = 200.0;
    int alpha_count = 16;
    std::vector<double> alpha_values;                        // explicit grid overrides min/max/count
    double fit_min = 60.0, fit_max = 200.0;
    std::vector<double> cutoffs{infinite_cutoff};
    Tolerances tol;
    std::string output_dir = "results";
    std::uint64_t seed = 20240601;
    int restarts = 8;
    double memory_budget_mb = 4096.0;
    double coupling_scale = 1.0;                             // 0 switches the interaction off
};

RunConfig parse_config(std::string_view toml_text);
RunConfig load_config(const std::filesystem::path& path);

// Throws ConfigError naming the first violated rule.
void validate(const RunConfig& cfg);

std::vector<double> alpha_grid(const RunConfig& cfg);

// Peak working set of the sweep in MiB:
//   8 * (12 K D^2 + 20 D^2) / 2^20 bytes with D = C(M + N_max, M).
double memory_estimate_mb(const RunConfig& cfg);
std::size_t fock_dimension(int M, int n_max);

nlohmann::ordered_json to_json(const RunConfig& cfg);
// FNV-1a 64 of the canonical JSON dump, hex.
std::string config_hash(const RunConfig& cfg);

// output_dir resolved against $POLARON_OUTPUT_ROOT when relative.
std::filesystem::path output_directory(const RunConfig& cfg);

}  // namespace polaron
