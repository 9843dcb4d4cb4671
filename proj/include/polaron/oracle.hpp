#pragma once

#include "polaron/series.hpp"

#include <Eigen/Dense>

#include <vector>

namespace polaron {

// Dense H0 (x) 1 + alpha^{-1} V1 + alpha^{-2} N in the H0 eigenbasis, index
// m + K f (electron fastest). Throws ConfigError above max_dim.
Eigen::MatrixXd fluctuation_hamiltonian(const FluctuationModel& model, double alpha, int max_dim = 6000);

// Lowest `levels` eigenvalues of the dense fluctuation Hamiltonian.
Eigen::VectorXd dense_levels(const FluctuationModel& model, double alpha, int levels, int max_dim = 6000);

struct OracleOptions {
    double pcg_tol = 1e-15;       // relative residual floor for the first solve
    int pcg_max_iter = 300;
    double series_tol = 1e-18;    // drop z^k terms below this relative size
    int max_series_terms = 12;
    double fixed_point_tol = 1e-17;
    int fixed_point_max_iter = 60;
    double cluster_tol = 1e-9;
};

// One alpha: for each requested level, the Bogoliubov cluster energy it
// continues from and the shift delta with alpha^2 E~ = base + delta.
struct LevelSet {
    double alpha = 0.0;
    Eigen::VectorXd base;
    Eigen::VectorXd shift;
    int series_terms = 0;
    int pcg_iterations = 0;
};

// Two-stage Feshbach reduction: the excited electron states are eliminated
// with preconditioned CG solves (expanded in powers of the eigenvalue), then
// the remaining Fock-space problem is solved by a Schur complement on the
// Bogoliubov cluster with a fixed point in the eigenvalue. The Bogoliubov
// block enters through its computed eigendecomposition, the same one the
// series engine expands around, so delta carries full relative precision.
LevelSet feshbach_levels(const FluctuationModel& model, double alpha, int levels, const OracleOptions& opts = {});

struct SpectralSweep {
    std::vector<double> alphas;       // ascending; may end with +inf
    int levels = 0;
    Eigen::MatrixXd eigenvalues;      // E~^(n)(alpha), rows alpha, columns n
    Eigen::MatrixXd base;             // cluster energies
    Eigen::MatrixXd shift;            // alpha^2 E~ - base
};

std::vector<double> log_grid(double lo, double hi, int count);

// alpha = +inf gives the H0 (x) 1 spectrum: all zero with shift 0.
SpectralSweep exact_levels(const FluctuationModel& model, const std::vector<double>& alphas, int levels,
                           const OracleOptions& opts = {});

}  // namespace polaron
