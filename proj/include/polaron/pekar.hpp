#pragma once

#include "polaron/basis.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace polaron {

// Electron-sector data the Pekar problem needs, detached from the grid so
// test harnesses can rescale or switch off the interaction.
struct ElectronModel {
    Eigen::VectorXd lambda;              // K
    std::vector<Eigen::MatrixXd> B;      // M coupling matrices, K x K
    Eigen::MatrixXd grid_values;         // for the sign gauge
    Eigen::VectorXd grid_weights;

    int K() const { return static_cast<int>(lambda.size()); }
    int M() const { return static_cast<int>(B.size()); }
};

ElectronModel electron_model(const Basis& basis, double coupling_scale = 1.0);

struct PekarOptions {
    double tol = 1e-10;
    int max_iter = 2000;
    double damping = 0.5;
    double gap_threshold = 1e-8;
};

struct PekarSolution {
    ElectronModel model;
    Eigen::VectorXd c;          // unit norm, positive gauge
    double e_pek = 0.0;
    Eigen::VectorXd phi_p;      // phi_p[j] = -c^T B_j c
    double mu_pek = 0.0;        // e_pek - |phi_p|^2
    // H0 in spectral form: eigenvectors (columns, first one is c) and
    // eigenvalues with the first set to exactly 0.
    Eigen::MatrixXd H0;
    Eigen::MatrixXd h0_vectors;
    Eigen::VectorXd h0_values;
    double gap = 0.0;
    double residual = 0.0;      // |(H_scf - mu) c| before the spectral cleanup
    int iterations = 0;
    std::vector<double> energy_history;
};

double pekar_energy(const ElectronModel& model, const Eigen::VectorXd& c);

// Lambda - 2 sum_j (c^T B_j c) B_j
Eigen::MatrixXd scf_hamiltonian(const ElectronModel& model, const Eigen::VectorXd& c);

PekarSolution solve_pekar(const ElectronModel& model, const PekarOptions& opts = {},
                          std::optional<Eigen::VectorXd> start = std::nullopt);

// R u = -Q (Q H0 Q)^{-1} Q u
Eigen::VectorXd reduced_resolvent_apply(const PekarSolution& sol, const Eigen::VectorXd& u);
Eigen::MatrixXd reduced_resolvent_matrix(const PekarSolution& sol);

struct AssumptionReport {
    int restarts = 0;
    double max_restart_deviation = 0.0;
    bool unique = false;
    double tau_hat = 0.0;          // smallest sampled coercivity ratio
    int coercivity_samples = 0;
    double gap = 0.0;
};

AssumptionReport verify_assumptions(const PekarSolution& sol, int n_restarts, std::uint64_t seed,
                                    const PekarOptions& opts = {});

// (E(psi) - e_pek) / min_sign |psi -+ psi_P|_{H1}^2 with |d|_{H1}^2 = sum (lambda_j + 1) d_j^2.
double coercivity_ratio(const PekarSolution& sol, const Eigen::VectorXd& psi);

}  // namespace polaron
