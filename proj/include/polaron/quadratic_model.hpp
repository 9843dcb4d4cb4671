#pragma once

#include "polaron/pekar.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace polaron {

struct HessianModel {
    Eigen::MatrixXd G;       // M x M, negative semidefinite
    Eigen::MatrixXd h;       // I + 4G
    Eigen::VectorXd tau;     // ascending eigenvalues of h
    Eigen::MatrixXd modes;   // eigenvectors of h (columns)
    Eigen::MatrixXd kernel;  // 1/2 (h^{-1/4} - h^{1/4})
};

// Assemble G_jk = (B_j c)^T R (B_k c) and eigendecompose h.
HessianModel hessian_matrix(const PekarSolution& sol);

// Eigendecompose a given h (harness entry point).
HessianModel hessian_from_h(const Eigen::MatrixXd& h);

// 1/2 sum (sqrt(tau) - 1)
double ground_energy(const HessianModel& hm);

struct LadderLevel {
    int index = 0;                 // 1-based, counted with multiplicity
    double energy = 0.0;
    std::vector<int> occupation;   // per eigenmode of h
    int degeneracy = 1;            // size of the equal-energy group containing it
};

// The `count` lowest ladder values by best-first search over occupations.
// When only_below_continuum is set, levels at or above E^(1) + 1 are dropped.
std::vector<LadderLevel> ladder_spectrum(const HessianModel& hm, int count,
                                         bool only_below_continuum = false, double rel_tol = 1e-9);

struct BogoliubovKernel {
    Eigen::MatrixXd kernel;     // 1/2 (h^{-1/4} - h^{1/4})
    Eigen::MatrixXd cosh_part;  // (1 + kernel^2)^{1/2}
    Eigen::VectorXd squeeze;    // r_k = -1/4 ln tau_k per eigenmode
    double hs_norm = 0.0;
    double domination_constant = 0.0;  // smallest C with kernel^2 <= C (1 - h)
};

BogoliubovKernel bogoliubov_kernel(const HessianModel& hm);

void write_tau_csv(std::ostream& os, const HessianModel& hm);
void write_ladder_csv(std::ostream& os, const std::vector<LadderLevel>& levels);

}  // namespace polaron
