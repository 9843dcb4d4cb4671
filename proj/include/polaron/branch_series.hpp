#pragma once

#include <Eigen/Dense>

#include <vector>

namespace polaron {

struct EigenBranch {
    std::vector<double> coeffs;  // mu_1 .. mu_l
    // Set when this branch is still degenerate with a neighbour after the
    // last computed order; such branches carry identical coefficients.
    bool shared = false;
};

// Analytic eigenvalue branches of M(x) = sum_{k=1}^{l} x^k M_k as x -> 0+,
// ordered ascending. Input: M_1..M_l (symmetric d x d).
std::vector<EigenBranch> eigenvalue_series(const std::vector<Eigen::MatrixXd>& M, double rel_tol = 1e-9);

// max_s |eig_s(M(x)) - sum_k mu_k^(s) x^k| at the given x.
double branch_series_deviation(const std::vector<Eigen::MatrixXd>& M, const std::vector<EigenBranch>& branches,
                               double x);

}  // namespace polaron
