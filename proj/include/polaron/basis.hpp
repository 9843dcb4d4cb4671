#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace polaron {

enum class DomainKind { interval, ball_radial };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct DomainSpec {
    DomainKind kind = DomainKind::interval;
    double extent = 3.141592653589793;  // interval length or ball radius
    int K = 10;                         // electron modes
    int M = 4;                          // phonon modes, M <= K
    int quadrature_points = 160;
};

void validate(const DomainSpec& spec);

// Dirichlet-Laplacian eigenbasis sampled on a composite Gauss-Legendre grid.
// Mode indices are 0-based throughout the library: mode j here is the
// (j+1)-th eigenfunction.
struct Basis {
    DomainSpec spec;
    Eigen::VectorXd lambda;    // K ascending eigenvalues
    Eigen::VectorXd nodes;     // radial or axial coordinate
    Eigen::VectorXd weights;   // include the 4 pi r^2 Jacobian for the ball
    Eigen::MatrixXd values;    // nodes x K
    Eigen::MatrixXd slopes;    // d/dx (interval) or d/dr (ball), nodes x K
    double orthonormality_error = 0.0;

    int K() const { return spec.K; }
    int M() const { return spec.M; }
};

Basis build_basis(const DomainSpec& spec);

// diag(lambda_j^s)
Eigen::VectorXd laplacian_power(const Basis& basis, double s);

// Integral of w_j w_m w_n over the domain.
double triple_overlap(const Basis& basis, int j, int m, int n);

// (B_j)_{mn} = lambda_j^{-1/2} triple_overlap(j, m, n), for j < M.
std::vector<Eigen::MatrixXd> coupling_matrices(const Basis& basis);

// Matrices of multiplication by w_j in the electron basis, j < count.
std::vector<Eigen::MatrixXd> multiplication_matrices(const Basis& basis, int count);

// (D_j)_{mn} = integral of w_m (grad w_j . grad w_n); j < count.
std::vector<Eigen::MatrixXd> gradient_coupling_matrices(const Basis& basis, int count);

// -Laplacian of w_j evaluated on the grid from the slope/curvature formulas,
// independent of the eigenvalue relation (nodes x K).
Eigen::MatrixXd negative_laplacian_values(const Basis& basis);

inline constexpr double infinite_cutoff = std::numeric_limits<double>::infinity();

// { j : lambda_j <= cutoff^2 } over the K electron modes.
std::vector<int> uv_projection(const Basis& basis, double cutoff);

}  // namespace polaron
