#pragma once

#include "polaron/quadratic_model.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <map>
#include <vector>

namespace polaron {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// One nonzero of an annihilator a_j: a_j |from> = amp |to>.
struct Hop {
    int from;
    int to;
    double amp;
};

struct FockSpace {
    int M = 0;
    int n_max = 0;
    std::vector<std::vector<int>> states;  // lexicographic
    std::vector<int> total;                // occupancy of each state
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<Hop>> hops;    // per mode

    int dim() const { return static_cast<int>(states.size()); }
    int find(const std::vector<int>& occ) const;
};

// Throws ConfigError when C(M + n_max, M) exceeds max_dim.
FockSpace build_fock(int M, int n_max, std::size_t max_dim = 20000);

struct FockOperator {
    SparseMatrix matrix;
    bool hermitian = false;
    int bandwidth = 0;  // largest change of total occupancy
};

// (a_j, a_j^dagger)
std::pair<SparseMatrix, SparseMatrix> ladder(const FockSpace& fock, int j);
Eigen::VectorXd number_diagonal(const FockSpace& fock);
FockOperator number_operator(const FockSpace& fock);
FockOperator field_operator(const FockSpace& fock, const Eigen::VectorXd& f);
// a^dagger(f) and a(f) for real f
SparseMatrix creation(const FockSpace& fock, const Eigen::VectorXd& f);
SparseMatrix annihilation(const FockSpace& fock, const Eigen::VectorXd& f);

// N + sum_jk G_jk X_j X_k with X_j = a_j + a_j^dagger multiplied as truncated matrices.
Eigen::MatrixXd bogoliubov_hamiltonian(const FockSpace& fock, const Eigen::MatrixXd& G);

struct FockSpectrum {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, deterministic sign
};

FockSpectrum diagonalize(const Eigen::MatrixXd& H);

struct EigenGroup {
    int first = 0;           // 0-based position of the cluster in the spectrum
    int d = 1;
    double energy = 0.0;     // cluster mean
    Eigen::MatrixXd gamma;   // dim x d orthonormal
    Eigen::MatrixXd projector() const { return gamma * gamma.transpose(); }
};

// Cluster containing the n-th eigenvalue (1-based, multiplicity counted).
// Consecutive eigenvalues within cluster_tol*max(1,|E|) are merged; a
// neighbouring gap below ambiguity_factor*cluster_tol aborts.
EigenGroup eigenpair_group(const FockSpectrum& spec, int n, double cluster_tol = 1e-9,
                           double ambiguity_factor = 1e3);

// R u = -Q (Q (H - E) Q)^{-1} Q u built from the spectral decomposition.
struct FockResolvent {
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& u) const { return matrix * u; }
};

FockResolvent fock_reduced_resolvent(const FockSpectrum& spec, const EigenGroup& group);

// Second quantization Gamma(O) of a real orthogonal mode map: a_k^dagger -> a^dagger(O e_k).
Eigen::MatrixXd passive_rotation(const FockSpace& fock, const Eigen::MatrixXd& O);

struct BogoliubovUnitary {
    Eigen::MatrixXd U;       // dim x dim; U^T e_vac is the ground state of the quadratic Hamiltonian
    double leakage = 0.0;    // max |I - U U^T| over interior rows and columns
};

// U = Gamma(O) S Gamma(O)^T with S the product of single-mode squeezers
// exp(r_k/2 (a_k^2 - a_k^dagger^2)) and O the eigenvectors of h.
BogoliubovUnitary bogoliubov_unitary(const FockSpace& fock, const HessianModel& hm,
                                     double leakage_threshold = 1e-6);

// Mask of basis states with total occupancy <= cap.
std::vector<int> states_up_to(const FockSpace& fock, int cap);

double max_abs_on(const Eigen::MatrixXd& A, const std::vector<int>& rows, const std::vector<int>& cols);

}  // namespace polaron
