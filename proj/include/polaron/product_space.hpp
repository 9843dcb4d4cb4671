#pragma once

#include "polaron/fock.hpp"
#include "polaron/pekar.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace polaron {

// Electron (x) Fock vectors are stored as blocks of `ncols` independent
// vectors in one matrix with (K * ncols) rows and dim(Fock) columns:
// entry (m + K * c, f) is electron component m, Fock state f of vector c.
// The same memory read as a K x (ncols * dim) matrix lets electron
// operators act as one GEMM, while Fock ladder moves are column axpys.
using Block = Eigen::MatrixXd;

// One ladder move into a Fock state: from `source` through mode `mode`
// (either direction) with matrix element `amp`.
struct Incoming {
    int mode;
    int source;
    double amp;
};

// Electron operators expressed in the H0 eigenbasis (index 0 is psi^P).
struct ProductSpace {
    int K = 0;
    std::shared_ptr<const FockSpace> fock;
    Eigen::VectorXd eps;                  // H0 eigenvalues, eps[0] = 0
    Eigen::VectorXd resolvent_diag;       // -1/eps, 0 on psi^P
    std::vector<Eigen::MatrixXd> field;   // U^T (B_j + phi_j) U, the V1 electron factors
    std::vector<Eigen::MatrixXd> bare;    // U^T B_j U
    Eigen::VectorXd number;               // Fock occupation totals
    std::vector<std::vector<Incoming>> incoming;  // per Fock state

    int dim() const { return fock->dim(); }
    Block zeros(int ncols) const { return Block::Zero(K * ncols, dim()); }
    int ncols(const Block& b) const { return static_cast<int>(b.rows() / K); }
};

ProductSpace make_product_space(const PekarSolution& sol, std::shared_ptr<const FockSpace> fock);

// psi^P (x) X for a dim x ncols Fock block X, and the inverse map P.
Block embed(const ProductSpace& ps, const Eigen::MatrixXd& X);
Eigen::MatrixXd project(const ProductSpace& ps, const Block& Y);
// Zero the psi^P component.
void remove_ground(const ProductSpace& ps, Block& Y);

// out += (A (x) 1) in
void add_electron(const ProductSpace& ps, const Eigen::MatrixXd& A, const Block& in, Block& out, double scale = 1.0);
// out += (1 (x) (a_j + a_j^dagger)) in     [sign = +1]
// out += (1 (x) (a_j - a_j^dagger)) in     [sign = -1]
void add_mode(const ProductSpace& ps, int j, int sign, const Block& in, Block& out, double scale = 1.0);

// V1 = sum_j (B_j + phi_j) (x) X_j
Block apply_V1(const ProductSpace& ps, const Block& in);
// sum_j B_j (x) X_j, the field without the classical shift
Block apply_bare_field(const ProductSpace& ps, const Block& in);
Block apply_R(const ProductSpace& ps, const Block& in);
Block apply_H0(const ProductSpace& ps, const Block& in);
Block apply_number(const ProductSpace& ps, const Block& in);

// Vector c of a block as one contiguous (K * dim) array, electron index fastest.
Eigen::VectorXd gather(const ProductSpace& ps, const Block& Y, int c);

// Per-column inner products <A_c, B_c> in twice working precision.
Eigen::VectorXd column_dots(const ProductSpace& ps, const Block& A, const Block& B);
// Gram matrix <A_a, B_b> across the vectors of two blocks.
Eigen::MatrixXd block_gram(const ProductSpace& ps, const Block& A, const Block& B);

}  // namespace polaron
