#pragma once

#include "polaron/branch_series.hpp"
#include "polaron/fock.hpp"
#include "polaron/pekar.hpp"
#include "polaron/product_space.hpp"
#include "polaron/quadratic_model.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace polaron {

// Everything shared by the series engine, the Gross apparatus and the
// oracle: one Pekar solution, its Hessian, the truncated Fock space, the
// truncated Bogoliubov matrix and its eigendecomposition.
struct FluctuationModel {
    PekarSolution sol;
    HessianModel hessian;
    std::shared_ptr<const FockSpace> fock;
    ProductSpace ps;
    Eigen::MatrixXd bog;     // truncated Bogoliubov Hamiltonian
    FockSpectrum spectrum;
};

std::shared_ptr<const FluctuationModel> make_fluctuation_model(const PekarSolution& sol, int n_max,
                                                               std::size_t max_dim = 20000);

inline constexpr int max_series_order = 10;

struct SeriesContext {
    std::shared_ptr<const FluctuationModel> model;
    int n = 1;                 // 1-based level
    EigenGroup group;
    FockResolvent resolvent;

    const ProductSpace& ps() const { return model->ps; }
    int d() const { return group.d; }
};

SeriesContext make_series_context(std::shared_ptr<const FluctuationModel> model, int n, double cluster_tol = 1e-9);

// Integer compositions of `total` with at least min_parts parts, ordered by
// (number of parts, lexicographic).
std::vector<std::vector<int>> compositions(int total, int min_parts = 1);

// V_e on a block: V1, N - E_0, or -E_{e-2}. Throws if E is too short.
Block apply_V(const SeriesContext& ctx, int e, const Block& in, const std::vector<double>& E);

// Memoized path: T_t = sum_e R V_e T_{t-e} from T_0 = psi^P (x) X, so each
// T_t is the summed suffix of every composition of t. Returns T_0..T_tmax.
std::vector<Block> suffix_chain(const SeriesContext& ctx, const Eigen::MatrixXd& X, int tmax,
                                const std::vector<double>& E);

// tilde-V_l X for l = 0..lmax (needs E_0..E_{lmax-2}).
std::vector<Eigen::MatrixXd> apply_nested_tilde(const SeriesContext& ctx, const Eigen::MatrixXd& X, int lmax,
                                                const std::vector<double>& E);

// Uncached path: sum over compositions, each chain applied right to left,
// accumulated with compensated summation.
Eigen::MatrixXd apply_nested_tilde_explicit(const SeriesContext& ctx, const Eigen::MatrixXd& X, int l,
                                            const std::vector<double>& E);
Eigen::MatrixXd apply_chain_explicit(const SeriesContext& ctx, const std::vector<int>& parts,
                                     const Eigen::MatrixXd& X, const std::vector<double>& E);

// Dense (V_l, tilde-V_l) on the Fock space, materialized column-chunk-wise.
struct NestedPair {
    Eigen::MatrixXd V;
    Eigen::MatrixXd Vtilde;
};
NestedPair nested_V(const SeriesContext& ctx, int l, const std::vector<double>& E, int chunk = 128);

// (M_k)_{rt} over the cluster basis. Needs E_0..E_{k-1}.
Eigen::MatrixXd matrix_Mk(const SeriesContext& ctx, int k, const std::vector<double>& E);
Eigen::MatrixXd matrix_Mk_explicit(const SeriesContext& ctx, int k, const std::vector<double>& E);

struct SeriesResult {
    int n = 1;
    int s = 1;
    int d = 1;
    std::vector<double> E;
    std::vector<Eigen::MatrixXd> M;       // M_1..M_b
    std::vector<double> odd_raw;          // raw odd-order values before zeroing (d = 1)
    bool shared_branch = false;
};

SeriesResult coefficients_nondegenerate(const SeriesContext& ctx, int b, double odd_tol = 1e-9);
// s is 1-based.
SeriesResult coefficients_degenerate(const SeriesContext& ctx, int s, int b);

double explicit_E2(const SeriesContext& ctx);
double explicit_E4(const SeriesContext& ctx, const std::vector<double>& E);

// <psi (x) Gamma_r, P phi(v) R V1 R phi(v) P psi (x) Gamma_t> with phi(v) the field without phi^P.
Eigen::MatrixXd first_order_coupling(const SeriesContext& ctx);

// max over the cluster basis of |P V_{l+1} R V_1 P + h.c.| and |P V1 P|.
double parity_identity_defect(const SeriesContext& ctx, int l, const std::vector<double>& E);

}  // namespace polaron
