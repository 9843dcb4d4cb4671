#pragma once

#include "polaron/basis.hpp"
#include "polaron/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

namespace polaron {

// Gross transformation at cutoff Lambda on the truncated model.
//
// The generator is A = sum_{j outside Pi_Lambda} G_j (x) (a_j - a_j^dagger)
// with G_j multiplication by g^Lambda_j = -lambda_j^{-3/2} w_j, i.e. the
// matrix -B_j / lambda_j. K_l is read off from exp(A/alpha) H exp(-A/alpha):
//
//   K_l = ad_A^l(H0)/l! + ad_A^{l-1}(V1)/(l-1)! + ad_A^{l-2}(N)/(l-2)! - E_{l-2}
//
// Conjugating the truncated operators keeps the transformation exactly
// unitary, so every identity that holds for the continuum also holds here
// to rounding. The textbook assembly of K1 (momentum-coupled terms built from
// the derivative matrices) is provided alongside for comparison.
struct GrossContext {
    std::shared_ptr<const FluctuationModel> model;
    double cutoff = infinite_cutoff;
    std::vector<int> outside;                    // phonon modes with lambda_j > cutoff^2
    std::vector<Eigen::MatrixXd> generator;      // G_j in the H0 eigenbasis (zero inside Pi)
    std::vector<double> E;                       // coefficients used in K_l

    bool trivial() const { return outside.empty(); }
};

GrossContext build_K(std::shared_ptr<const FluctuationModel> model, double cutoff, std::vector<double> E = {});

// Phonon modes inside Pi_Lambda, from the model eigenvalues.
std::vector<int> inside_modes(const ElectronModel& model, double cutoff);

Block apply_A(const GrossContext& g, const Block& in);
// K_l without the -E_{l-2} shift.
Block apply_K_raw(const GrossContext& g, int l, const Block& in);
Block apply_K(const GrossContext& g, int l, const Block& in);

struct IdentityReport {
    double deviation = 0.0;  // max |P K1 P + P (K2 + K1 R K1) P - (H0bog - E0)|
    double pk1p = 0.0;       // max |P K1 P|
};

IdentityReport verify_bogoliubov_identity(const GrossContext& g, int chunk = 128);

// | <x, K_l y> - <K_l x, y> | for random x, y.
double hermiticity_defect(const GrossContext& g, int l, std::uint64_t seed);

// Root mean square of |g^Lambda_x| over the domain: sqrt(sum_{j outside} lambda_j^{-3}).
double g_norm(const GrossContext& g);

// Multiplication matrix of p^2 g^Lambda_j (grid Laplacian route) against that
// of (Pi_Lambda - 1) v_j, max over modes.
double uv_identity_deviation(const Basis& basis, double cutoff);
// Derivative-matrix assembly of the momentum-coupled K1 pieces against
// the matrix commutator [G_j, Lambda], max over modes.
double kinetic_assembly_deviation(const Basis& basis, double cutoff);
// Max entrywise gap between textbook K1 and the conjugation K1 electron
// factors; the difference is the Galerkin commutator with the Pekar potential.
double textbook_K1_deviation(const GrossContext& g, const Basis& basis);

struct ApproximateState {
    Block psi;          // one column block
    double norm = 0.0;
    int b = 0;
};

// Psi_b = sum_{i<=2b+3} (R K)^i psi^P (x) xi_b, xi_b = sum_{j<=b} (RR V)^j U Gamma_s
// with V = sum_{l=1}^b alpha^{-l} V_l and K = sum_{l=1}^{b+2} alpha^{-l} K_l.
ApproximateState approximate_eigenstate(const GrossContext& g, const SeriesContext& ctx, const SeriesResult& sr,
                                        double alpha);

// |(H0 + sum_{l=1}^{b+2} alpha^{-l} K_l) Psi_b|
double residual_norm(const GrossContext& g, const ApproximateState& st, double alpha);

// The coefficient recursion rerun with K_l in place of V_l (non-degenerate level).
std::vector<double> k_based_coefficients(const GrossContext& g, const SeriesContext& ctx, int b);

}  // namespace polaron
