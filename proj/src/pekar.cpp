#include "polaron/pekar.hpp"

#include "polaron/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace polaron {
namespace {

Eigen::VectorXd fields(const ElectronModel& model, const Eigen::VectorXd& c) {
    Eigen::VectorXd s(model.M());
    for (int j = 0; j < model.M(); ++j) s[j] = c.dot(model.B[j] * c);
    return s;
}

void check_normalized(const Eigen::VectorXd& c) {
    if (std::abs(c.norm() - 1.0) > 1e-10) throw ConfigError("coefficient vector is not normalized");
}

double energy_unchecked(const ElectronModel& model, const Eigen::VectorXd& c) {
    return c.dot(model.lambda.cwiseProduct(c)) - fields(model, c).squaredNorm();
}

}  // namespace

ElectronModel electron_model(const Basis& basis, double coupling_scale) {
    ElectronModel m;
    m.lambda = basis.lambda;
    m.B = coupling_matrices(basis);
    for (auto& b : m.B) b *= coupling_scale;
    m.grid_values = basis.values;
    m.grid_weights = basis.weights;
    return m;
}

double pekar_energy(const ElectronModel& model, const Eigen::VectorXd& c) {
    check_normalized(c);
    return energy_unchecked(model, c);
}

Eigen::MatrixXd scf_hamiltonian(const ElectronModel& model, const Eigen::VectorXd& c) {
    Eigen::MatrixXd H = model.lambda.asDiagonal();
    const Eigen::VectorXd s = fields(model, c);
    for (int j = 0; j < model.M(); ++j) H -= 2.0 * s[j] * model.B[j];
    return 0.5 * (H + H.transpose());
}

PekarSolution solve_pekar(const ElectronModel& model, const PekarOptions& opts,
                          std::optional<Eigen::VectorXd> start) {
    const int K = model.K();
    Eigen::VectorXd c = start ? start->normalized() : Eigen::VectorXd::Unit(K, 0);
    PekarSolution sol;
    double E = energy_unchecked(model, c);
    sol.energy_history.push_back(E);

    auto residual_of = [&](const Eigen::VectorXd& v, const Eigen::MatrixXd& H) {
        return (H * v - v.dot(H * v) * v).norm();
    };

    int it = 0;
    bool converged = false;
    double best_residual = std::numeric_limits<double>::infinity();
    int stalls = 0;
    for (; it < opts.max_iter; ++it) {
        const Eigen::MatrixXd H = scf_hamiltonian(model, c);
        const double res = residual_of(c, H);
        if (res <= opts.tol) converged = true;
        // Past the stopping rule keep iterating undamped until the residual
        // stops improving, so downstream identities hold at rounding level.
        if (converged) {
            if (res < 0.5 * best_residual) {
                best_residual = res;
                stalls = 0;
            } else if (++stalls >= 3) {
                break;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        Eigen::VectorXd next = es.eigenvectors().col(0);
        if (next.dot(c) < 0) next = -next;

        double beta = converged ? 1.0 : opts.damping;
        Eigen::VectorXd trial;
        double Et = 0.0;
        while (true) {
            trial = (c + beta * (next - c)).normalized();
            Et = energy_unchecked(model, trial);
            if (Et <= E + 1e-15 * std::max(1.0, std::abs(E))) break;
            beta *= 0.5;
            if (beta < 1e-8) {
                trial = next;
                Et = energy_unchecked(model, trial);
                break;
            }
        }
        c = trial;
        E = Et;
        sol.energy_history.push_back(E);
    }
    if (!converged)
        throw NumericalError("Pekar SCF did not converge within " + std::to_string(opts.max_iter) + " iterations");
    sol.iterations = it;

    const Eigen::MatrixXd H = scf_hamiltonian(model, c);
    sol.residual = residual_of(c, H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::VectorXd eps = es.eigenvalues();
    Eigen::MatrixXd U = es.eigenvectors();
    if (K > 1 && eps[1] - eps[0] < opts.gap_threshold)
        throw NumericalError("SCF Hamiltonian ground state is degenerate (gap " + std::to_string(eps[1] - eps[0]) + ")");

    // Positivity gauge on the grid, then a deterministic sign for the rest.
    const Eigen::VectorXd psi = model.grid_values * U.col(0);
    Eigen::Index imax = 0;
    psi.cwiseAbs().maxCoeff(&imax);
    if (psi[imax] < 0) U.col(0) = -U.col(0);
    for (int m = 1; m < K; ++m) {
        Eigen::Index i = 0;
        U.col(m).cwiseAbs().maxCoeff(&i);
        if (U(i, m) < 0) U.col(m) = -U.col(m);
    }

    sol.model = model;
    sol.c = U.col(0);
    sol.e_pek = energy_unchecked(model, sol.c);
    sol.phi_p = -fields(model, sol.c);
    sol.mu_pek = sol.e_pek - sol.phi_p.squaredNorm();
    sol.h0_vectors = U;
    sol.h0_values = (eps.array() - eps[0]).matrix();
    sol.h0_values[0] = 0.0;
    sol.H0 = U * sol.h0_values.asDiagonal() * U.transpose();
    sol.gap = K > 1 ? sol.h0_values[1] : std::numeric_limits<double>::infinity();
    if (sol.gap < opts.gap_threshold) throw NumericalError("H0 gap below threshold");
    return sol;
}

Eigen::MatrixXd reduced_resolvent_matrix(const PekarSolution& sol) {
    if (sol.gap < 1e-8) throw NumericalError("H0 gap below threshold; reduced resolvent unavailable");
    const int K = static_cast<int>(sol.c.size());
    Eigen::VectorXd d = Eigen::VectorXd::Zero(K);
    for (int m = 1; m < K; ++m) d[m] = -1.0 / sol.h0_values[m];
    return sol.h0_vectors * d.asDiagonal() * sol.h0_vectors.transpose();
}

Eigen::VectorXd reduced_resolvent_apply(const PekarSolution& sol, const Eigen::VectorXd& u) {
    if (sol.gap < 1e-8) throw NumericalError("H0 gap below threshold; reduced resolvent unavailable");
    Eigen::VectorXd coef = sol.h0_vectors.transpose() * u;
    coef[0] = 0.0;
    for (Eigen::Index m = 1; m < coef.size(); ++m) coef[m] /= -sol.h0_values[m];
    return sol.h0_vectors * coef;
}

double coercivity_ratio(const PekarSolution& sol, const Eigen::VectorXd& psi) {
    const Eigen::ArrayXd w = sol.model.lambda.array() + 1.0;
    const double dm = ((psi - sol.c).array().square() * w).sum();
    const double dp = ((psi + sol.c).array().square() * w).sum();
    const double d = std::min(dm, dp);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    return (pekar_energy(sol.model, psi) - sol.e_pek) / d;
}

AssumptionReport verify_assumptions(const PekarSolution& sol, int n_restarts, std::uint64_t seed,
                                    const PekarOptions& opts) {
    AssumptionReport rep;
    rep.gap = sol.gap;
    rep.restarts = n_restarts;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const int K = static_cast<int>(sol.c.size());
    auto random_unit = [&] {
        Eigen::VectorXd v(K);
        for (int i = 0; i < K; ++i) v[i] = gauss(rng);
        return Eigen::VectorXd(v.normalized());
    };

    for (int r = 0; r < n_restarts; ++r) {
        const PekarSolution other = solve_pekar(sol.model, opts, random_unit());
        const double dev = std::min((other.c - sol.c).norm(), (other.c + sol.c).norm());
        rep.max_restart_deviation = std::max(rep.max_restart_deviation, dev);
    }
    rep.unique = rep.max_restart_deviation <= 1e-8;

    double tau = std::numeric_limits<double>::infinity();
    for (double eps : {1e-3, 1e-2, 1e-1, 1.0}) {
        for (int i = 0; i < 50; ++i) {
            const Eigen::VectorXd psi = (sol.c + eps * random_unit()).normalized();
            tau = std::min(tau, coercivity_ratio(sol, psi));
            ++rep.coercivity_samples;
        }
    }
    for (int i = 0; i < 200; ++i) {
        tau = std::min(tau, coercivity_ratio(sol, random_unit()));
        ++rep.coercivity_samples;
    }
    rep.tau_hat = tau;
    return rep;
}

}  // namespace polaron
