#include "polaron/quadratic_model.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>
#include <sstream>

using namespace polaron;

namespace {

PekarSolution default_solution() {
    static const PekarSolution sol = solve_pekar(electron_model(build_basis(DomainSpec{})));
    return sol;
}

// inf spec(Lambda + 2 sum phi_j B_j) + |phi|^2, whose Hessian at phi^P is 2h
double reduced_energy(const ElectronModel& m, const Eigen::VectorXd& phi) {
    Eigen::MatrixXd H = m.lambda.asDiagonal();
    for (int j = 0; j < m.M(); ++j) H += 2.0 * phi[j] * m.B[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0] + phi.squaredNorm();
}

}  // namespace

TEST_CASE("interaction off gives h = I") {
    DomainSpec s;
    s.K = 6;
    s.M = 3;
    const HessianModel hm = hessian_matrix(solve_pekar(electron_model(build_basis(s), 0.0)));
    CHECK((hm.h - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(hm.tau[k] == 1.0);
    CHECK(bogoliubov_kernel(hm).hs_norm == 0.0);
    CHECK(ground_energy(hm) == 0.0);
}

TEST_CASE("G is negative semidefinite and h symmetric") {
    const HessianModel hm = hessian_matrix(default_solution());
    CHECK((hm.h - hm.h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd u(hm.G.rows());
        for (int i = 0; i < u.size(); ++i) u[i] = g(rng);
        CHECK(u.dot(hm.G * u) <= 1e-15);
    }
    for (int k = 0; k < hm.tau.size(); ++k) {
        CHECK(hm.tau[k] > 0.0);
        CHECK(hm.tau[k] <= 1.0 + 1e-10);
    }
}

TEST_CASE("default tau values and the finite-difference Hessian of the reduced energy") {
    const PekarSolution sol = default_solution();
    const HessianModel hm = hessian_matrix(sol);
    CHECK(hm.tau[0] < hm.tau[1]);
    CHECK(hm.tau[1] < 1.0);
    MESSAGE("tau = " << hm.tau.transpose());
    const int M = sol.model.M();
    const double step = 1e-4;
    Eigen::MatrixXd fd(M, M);
    for (int j = 0; j < M; ++j)
        for (int k = 0; k < M; ++k) {
            auto f = [&](double a, double b) {
                Eigen::VectorXd phi = sol.phi_p;
                phi[j] += a;
                phi[k] += b;
                return reduced_energy(sol.model, phi);
            };
            fd(j, k) = (f(step, step) - f(step, -step) - f(-step, step) + f(-step, -step)) / (4 * step * step);
        }
    CHECK((0.5 * fd - hm.h).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("ground energy") {
    CHECK(ground_energy(hessian_from_h(Eigen::MatrixXd::Identity(4, 4))) == 0.0);
    CHECK(ground_energy(hessian_from_h(Eigen::MatrixXd::Constant(1, 1, 0.25))) == doctest::Approx(-0.25));
}

TEST_CASE("ladder spectrum") {
    const HessianModel hm = hessian_matrix(default_solution());
    const auto lad = ladder_spectrum(hm, 6);
    REQUIRE(lad.size() >= 6);
    CHECK(lad[0].index == 1);
    CHECK(lad[0].energy == doctest::Approx(ground_energy(hm)));
    CHECK(lad[0].degeneracy == 1);
    CHECK(std::all_of(lad[0].occupation.begin(), lad[0].occupation.end(), [](int v) { return v == 0; }));
    CHECK(lad[1].energy == doctest::Approx(ground_energy(hm) + std::sqrt(hm.tau[0])).epsilon(1e-14));
    CHECK(lad[1].occupation[0] == 1);
    for (std::size_t i = 1; i < lad.size(); ++i) CHECK(lad[i].energy >= lad[i - 1].energy);

    SUBCASE("equal tau gives a doubly degenerate second level") {
        Eigen::MatrixXd h = Eigen::Vector3d(0.5, 0.5, 0.8).asDiagonal();
        const auto l = ladder_spectrum(hessian_from_h(h), 4);
        CHECK(l[1].degeneracy == 2);
        CHECK(l[2].degeneracy == 2);
        CHECK(l[1].energy == doctest::Approx(l[2].energy));
    }
    SUBCASE("continuum filter") {
        for (const auto& l : ladder_spectrum(hm, 40, true)) CHECK(l.energy < lad[0].energy + 1.0);
    }
}

TEST_CASE("Bogoliubov kernel") {
    CHECK(bogoliubov_kernel(hessian_from_h(Eigen::MatrixXd::Identity(3, 3))).kernel.norm() == 0.0);
    const BogoliubovKernel one = bogoliubov_kernel(hessian_from_h(Eigen::MatrixXd::Constant(1, 1, 1.0 / 16)));
    CHECK(one.kernel(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(one.cosh_part(0, 0) == doctest::Approx(std::sqrt(1.0 + 0.5625)).epsilon(1e-14));

    const HessianModel hm = hessian_matrix(default_solution());
    const BogoliubovKernel bk = bogoliubov_kernel(hm);
    CHECK(std::isfinite(bk.hs_norm));
    MESSAGE("|B|_HS = " << bk.hs_norm << ", domination constant " << bk.domination_constant);
    const int M = hm.tau.size();
    const Eigen::MatrixXd gap =
        bk.domination_constant * (Eigen::MatrixXd::Identity(M, M) - hm.h) - bk.kernel * bk.kernel;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gap, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-14);
    // cosh^2 - sinh^2 = 1
    CHECK((bk.cosh_part * bk.cosh_part - bk.kernel * bk.kernel - Eigen::MatrixXd::Identity(M, M)).cwiseAbs().maxCoeff() <=
          1e-13);
}

TEST_CASE("csv writers") {
    const HessianModel hm = hessian_from_h(Eigen::Vector2d(0.25, 0.5).asDiagonal().toDenseMatrix());
    std::ostringstream os;
    write_tau_csv(os, hm);
    CHECK(os.str() == "k,tau\n1,0.25\n2,0.5\n");
    std::ostringstream ls;
    write_ladder_csv(ls, ladder_spectrum(hm, 2));
    CHECK(ls.str().rfind("n,energy,occupation,degeneracy\n1,", 0) == 0);
}
