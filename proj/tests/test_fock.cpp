#include "polaron/fock.hpp"
#include "polaron/errors.hpp"

#include <doctest.h>

#include <random>

using namespace polaron;

namespace {

const HessianModel& default_hessian() {
    static const HessianModel hm = hessian_matrix(solve_pekar(electron_model(build_basis(DomainSpec{}))));
    return hm;
}

Eigen::MatrixXd dense(const SparseMatrix& s) { return Eigen::MatrixXd(s); }

}  // namespace

TEST_CASE("Fock dimensions") {
    CHECK(build_fock(1, 3).dim() == 4);
    CHECK(build_fock(2, 2).dim() == 6);
    CHECK(build_fock(3, 4).dim() == 35);
    CHECK_THROWS_AS(build_fock(4, 10, 100), ConfigError);
    const FockSpace f = build_fock(3, 4);
    for (int s = 0; s < f.dim(); ++s) CHECK(f.find(f.states[s]) == s);
    CHECK(f.find({5, 0, 0}) < 0);
}

TEST_CASE("canonical commutation relations on the interior") {
    const FockSpace f = build_fock(3, 5);
    const auto inner = states_up_to(f, f.n_max - 1);
    const int D = f.dim();
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
            const auto [aj, ajd] = ladder(f, j);
            const auto [ak, akd] = ladder(f, k);
            const Eigen::MatrixXd c = dense(aj) * dense(akd) - dense(akd) * dense(aj);
            const Eigen::MatrixXd want = (j == k ? 1.0 : 0.0) * Eigen::MatrixXd::Identity(D, D);
            CHECK(max_abs_on(c - want, inner, inner) <= 1e-14);
            const Eigen::MatrixXd cc = dense(aj) * dense(ak) - dense(ak) * dense(aj);
            CHECK(cc.cwiseAbs().maxCoeff() <= 1e-14);
        }
    const int vac = f.find({0, 0, 0});
    for (int j = 0; j < 3; ++j) CHECK(dense(ladder(f, j).first).col(vac).norm() == 0.0);
}

TEST_CASE("number operator") {
    const FockSpace f = build_fock(3, 4);
    const FockOperator N = number_operator(f);
    CHECK(N.hermitian);
    const Eigen::VectorXd d = number_diagonal(f);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(f.dim(), f.dim());
    for (int j = 0; j < 3; ++j) {
        const auto [a, ad] = ladder(f, j);
        sum += dense(ad) * dense(a);
    }
    CHECK((sum - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((dense(N.matrix) - sum).cwiseAbs().maxCoeff() <= 1e-14);
    for (int s = 0; s < f.dim(); ++s) CHECK(d[s] == f.total[s]);
}

TEST_CASE("field operator") {
    const FockSpace f = build_fock(3, 4);
    const int vac = f.find({0, 0, 0});
    CHECK(dense(field_operator(f, Eigen::VectorXd::Zero(3)).matrix).norm() == 0.0);
    const Eigen::Vector3d v(0.3, -1.2, 0.7);
    const FockOperator phi = field_operator(f, v);
    CHECK(phi.hermitian);
    CHECK(phi.bandwidth == 1);
    const Eigen::MatrixXd P = dense(phi.matrix);
    CHECK(P(vac, vac) == 0.0);
    CHECK((P * P)(vac, vac) == doctest::Approx(v.squaredNorm()).epsilon(1e-14));
    CHECK((dense(creation(f, v)) + dense(annihilation(f, v)) - P).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Bogoliubov Hamiltonian") {
    SUBCASE("G = 0 is the number operator") {
        const FockSpace f = build_fock(2, 4);
        const Eigen::MatrixXd H = bogoliubov_hamiltonian(f, Eigen::MatrixXd::Zero(2, 2));
        CHECK((H - Eigen::MatrixXd(number_diagonal(f).asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
        CHECK(diagonalize(H).values[0] == 0.0);
    }
    SUBCASE("default model against the ladder formula") {
        const HessianModel& hm = default_hessian();
        const FockSpace f = build_fock(4, 10);
        const FockSpectrum sp = diagonalize(bogoliubov_hamiltonian(f, hm.G));
        CHECK(sp.values[0] == doctest::Approx(ground_energy(hm)).epsilon(1e-10));
        CHECK(sp.values[1] - sp.values[0] == doctest::Approx(std::sqrt(hm.tau[0])).epsilon(1e-10));
    }
}

TEST_CASE("eigenpair groups") {
    const HessianModel& hm = default_hessian();
    const FockSpace f = build_fock(4, 10);
    const FockSpectrum sp = diagonalize(bogoliubov_hamiltonian(f, hm.G));
    const EigenGroup g = eigenpair_group(sp, 1);
    CHECK(g.d == 1);
    const Eigen::MatrixXd P = g.projector();
    CHECK((P * P - P).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    // quasi-free ground state: <N> = |B|_HS^2
    const double n = g.gamma.col(0).cwiseAbs2().dot(number_diagonal(f));
    const double hs = bogoliubov_kernel(hm).hs_norm;
    CHECK(n == doctest::Approx(hs * hs).epsilon(1e-8));
    CHECK_THROWS_AS(eigenpair_group(sp, 0), ConfigError);

    SUBCASE("equal tau: the second level is a d = 2 cluster") {
        const HessianModel eq = hessian_from_h(Eigen::Vector3d(0.5, 0.5, 0.8).asDiagonal().toDenseMatrix());
        const FockSpace f3 = build_fock(3, 8);
        const FockSpectrum s3 = diagonalize(bogoliubov_hamiltonian(f3, eq.G));
        const EigenGroup g2 = eigenpair_group(s3, 2);
        CHECK(g2.d == 2);
        CHECK(g2.first == 1);
        CHECK(eigenpair_group(s3, 3).first == 1);
    }
}

TEST_CASE("reduced resolvent on the Fock space") {
    const HessianModel& hm = default_hessian();
    const FockSpace f = build_fock(4, 6);
    const Eigen::MatrixXd H = bogoliubov_hamiltonian(f, hm.G);
    const FockSpectrum sp = diagonalize(H);
    for (int n : {1, 3}) {
        const EigenGroup g = eigenpair_group(sp, n);
        const FockResolvent R = fock_reduced_resolvent(sp, g);
        CHECK(R.apply(g.gamma).norm() <= 1e-13);
        std::mt19937_64 rng(n);
        std::normal_distribution<double> gauss;
        Eigen::MatrixXd u(f.dim(), 2);
        for (int i = 0; i < u.size(); ++i) u.data()[i] = gauss(rng);
        const Eigen::MatrixXd Qu = u - g.projector() * u;
        const Eigen::MatrixXd HE = H - g.energy * Eigen::MatrixXd::Identity(f.dim(), f.dim());
        CHECK((HE * R.apply(u) + Qu).cwiseAbs().maxCoeff() <= 1e-11);
        const Eigen::MatrixXd Ru = R.apply(u);
        CHECK(std::abs(u.col(0).dot(Ru.col(1)) - Ru.col(0).dot(u.col(1))) <= 1e-12);
    }
}

TEST_CASE("Bogoliubov unitary") {
    SUBCASE("zero kernel gives the identity") {
        const FockSpace f = build_fock(3, 4);
        const BogoliubovUnitary U = bogoliubov_unitary(f, hessian_from_h(Eigen::MatrixXd::Identity(3, 3)));
        CHECK((U.U - Eigen::MatrixXd::Identity(f.dim(), f.dim())).cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("default model") {
        const HessianModel& hm = default_hessian();
        const FockSpace f = build_fock(4, 10);
        const BogoliubovUnitary U = bogoliubov_unitary(f, hm);
        CHECK(U.leakage <= 1e-6);
        const FockSpectrum sp = diagonalize(bogoliubov_hamiltonian(f, hm.G));
        const int vac = f.find({0, 0, 0, 0});
        // U diagonalizes: U^T takes the vacuum to the ground state
        const double overlap = std::abs(U.U.row(vac).dot(sp.vectors.col(0)));
        MESSAGE("overlap with the ground state " << overlap << ", leakage " << U.leakage);
        CHECK(overlap >= 1.0 - 1e-8);
    }
    SUBCASE("passive rotation by the identity") {
        const FockSpace f = build_fock(3, 3);
        CHECK((passive_rotation(f, Eigen::MatrixXd::Identity(3, 3)) - Eigen::MatrixXd::Identity(f.dim(), f.dim()))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-15);
    }
}
