#include "fixtures.hpp"

#include "polaron/branch_series.hpp"
#include "polaron/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace polaron;

namespace {

Eigen::MatrixXd random_matrix(int r, int c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("compositions") {
    CHECK(compositions(4).size() == 8);
    CHECK(compositions(4, 2).size() == 7);
    const auto c = compositions(3);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == std::vector<int>{3});
    CHECK(c[1] == std::vector<int>{1, 2});
    CHECK(c[2] == std::vector<int>{2, 1});
    CHECK(c[3] == std::vector<int>{1, 1, 1});
}

TEST_CASE("perturbation operators on the Pekar sector") {
    const SeriesContext ctx = make_series_context(fixtures::small_model(), 1);
    const ProductSpace& ps = ctx.ps();
    const int vac = ps.fock->find(std::vector<int>(3, 0));
    const Eigen::MatrixXd X = Eigen::VectorXd::Unit(ps.dim(), vac);
    const Block x = embed(ps, X);
    // P V1 P = 0 on psi^P (x) vacuum and on the whole Fock space
    CHECK(std::abs(project(ps, apply_V1(ps, x))(vac, 0)) <= 1e-15);
    const Eigen::MatrixXd all = Eigen::MatrixXd::Identity(ps.dim(), ps.dim());
    CHECK(project(ps, apply_V1(ps, embed(ps, all))).cwiseAbs().maxCoeff() <= 1e-14);
    const std::vector<double> E{ctx.group.energy, 0.0};
    CHECK(apply_V(ctx, 3, x, E).norm() == 0.0);
    CHECK((apply_V(ctx, 2, x, E) + E[0] * x).norm() <= 1e-15);
    CHECK_THROWS_AS(apply_V(ctx, 4, x, E), ConfigError);
}

TEST_CASE("nested operators") {
    const SeriesContext ctx = make_series_context(fixtures::small_model(), 1);
    const SeriesResult sr = coefficients_nondegenerate(ctx, 4);
    SUBCASE("l = 0 reduces to H0 - E0") {
        const NestedPair p = nested_V(ctx, 0, sr.E);
        const int D = ctx.ps().dim();
        CHECK((p.V - (ctx.model->bog - sr.E[0] * Eigen::MatrixXd::Identity(D, D))).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("tilde V_l - V_l = E_l") {
        for (int l = 1; l <= 3; ++l) {
            const NestedPair p = nested_V(ctx, l, sr.E);
            const int D = ctx.ps().dim();
            CHECK((p.Vtilde - p.V - sr.E[l] * Eigen::MatrixXd::Identity(D, D)).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }
    SUBCASE("tilde V_1 does not see E_1") {
        std::vector<double> E{sr.E[0], 0.0}, F{sr.E[0], 0.3};
        CHECK((nested_V(ctx, 1, E).Vtilde - nested_V(ctx, 1, F).Vtilde).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("memoized and uncached chains agree") {
        const Eigen::MatrixXd X = random_matrix(ctx.ps().dim(), 2, 5);
        const auto fast = apply_nested_tilde(ctx, X, 4, sr.E);
        for (int l = 0; l <= 4; ++l) {
            const Eigen::MatrixXd slow = apply_nested_tilde_explicit(ctx, X, l, sr.E);
            CHECK((fast[l] - slow).cwiseAbs().maxCoeff() <= 1e-13);
        }
    }
    SUBCASE("parity identities") {
        for (int l = 1; l <= 3; ++l) CHECK(parity_identity_defect(ctx, l, sr.E) <= 1e-12);
    }
}

TEST_CASE("non-degenerate coefficients") {
    const SeriesContext ctx = make_series_context(fixtures::small_model(), 1);
    const SeriesResult sr = coefficients_nondegenerate(ctx, 4);
    REQUIRE(sr.E.size() == 5);
    CHECK(sr.E[0] == doctest::Approx(ctx.model->spectrum.values[0]).epsilon(1e-14));
    CHECK(sr.E[1] == 0.0);
    CHECK(sr.E[3] == 0.0);
    for (double v : sr.odd_raw) CHECK(std::abs(v) <= 1e-9 * std::max(1.0, std::abs(sr.E[2])));
    CHECK(rel(explicit_E2(ctx), sr.E[2]) <= 1e-10);
    CHECK(rel(explicit_E4(ctx, sr.E), sr.E[4]) <= 1e-9);
    MESSAGE("E = " << sr.E[0] << ", " << sr.E[2] << ", " << sr.E[4]);
    // b = 0 is just the Bogoliubov level
    CHECK(coefficients_nondegenerate(ctx, 0).E == std::vector<double>{sr.E[0]});
    // a non-degenerate level run through the degenerate path gives the same numbers
    const SeriesResult dg = coefficients_degenerate(ctx, 1, 4);
    for (int l = 0; l <= 4; ++l) CHECK(std::abs(dg.E[l] - sr.E[l]) <= 1e-12 * std::max(1.0, std::abs(sr.E[l])));
    CHECK_THROWS_AS(coefficients_nondegenerate(ctx, 11), ConfigError);
}

TEST_CASE("excited levels") {
    for (int n = 2; n <= 3; ++n) {
        const SeriesContext ctx = make_series_context(fixtures::small_model(), n);
        if (ctx.d() != 1) continue;
        const SeriesResult sr = coefficients_nondegenerate(ctx, 4);
        CHECK(rel(explicit_E2(ctx), sr.E[2]) <= 1e-10);
        CHECK(rel(explicit_E4(ctx, sr.E), sr.E[4]) <= 1e-9);
        CHECK(sr.E[1] == 0.0);
    }
}

TEST_CASE("interaction off: E2 vanishes") {
    const SeriesContext ctx = make_series_context(fixtures::off_model(), 1);
    CHECK(explicit_E2(ctx) == 0.0);
    CHECK(coefficients_nondegenerate(ctx, 2).E[2] == 0.0);
}

TEST_CASE("M_k matrices") {
    const SeriesContext ctx = make_series_context(fixtures::small_model(), 1);
    const SeriesResult sr = coefficients_nondegenerate(ctx, 4);
    for (int k = 1; k <= 3; ++k) {
        const Eigen::MatrixXd a = matrix_Mk(ctx, k, sr.E), b = matrix_Mk_explicit(ctx, k, sr.E);
        CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("degenerate cluster of the engineered crossing") {
    const auto& c = fixtures::crossing();
    REQUIRE(c.setup.found);
    const SeriesContext ctx = make_series_context(c.model, c.setup.level);
    REQUIRE(ctx.d() == 2);
    const Eigen::MatrixXd M1 = first_order_coupling(ctx);
    const SeriesResult s1 = coefficients_degenerate(ctx, 1, 3), s2 = coefficients_degenerate(ctx, 2, 3);
    const double m = std::abs(M1(0, 1));
    MESSAGE("L = " << c.setup.extent << ", (M1)_12 = " << M1(0, 1));
    CHECK(m > 1e-3);
    CHECK(std::abs(M1(0, 0)) <= 1e-12);
    CHECK(std::abs(M1(1, 1)) <= 1e-12);
    CHECK((M1 - s1.M[0]).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(s1.E[1] == doctest::Approx(-m).epsilon(1e-10));
    CHECK(s2.E[1] == doctest::Approx(m).epsilon(1e-10));
    CHECK(s1.E[0] == s2.E[0]);
    CHECK_THROWS_AS(explicit_E2(ctx), ConfigError);

    SUBCASE("coefficients do not depend on the basis of the cluster") {
        SeriesContext rot = ctx;
        const double t = 0.7;
        Eigen::Matrix2d O;
        O << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        rot.group.gamma = ctx.group.gamma * O;
        for (int s = 1; s <= 2; ++s) {
            const SeriesResult a = coefficients_degenerate(ctx, s, 3), b = coefficients_degenerate(rot, s, 3);
            for (int l = 0; l <= 3; ++l) CHECK(std::abs(a.E[l] - b.E[l]) <= 1e-10 * std::max(1.0, std::abs(a.E[l])));
        }
    }
}

TEST_CASE("eigenvalue branches of M(x)") {
    SUBCASE("diagonal input sorts order by order") {
        std::vector<Eigen::MatrixXd> M{Eigen::Vector3d(0.3, -0.1, 0.3).asDiagonal().toDenseMatrix(),
                                       Eigen::Vector3d(1.0, 5.0, -2.0).asDiagonal().toDenseMatrix()};
        const auto br = eigenvalue_series(M);
        REQUIRE(br.size() == 3);
        CHECK(br[0].coeffs == std::vector<double>{-0.1, 5.0});
        CHECK(br[1].coeffs == std::vector<double>{0.3, -2.0});
        CHECK(br[2].coeffs == std::vector<double>{0.3, 1.0});
    }
    SUBCASE("off-diagonal 2x2") {
        Eigen::Matrix2d m;
        m << 0.0, -0.4, -0.4, 0.0;
        const auto br = eigenvalue_series({m});
        CHECK(br[0].coeffs[0] == doctest::Approx(-0.4));
        CHECK(br[1].coeffs[0] == doctest::Approx(0.4));
    }
    SUBCASE("second order against Rayleigh-Schroedinger") {
        Eigen::MatrixXd A = random_matrix(4, 4, 9), B = random_matrix(4, 4, 10);
        A = (A + A.transpose()).eval();
        B = (B + B.transpose()).eval();
        const auto br = eigenvalue_series({A, B});
        for (double x : {1e-3, 1e-4}) CHECK(branch_series_deviation({A, B}, br, x) <= 50 * x * x * x);
        // M(x)/x = A + x B: first-order Rayleigh-Schroedinger in B around A's eigenvectors
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A);
        for (int s = 0; s < 4; ++s) {
            const Eigen::VectorXd u = ea.eigenvectors().col(s);
            CHECK(br[s].coeffs[0] == doctest::Approx(ea.eigenvalues()[s]).epsilon(1e-12));
            CHECK(br[s].coeffs[1] == doctest::Approx(u.dot(B * u)).epsilon(1e-10));
        }
    }
    SUBCASE("degeneracy kept through the last order") {
        Eigen::Matrix2d z = Eigen::Matrix2d::Zero(), i = Eigen::Matrix2d::Identity();
        const auto br = eigenvalue_series({z, i});
        CHECK(br[0].shared);
        CHECK(br[1].shared);
        CHECK(br[0].coeffs == br[1].coeffs);
    }
}
