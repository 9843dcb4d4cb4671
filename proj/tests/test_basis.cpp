#include "polaron/basis.hpp"
#include "polaron/errors.hpp"

#include <doctest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace polaron;

namespace {

const double pi = boost::math::constants::pi<double>();

DomainSpec interval(double L, int K, int M) {
    DomainSpec s;
    s.extent = L;
    s.K = K;
    s.M = M;
    return s;
}

}  // namespace

TEST_CASE("interval eigenvalues are (j pi / L)^2") {
    const Basis a = build_basis(interval(pi, 3, 3));
    CHECK(a.lambda[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.lambda[1] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(a.lambda[2] == doctest::Approx(9.0).epsilon(1e-14));
    const Basis b = build_basis(interval(1.0, 2, 2));
    CHECK(b.lambda[0] == doctest::Approx(pi * pi).epsilon(1e-14));
    CHECK(b.lambda[1] == doctest::Approx(4 * pi * pi).epsilon(1e-14));
}

TEST_CASE("ball s-wave eigenvalues against a finite-difference radial solve") {
    DomainSpec s;
    s.kind = DomainKind::ball_radial;
    s.extent = 1.0;
    s.K = 3;
    s.M = 3;
    const Basis b = build_basis(s);
    // -u'' = lambda u on (0, 1), u(0) = u(1) = 0, second-order stencil
    const int n = 1500;
    const double h = 1.0 / (n + 1);
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 2.0 / (h * h));
    Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, -1.0 / (h * h));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    for (int j = 0; j < 3; ++j) {
        CHECK(b.lambda[j] == doctest::Approx(std::pow((j + 1) * pi, 2)).epsilon(1e-13));
        CHECK(b.lambda[j] == doctest::Approx(es.eigenvalues()[j]).epsilon(1e-4));
    }
}

TEST_CASE("quadrature orthonormality") {
    for (DomainKind k : {DomainKind::interval, DomainKind::ball_radial}) {
        DomainSpec s = interval(pi, 10, 4);
        s.kind = k;
        CHECK(build_basis(s).orthonormality_error <= 1e-12);
    }
}

TEST_CASE("laplacian powers") {
    const Basis b = build_basis(interval(pi, 3, 3));
    const Eigen::VectorXd id = laplacian_power(b, 0.0);
    const Eigen::VectorXd half = laplacian_power(b, -0.5);
    const Eigen::VectorXd g = laplacian_power(b, -1.5);
    for (int j = 0; j < 3; ++j) {
        CHECK(id[j] == doctest::Approx(1.0));
        CHECK(half[j] == doctest::Approx(1.0 / (j + 1)).epsilon(1e-14));
        CHECK(g[j] == doctest::Approx(1.0 / std::pow(j + 1, 3)).epsilon(1e-13));
    }
}

TEST_CASE("triple overlaps on (0, pi)") {
    const Basis b = build_basis(interval(pi, 4, 4));
    // independent adaptive quadrature of the normalized sines
    auto w = [](int j, double x) { return std::sqrt(2.0 / pi) * std::sin(j * x); };
    const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return w(1, x) * w(1, x) * w(1, x); }, 0.0, pi, 10, 1e-15);
    CHECK(triple_overlap(b, 0, 0, 0) == doctest::Approx(8.0 / (3.0 * pi) * std::sqrt(2.0 / pi)).epsilon(1e-13));
    CHECK(triple_overlap(b, 0, 0, 0) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(std::abs(triple_overlap(b, 0, 0, 1)) <= 1e-14);
    CHECK(triple_overlap(b, 1, 0, 0) == doctest::Approx(triple_overlap(b, 0, 0, 1)).epsilon(1e-14));
    CHECK(triple_overlap(b, 2, 0, 1) == doctest::Approx(triple_overlap(b, 0, 1, 2)).epsilon(1e-14));
}

TEST_CASE("coupling matrices") {
    const Basis b = build_basis(interval(pi, 10, 4));
    const auto B = coupling_matrices(b);
    REQUIRE(B.size() == 4);
    for (const auto& m : B) CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(B[1](0, 0)) <= 1e-14);
    CHECK(B[0](0, 0) == doctest::Approx(triple_overlap(b, 0, 0, 0)).epsilon(1e-14));
    // Frobenius norms scaled back by lambda_j^{1/2} stay order one
    for (int j = 0; j < 4; ++j) {
        const double r = B[j].norm() * std::sqrt(b.lambda[j]);
        MESSAGE("|B_" << j + 1 << "|_F sqrt(lambda) = " << r);
        CHECK(r > 0.1);
        CHECK(r < 10.0);
    }
}

TEST_CASE("uv projection") {
    const Basis b = build_basis(interval(pi, 10, 4));
    CHECK(uv_projection(b, 2.5) == std::vector<int>{0, 1});
    CHECK(uv_projection(b, 0.0).empty());
    CHECK(uv_projection(b, infinite_cutoff).size() == 10);
    CHECK_THROWS_AS(uv_projection(b, -1.0), ConfigError);
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(build_basis(interval(pi, 3, 4)), ConfigError);
    CHECK_THROWS_AS(build_basis(interval(-1.0, 3, 3)), ConfigError);
    CHECK_THROWS_AS(domain_kind_from_string("torus"), ConfigError);
}
