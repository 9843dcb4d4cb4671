#include "polaron/fit.hpp"

#include <doctest.h>

#include <cmath>

using namespace polaron;

namespace {

SpectralSweep synthetic(const std::vector<double>& E, double tail, int tail_power) {
    // alpha^2 E~ = sum_l alpha^{-l} E_l + tail alpha^{-tail_power}, base = E_0
    SpectralSweep sw;
    sw.alphas = log_grid(20.0, 200.0, 12);
    sw.levels = 1;
    const int n = static_cast<int>(sw.alphas.size());
    sw.eigenvalues.resize(n, 1);
    sw.base.resize(n, 1);
    sw.shift.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        const double a = sw.alphas[i];
        double s = tail * std::pow(a, -tail_power);
        for (std::size_t l = 1; l < E.size(); ++l) s += E[l] * std::pow(a, -static_cast<double>(l));
        sw.base(i, 0) = E[0];
        sw.shift(i, 0) = s;
        sw.eigenvalues(i, 0) = (E[0] + s) / (a * a);
    }
    return sw;
}

}  // namespace

TEST_CASE("log-log fit of an exact power law") {
    std::vector<double> x, y;
    for (double a = 10; a <= 300; a *= 1.5) {
        x.push_back(a);
        y.push_back(-3.5 * std::pow(a, -2.5));
    }
    const LogLogFit f = fit_loglog(x, y, 20.0, 200.0, 0.0);
    CHECK(f.slope == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.5).epsilon(1e-10));
    CHECK(f.r2 == doctest::Approx(1.0));
    for (double xi : f.x) {
        CHECK(xi >= 20.0);
        CHECK(xi <= 200.0);
    }
}

TEST_CASE("floor drops points and flags too few") {
    const std::vector<double> x{1, 2, 4, 8, 16};
    const std::vector<double> y{1e-10, 1e-12, 1e-14, 1e-16, 1e-18};
    const LogLogFit f = fit_loglog(x, y, 1, 16, 1e-13);
    CHECK(f.x.size() == 2);
    CHECK(f.below_floor);
    CHECK(std::isnan(f.slope));
    const LogLogFit g = fit_loglog(x, y, 1, 16, 1e-17);
    CHECK_FALSE(g.below_floor);
    CHECK(g.x.size() == 4);
}

TEST_CASE("coefficient order fit on synthetic levels") {
    const std::vector<double> E{1.5, 0.0, -2.0, 0.0, 7.0};
    const SpectralSweep sw = synthetic(E, 30.0, 5);
    const auto r = remainder_series(sw, 1, E, 2);
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(r[i] == doctest::Approx(7.0 * std::pow(sw.alphas[i], -4) + 30.0 * std::pow(sw.alphas[i], -5)));
    SUBCASE("b = 0 sees alpha^{-2}") {
        const OrderFit o = coefficient_order_fit(sw, 1, E, 0);
        CHECK(o.expected == -1.0);
        CHECK(o.fit.slope == doctest::Approx(-2.0).epsilon(0.01));
        CHECK(o.pass);
        CHECK(o.stability < 0.05);
    }
    SUBCASE("b = 2 sees alpha^{-4}") {
        const OrderFit o = coefficient_order_fit(sw, 1, E, 2);
        CHECK(o.expected == -3.0);
        CHECK(o.pass);
    }
    SUBCASE("b = 4 is below the floor and passes") {
        const OrderFit o = coefficient_order_fit(sw, 1, E, 4, 60.0, 200.0, 0.3, 1e-8);
        CHECK(o.fit.below_floor);
        CHECK(o.pass);
    }
    SUBCASE("a wrong E_2 is caught") {
        std::vector<double> bad = E;
        bad[2] *= 1.0 + 1e-2;
        CHECK_FALSE(coefficient_order_fit(sw, 1, bad, 2).pass);
    }
    SUBCASE("a spurious odd term is caught") {
        std::vector<double> bad = E;
        bad[1] = 1e-3;
        CHECK_FALSE(coefficient_order_fit(sw, 1, bad, 2).pass);
    }
}

TEST_CASE("residual order fit") {
    std::vector<double> a = log_grid(20.0, 200.0, 10), r;
    for (double x : a) r.push_back(0.4 * std::pow(x, -3));
    const OrderFit o = residual_order_fit(a, r, 0);
    CHECK(o.expected == -3.0);
    CHECK(o.pass);
    CHECK_FALSE(residual_order_fit(a, r, 2).pass);
}

TEST_CASE("growth check") {
    CHECK(growth_check({1.0, 0.0, 0.0}).c_hat == 0.0);
    // |E_l| = 2^l sqrt(l!) gives C = 2 exactly
    std::vector<double> E{0.3};
    double f = 1.0;
    for (int l = 1; l <= 6; ++l) {
        f *= l;
        E.push_back(std::pow(2.0, l) * std::sqrt(f));
    }
    const GrowthReport g = growth_check(E);
    CHECK(g.c_hat == doctest::Approx(2.0));
    REQUIRE(g.per_order.size() == 6);
    for (double v : g.per_order) CHECK(v == doctest::Approx(2.0));
}
