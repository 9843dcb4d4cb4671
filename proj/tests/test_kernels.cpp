#include "polaron/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace polaron;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng) * std::pow(10.0, 3 * u(rng));
    return v;
}

constexpr double eps = std::numeric_limits<double>::epsilon();

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree") {
    const kernels::Table* v = kernels::avx2();
    if (!v) {
        MESSAGE("AVX2 not available here; only the scalar table is exercised");
        return;
    }
    const kernels::Table& s = kernels::scalar();
    CHECK(v->isa == "avx2");
    std::mt19937_64 rng(42);
    for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 101, 1000, 4099}) {
        CAPTURE(n);
        const auto x = random_vector(n, rng), y = random_vector(n, rng), d = random_vector(n, rng);
        double mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);

        auto ys = y, yv = y;
        s.axpy(n, 0.37, x.data(), ys.data());
        v->axpy(n, 0.37, x.data(), yv.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 2 * eps * (std::abs(0.37 * x[i]) + std::abs(y[i])));

        std::vector<double> hs(n), hv(n);
        s.hadamard(n, d.data(), x.data(), hs.data());
        v->hadamard(n, d.data(), x.data(), hv.data());
        CHECK(hs == hv);

        CHECK(std::abs(s.dot(n, x.data(), y.data()) - v->dot(n, x.data(), y.data())) <= 2 * n * eps * mag + 1e-300);
        // the compensated dot is faithful in both tables
        CHECK(std::abs(s.dot2(n, x.data(), y.data()) - v->dot2(n, x.data(), y.data())) <=
              4 * eps * std::abs(s.dot2(n, x.data(), y.data())) + 4 * n * eps * eps * mag + 1e-300);
    }
}

TEST_CASE("compensated dot recovers a cancelling sum") {
    // 1e16 + 1 - 1e16 loses the 1 in plain summation
    const std::vector<double> x{1e16, 1.0, -1e16}, y{1.0, 1.0, 1.0};
    CHECK(kernels::scalar().dot2(3, x.data(), y.data()) == 1.0);
    if (const kernels::Table* v = kernels::avx2()) CHECK(v->dot2(3, x.data(), y.data()) == 1.0);
}

TEST_CASE("in-place hadamard and dispatch") {
    std::vector<double> d{1, 2, 3, 4, 5}, x{1, 1, 1, 1, 1};
    kernels::hadamard(5, d.data(), x.data(), x.data());
    CHECK(x == d);
    const auto& a = kernels::active();
    CHECK((a.isa == "scalar" || a.isa == "avx2"));
    MESSAGE("active kernels: " << a.isa);
}
