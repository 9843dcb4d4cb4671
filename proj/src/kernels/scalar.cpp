#include "polaron/kernels.hpp"

#include <cmath>

namespace polaron::kernels {
namespace {

void axpy_ref(std::size_t n, double a, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void hadamard_ref(std::size_t n, const double* d, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = d[i] * x[i];
}

double dot_ref(std::size_t n, const double* x, const double* y) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double dot2_ref(std::size_t n, const double* x, const double* y) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = x[i] * y[i];
        const double pe = std::fma(x[i], y[i], -p);
        const double t = s + p;
        const double z = t - s;
        c += ((s - (t - z)) + (p - z)) + pe;
        s = t;
    }
    return s + c;
}

}  // namespace

const Table& scalar() {
    static const Table t{"scalar", axpy_ref, hadamard_ref, dot_ref, dot2_ref};
    return t;
}

}  // namespace polaron::kernels
