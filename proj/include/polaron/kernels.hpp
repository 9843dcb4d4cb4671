#pragma once

#include <cstddef>
#include <string_view>

namespace polaron::kernels {

// Flat array primitives used by the Fock ladder sweeps, preconditioners and
// inner products. Every entry has a scalar reference implementation; vector
// variants must agree with it to rounding.
struct Table {
    std::string_view isa;
    // y += a * x
    void (*axpy)(std::size_t n, double a, const double* x, double* y);
    // y = d .* x (in-place allowed)
    void (*hadamard)(std::size_t n, const double* d, const double* x, double* y);
    double (*dot)(std::size_t n, const double* x, const double* y);
    // Dot product in twice the working precision, rounded once (Ogita-Rump-Oishi Dot2).
    double (*dot2)(std::size_t n, const double* x, const double* y);
};

const Table& scalar();
// nullptr when the binary or the CPU lacks the instruction set.
const Table* avx2();

// Chosen once per process: POLARON_SIMD=scalar|avx2|auto (default auto).
const Table& active();

inline void axpy(std::size_t n, double a, const double* x, double* y) { active().axpy(n, a, x, y); }
inline void hadamard(std::size_t n, const double* d, const double* x, double* y) { active().hadamard(n, d, x, y); }
inline double dot(std::size_t n, const double* x, const double* y) { return active().dot(n, x, y); }
inline double dot2(std::size_t n, const double* x, const double* y) { return active().dot2(n, x, y); }

}  // namespace polaron::kernels
