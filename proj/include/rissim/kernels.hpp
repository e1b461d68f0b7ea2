#pragma once

// Inner-loop arithmetic over RIS element vectors.
//
// Every kernel has a portable scalar reference in `kernels::scalar` and, on
// x86-64, an AVX2 variant in `kernels::avx2`. The unqualified entry points
// dispatch once at startup to the widest variant the CPU supports; setting
// RIS_SIM_SIMD=scalar in the environment pins the scalar path. Variants agree
// to rounding (summation order differs), not bitwise.

#include <complex>
#include <cstddef>
#include <span>

namespace rissim::kernels {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

/// Widest instruction set this CPU supports among the compiled variants.
Isa detected_isa() noexcept;
/// Variant the dispatching entry points call.
Isa active_isa() noexcept;
const char* isa_name(Isa isa) noexcept;

// Raw-pointer signatures shared by all variants. Complex arrays are
// interleaved (re, im) pairs, the std::complex<double> layout.
namespace scalar {
void cascade(const double* x, const double* y, double* out, std::size_t n) noexcept;
void reflected_sum(const double* x, const double* y, const double* phasor, const double* beta, std::size_t n,
                   double* out) noexcept;
double coherent_magnitude_sum(const double* x, const double* y, const double* beta, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RISSIM_HAVE_AVX2_KERNELS 1
namespace avx2 {
void cascade(const double* x, const double* y, double* out, std::size_t n) noexcept;
void reflected_sum(const double* x, const double* y, const double* phasor, const double* beta, std::size_t n,
                   double* out) noexcept;
double coherent_magnitude_sum(const double* x, const double* y, const double* beta, std::size_t n) noexcept;
}  // namespace avx2
#endif

/// out[n] = x[n] * y[n]. All spans share one length.
void cascade(std::span<const Complex> x, std::span<const Complex> y, std::span<Complex> out) noexcept;

/// sum_n beta[n] * phasor[n] * x[n] * y[n].
Complex reflected_sum(std::span<const Complex> x, std::span<const Complex> y, std::span<const Complex> phasor,
                      std::span<const double> beta) noexcept;

/// sum_n beta[n] * |x[n]| * |y[n]|, the reflected magnitude under perfect alignment.
double coherent_magnitude_sum(std::span<const Complex> x, std::span<const Complex> y,
                              std::span<const double> beta) noexcept;

}  // namespace rissim::kernels
