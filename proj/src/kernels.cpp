#include "rissim/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace rissim::kernels {

namespace scalar {

void cascade(const double* x, const double* y, double* out, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    const double yr = y[2 * i], yi = y[2 * i + 1];
    out[2 * i] = xr * yr - xi * yi;
    out[2 * i + 1] = xr * yi + xi * yr;
  }
}

void reflected_sum(const double* x, const double* y, const double* phasor, const double* beta, std::size_t n,
                   double* out) noexcept {
  double acc_re = 0.0, acc_im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    const double yr = y[2 * i], yi = y[2 * i + 1];
    const double cr = xr * yr - xi * yi;
    const double ci = xr * yi + xi * yr;
    const double pr = phasor[2 * i], pi = phasor[2 * i + 1];
    acc_re += beta[i] * (cr * pr - ci * pi);
    acc_im += beta[i] * (cr * pi + ci * pr);
  }
  out[0] = acc_re;
  out[1] = acc_im;
}

double coherent_magnitude_sum(const double* x, const double* y, const double* beta, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xm = x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1];
    const double ym = y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1];
    acc += beta[i] * std::sqrt(xm * ym);
  }
  return acc;
}

}  // namespace scalar

namespace {

struct Table {
  Isa isa;
  void (*cascade)(const double*, const double*, double*, std::size_t) noexcept;
  void (*reflected_sum)(const double*, const double*, const double*, const double*, std::size_t, double*) noexcept;
  double (*coherent_magnitude_sum)(const double*, const double*, const double*, std::size_t) noexcept;
};

constexpr Table kScalar{Isa::scalar, scalar::cascade, scalar::reflected_sum, scalar::coherent_magnitude_sum};
#ifdef RISSIM_HAVE_AVX2_KERNELS
constexpr Table kAvx2{Isa::avx2, avx2::cascade, avx2::reflected_sum, avx2::coherent_magnitude_sum};
#endif

bool cpu_has_avx2() noexcept {
#if defined(RISSIM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table& select_table() noexcept {
#ifdef RISSIM_HAVE_AVX2_KERNELS
  const char* forced = std::getenv("RIS_SIM_SIMD");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return kScalar;
  if (cpu_has_avx2()) return kAvx2;
#endif
  return kScalar;
}

const Table& table() noexcept {
  static const Table& selected = select_table();
  return selected;
}

const double* raw(std::span<const Complex> v) noexcept { return reinterpret_cast<const double*>(v.data()); }

}  // namespace

Isa detected_isa() noexcept { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return table().isa; }

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void cascade(std::span<const Complex> x, std::span<const Complex> y, std::span<Complex> out) noexcept {
  table().cascade(raw(x), raw(y), reinterpret_cast<double*>(out.data()), out.size());
}

Complex reflected_sum(std::span<const Complex> x, std::span<const Complex> y, std::span<const Complex> phasor,
                      std::span<const double> beta) noexcept {
  double out[2];
  table().reflected_sum(raw(x), raw(y), raw(phasor), beta.data(), beta.size(), out);
  return {out[0], out[1]};
}

double coherent_magnitude_sum(std::span<const Complex> x, std::span<const Complex> y,
                              std::span<const double> beta) noexcept {
  return table().coherent_magnitude_sum(raw(x), raw(y), beta.data(), beta.size());
}

}  // namespace rissim::kernels
