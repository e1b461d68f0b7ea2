// Compiled with -mavx2 -mfma. Only plain C types cross this file's boundary so
// no inline library code is emitted here with AVX2 encodings.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace rissim::kernels::avx2 {

namespace {

// Two interleaved complex products per register: [ar0 ai0 ar1 ai1] * [br0 bi0 br1 bi1].
inline __m256d complex_mul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(a, b_re), _mm256_mul_pd(a_swap, b_im));
}

// [b0 b0 b1 b1] from two consecutive doubles.
inline __m256d pair_broadcast(const double* beta) {
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(beta)), 0x50);
}

}  // namespace

void cascade(const double* x, const double* y, double* out, std::size_t n) noexcept {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(x + 2 * i);
    const __m256d b = _mm256_loadu_pd(y + 2 * i);
    _mm256_storeu_pd(out + 2 * i, complex_mul(a, b));
  }
  for (; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    const double yr = y[2 * i], yi = y[2 * i + 1];
    out[2 * i] = xr * yr - xi * yi;
    out[2 * i + 1] = xr * yi + xi * yr;
  }
}

void reflected_sum(const double* x, const double* y, const double* phasor, const double* beta, std::size_t n,
                   double* out) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d c = complex_mul(_mm256_loadu_pd(x + 2 * i), _mm256_loadu_pd(y + 2 * i));
    const __m256d rotated = complex_mul(c, _mm256_loadu_pd(phasor + 2 * i));
    acc = _mm256_fmadd_pd(pair_broadcast(beta + i), rotated, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double acc_re = lanes[0] + lanes[2];
  double acc_im = lanes[1] + lanes[3];
  for (; i < n; ++i) {
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
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(x + 2 * i);
    const __m256d b = _mm256_loadu_pd(y + 2 * i);
    // [|x0|^2 |y0|^2 |x1|^2 |y1|^2]
    const __m256d norms = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    // each lane pair holds |x|^2 |y|^2 twice
    const __m256d product = _mm256_mul_pd(norms, _mm256_permute_pd(norms, 0x5));
    acc = _mm256_fmadd_pd(pair_broadcast(beta + i), _mm256_sqrt_pd(product), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = lanes[0] + lanes[2];
  for (; i < n; ++i) {
    const double xm = x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1];
    const double ym = y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1];
    total += beta[i] * std::sqrt(xm * ym);
  }
  return total;
}

}  // namespace rissim::kernels::avx2
