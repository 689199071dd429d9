// AVX2/FMA variants of the lattice line kernels. Compiled with -mavx2
// -mfma; only reachable through the runtime dispatch in kernels.cpp.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "casimir/kernels.hpp"

namespace casimir::kernels {

namespace {
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}
}  // namespace

double occupancy_sum_avx2(double c, const double* w, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d cw = _mm256_mul_pd(vc, _mm256_loadu_pd(w + i));
        acc = _mm256_add_pd(acc, _mm256_div_pd(cw, _mm256_sub_pd(one, cw)));
    }
    double acc_s = hsum(acc);
    for (; i < n; ++i) {
        const double cw = c * w[i];
        acc_s += cw / (1.0 - cw);
    }
    return acc_s;
}

double occupancy_cos_sum_avx2(double c, double pr, double pi_, const double* w,
                              const double* cr, const double* ci, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vpr = _mm256_set1_pd(pr);
    const __m256d vpi = _mm256_set1_pd(pi_);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d cw = _mm256_mul_pd(vc, _mm256_loadu_pd(w + i));
        const __m256d occ = _mm256_div_pd(cw, _mm256_sub_pd(one, cw));
        // Re(phase12 * phase3) = pr*cr - pi*ci
        const __m256d re = _mm256_fmsub_pd(vpr, _mm256_loadu_pd(cr + i),
                                           _mm256_mul_pd(vpi, _mm256_loadu_pd(ci + i)));
        acc = _mm256_fmadd_pd(occ, re, acc);
    }
    double acc_s = hsum(acc);
    for (; i < n; ++i) {
        const double cw = c * w[i];
        acc_s += cw / (1.0 - cw) * (pr * cr[i] - pi_ * ci[i]);
    }
    return acc_s;
}

double log_sum_avx2(double c, const double* w, std::size_t n) {
    // vectorize the multiply, keep the transcendental scalar
    alignas(32) double cw[4];
    const __m256d vc = _mm256_set1_pd(c);
    double acc = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_store_pd(cw, _mm256_mul_pd(vc, _mm256_loadu_pd(w + i)));
        acc -= std::log1p(-cw[0]) + std::log1p(-cw[1]) + std::log1p(-cw[2]) + std::log1p(-cw[3]);
    }
    for (; i < n; ++i) acc -= std::log1p(-c * w[i]);
    return acc;
}

}  // namespace casimir::kernels
