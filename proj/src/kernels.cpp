#include "casimir/kernels.hpp"

#include <cmath>

namespace casimir::kernels {

double occupancy_sum_scalar(double c, const double* w, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cw = c * w[i];
        acc += cw / (1.0 - cw);
    }
    return acc;
}

double occupancy_cos_sum_scalar(double c, double pr, double pi_, const double* w,
                                const double* cr, const double* ci, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cw = c * w[i];
        acc += cw / (1.0 - cw) * (pr * cr[i] - pi_ * ci[i]);
    }
    return acc;
}

double log_sum_scalar(double c, const double* w, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cw = c * w[i];
        acc -= std::log1p(-cw);
    }
    return acc;
}

bool avx2_available() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
using OccFn = double (*)(double, const double*, std::size_t);
using CosFn = double (*)(double, double, double, const double*, const double*, const double*,
                         std::size_t);

OccFn pick_occ() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &occupancy_sum_avx2;
#endif
    return &occupancy_sum_scalar;
}
CosFn pick_cos() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &occupancy_cos_sum_avx2;
#endif
    return &occupancy_cos_sum_scalar;
}
OccFn pick_log() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &log_sum_avx2;
#endif
    return &log_sum_scalar;
}

const OccFn g_occ = pick_occ();
const CosFn g_cos = pick_cos();
const OccFn g_log = pick_log();
}  // namespace

double occupancy_sum(double c, const double* w, std::size_t n) { return g_occ(c, w, n); }

double occupancy_cos_sum(double c, double pr, double pi_, const double* w, const double* cr,
                         const double* ci, std::size_t n) {
    return g_cos(c, pr, pi_, w, cr, ci, n);
}

double log_sum(double c, const double* w, std::size_t n) { return g_log(c, w, n); }

std::string active_isa() { return avx2_available() ? "avx2" : "scalar"; }

}  // namespace casimir::kernels
