#ifndef CASIMIR_KERNELS_HPP
#define CASIMIR_KERNELS_HPP

#include <cstddef>
#include <string>

namespace casimir::kernels {

// Inner loops of the direct-lattice sums. The lattice weights are
// separable, w = w1[n1] * w2[n2] * w3[n3], so the hot loop reduces to a
// 1-d pass over the innermost axis with the outer product folded into a
// scalar c. Scalar reference implementations and AVX2 variants are both
// compiled; the dispatch picks one at load time from CPUID.

/// sum_i c*w[i] / (1 - c*w[i])   (Bose occupancy over one lattice line)
/// Requires 0 <= c*w[i] < 1 for all i.
double occupancy_sum_scalar(double c, const double* w, std::size_t n);

/// sum_i c*w[i]/(1 - c*w[i]) * (pr*cr[i] - pi_*ci[i])
/// Cosine-weighted occupancy line: (pr, pi_) is the accumulated phase of
/// the two outer axes, (cr[i], ci[i]) = (cos, sin) of the innermost axis
/// phase, so the weight is Re of the phase product.
double occupancy_cos_sum_scalar(double c, double pr, double pi_, const double* w,
                                const double* cr, const double* ci, std::size_t n);

/// sum_i -log(1 - c*w[i])   (pressure over one lattice line)
double log_sum_scalar(double c, const double* w, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double occupancy_sum_avx2(double c, const double* w, std::size_t n);
double occupancy_cos_sum_avx2(double c, double pr, double pi_, const double* w,
                              const double* cr, const double* ci, std::size_t n);
double log_sum_avx2(double c, const double* w, std::size_t n);
#endif

// Runtime-dispatched entry points used by the library.
double occupancy_sum(double c, const double* w, std::size_t n);
double occupancy_cos_sum(double c, double pr, double pi_, const double* w,
                         const double* cr, const double* ci, std::size_t n);
double log_sum(double c, const double* w, std::size_t n);

/// Name of the active instruction set ("avx2" or "scalar").
std::string active_isa();
bool avx2_available();

}  // namespace casimir::kernels

#endif
