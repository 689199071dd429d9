#ifndef CASIMIR_SCALING_HPP
#define CASIMIR_SCALING_HPP

#include <functional>
#include <vector>

namespace casimir {

/// An observable sampled over an increasing volume sequence, with the
/// fitted thermodynamic-limit value. Fit model: f(V) ~ L + c * V^{-p},
/// p > 0. The o(.) corrections of the asymptotic statements are absorbed
/// into the residual and gated by `converged` instead of being modelled.
struct ScalingSeries {
    std::vector<double> volumes;
    std::vector<double> values;
    double extrapolated_limit = 0.0;
    double fit_exponent = 0.0;     // p
    double fit_coefficient = 0.0;  // c
    double residual = 0.0;         // rms of fit residuals
    bool converged = false;
};

struct SweepOptions {
    // converged requires residual < max(abs_tol, rel_tol * scale) and the
    // last three samples monotone within 3x residual (liminf proxy).
    double abs_tol = 1e-9;
    double rel_tol = 1e-3;
};

/// Evaluate `observable` at each volume (in parallel, capped by the
/// CASIMIR_THREADS environment variable) and fit L + c * V^{-p}.
/// The observable must be a pure function of V.
ScalingSeries run_sweep(const std::function<double(double)>& observable,
                        const std::vector<double>& volumes, SweepOptions opts = {});

/// Fit an already-sampled series (no evaluation).
ScalingSeries fit_series(std::vector<double> volumes, std::vector<double> values,
                         SweepOptions opts = {});

/// Asymptotic fit with a known leading correction exponent q > 0:
///   f(V) ~ L + sum_{m=1..order} V^{-m q} * P_m(ln V),  deg P_m = m.
/// Finite boxes relax toward their thermodynamic limit through
/// lattice-vs-continuum corrections that carry ln V companions; a pure
/// power model misreads them as a smaller exponent and extrapolates
/// badly. q is the smallest side exponent of the geometry (alpha_3) for
/// the chemical-potential observables. The linear system is solved by
/// Householder QR on column-scaled regressors.
ScalingSeries fit_series_log(std::vector<double> volumes, std::vector<double> values, double q,
                             int order = 3, SweepOptions opts = {});

/// Limiting decay exponent p of a positive sequence s(V) ~ c V^{-p} (with
/// slowly varying corrections): local two-point slopes
/// -log2(s_{k+1}/s_k) are extrapolated at midpoint volumes with
/// fit_series_log (order 2). Returns the extrapolated p.
ScalingSeries fit_decay_exponent(const std::vector<double>& volumes,
                                 const std::vector<double>& values, double q,
                                 SweepOptions opts = {});

struct ExponentTest {
    bool pass = false;
    double margin = 0.0;  // |fit_exponent - hypothesis|
};

/// Pass iff |fit_exponent - hypothesis_p| <= tol. Throws on an
/// unconverged series.
ExponentTest exponent_test(const ScalingSeries& series, double hypothesis_p, double tol);

/// Geometric volume sequence V0 * 2^k, k = 0..count-1.
std::vector<double> volume_sequence(double v0, int count);

/// Thread cap for sweeps (CASIMIR_THREADS, default hardware concurrency).
int max_threads();

/// Parallel map helper shared by the sweep engines: applies fn to each
/// index 0..n-1, results stored by index (deterministic under scheduling).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace casimir

#endif
