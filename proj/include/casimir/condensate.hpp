#ifndef CASIMIR_CONDENSATE_HPP
#define CASIMIR_CONDENSATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "casimir/box_model.hpp"
#include "casimir/scaling.hpp"

namespace casimir {

/// Condensation regime of an anisotropic box, set by the largest side
/// exponent: TypeI (alpha1 < 1/2, single macroscopic mode), TypeII
/// (alpha1 = 1/2, infinitely many modes), TypeIII (alpha1 > 1/2, no
/// single mode is macroscopic).
enum class CondensationType { None, TypeI, TypeII, TypeIII };

const char* to_string(CondensationType t);

/// Analytic regime from the geometry alone (alpha1 vs 1/2).
CondensationType regime_of(const BoxGeometry& geom);

/// rho_c = zeta(3/2) / lambda^3.
double critical_density(double lambda);

/// The asymptotic chemical-potential constant of each regime:
/// beta mu_bar ~ -K / V^delta with delta = 1 (I, II) or 2(1 - alpha1)
/// (III), where K solves
///   TypeI:   rho0 = 1/A
///   TypeII:  rho0 = sum_n 1/(B + pi lambda^2 n^2)
///   TypeIII: rho0 = sqrt(pi) / (lambda sqrt(C))
struct CondensateConstants {
    CondensationType regime = CondensationType::None;
    double lambda = 1.0;
    double rho0 = 0.0;      // condensate density rho - rho_c
    double constant = 0.0;  // A, B, or C
    double delta = 1.0;     // decay exponent of -beta mu_bar
};

/// Solve for A/B/C. TypeI and TypeIII invert in closed form; TypeII
/// bisects the strictly decreasing lattice Lorentz sum. delta for
/// TypeIII needs alpha1, passed explicitly.
CondensateConstants solve_constant(CondensationType regime, double lambda, double rho_minus_rhoc,
                                   double alpha1 = 0.5);

/// Shrinking momentum-space radius eta(V) = coefficient * V^{-exponent}.
struct ScaleFunction {
    double coefficient = 1.0;
    double exponent = 0.5;

    double operator()(double V) const;
    /// eta_delta(V) = 2 pi / V^{1/2 - delta}, the threshold family.
    static ScaleFunction threshold_offset(double delta);
    /// eta_Gamma(V) = 2 pi Gamma / V^{s}: counts the softest ~Gamma modes
    /// of an axis with side V^{s}.
    static ScaleFunction mode_count(double gamma, double s);
};

/// Condensate density seen through the shrinking window ||k|| <= eta(V):
/// solves mu_bar at each volume, sums mode densities inside the window,
/// and extrapolates with the log-augmented fit at q = alpha3.
ScalingSeries scaled_condensate_density(const BoxGeometry& geom, double lambda, double rho,
                                        const ScaleFunction& eta,
                                        const std::vector<double>& volumes);

/// Limiting single-mode density at dual index (n1, 0, 0):
/// TypeI: rho0 at n1 = 0, else 0; TypeII: 1/(B + pi lambda^2 n1^2);
/// TypeIII: 0 for every mode.
double limiting_occupation_profile(const CondensateConstants& constants, std::int64_t n1);

/// Limiting window density of the mode-count scale functions:
/// TypeII with eta_Gamma: sum_{|n| <= Gamma} 1/(B + pi lambda^2 n^2);
/// TypeIII with eta_Gamma': 2 arctan(Gamma' lambda sqrt(pi/C)) /
/// (lambda sqrt(pi C)); TypeI: rho0 (the zero mode is always inside).
double limiting_window_occupation(const CondensateConstants& constants, double gamma);

struct ClassificationResult {
    CondensationType regime = CondensationType::None;
    bool conclusive = false;
    std::string evidence;
    ScalingSeries zero_mode;   // rho_Lambda(0) over the volume sequence
    ScalingSeries first_mode;  // rho_Lambda(k_1) with n = (1,0,0)
};

/// Numerical regime detection from finite-size sweeps, independent of
/// the analytic alpha1 rule: the zero-mode density either decays
/// (TypeIII), saturates rho0 (TypeI), or leaves density to the other
/// soft modes (TypeII, detected through the first excited mode).
ClassificationResult classify(const BoxGeometry& geom, double lambda, double rho,
                              const std::vector<double>& volumes);

struct FragmentationReport {
    double volume = 0.0;
    double n_total = 0.0;                // N = rho V
    double n0 = 0.0;                     // particles inside the condensate window
    std::int64_t fragment_count = 0;     // window modes holding >= threshold * N
    double threshold_fraction = 1e-3;
    std::vector<double> top_occupations; // descending, window modes above threshold
};

/// Occupation census of the condensate window ||k|| <= 2 pi Gamma / V^s
/// with s = min(1/2, 1 - alpha1), the threshold rate of the regime.
FragmentationReport fragmentation_report(const BoxGeometry& geom, double lambda, double rho,
                                         double volume, double threshold_fraction = 1e-3,
                                         double gamma = 4.0);

}  // namespace casimir

#endif
