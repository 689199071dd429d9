#ifndef CASIMIR_BOX_MODEL_HPP
#define CASIMIR_BOX_MODEL_HPP

#include <array>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "casimir/numerics.hpp"

namespace casimir {

/// Anisotropic box with sides L_nu = V^{alpha_nu},
/// alpha_1 >= alpha_2 >= alpha_3 > 0 and alpha_1 + alpha_2 + alpha_3 = 1.
struct BoxGeometry {
    std::array<double, 3> alpha;
    double volume;

    BoxGeometry(std::array<double, 3> alpha_, double volume_);
    double side(int axis) const;
    BoxGeometry with_volume(double v) const { return BoxGeometry(alpha, v); }
};

/// Dual-lattice index; the wave vector is k_nu = 2 pi n_nu / V^{alpha_nu}.
struct ModeIndex {
    std::int64_t n1 = 0, n2 = 0, n3 = 0;
};

/// Dimensionless thermodynamic state at one volume. All lengths are in
/// units of the thermal de Broglie length lambda and densities in
/// lambda^{-3}; beta*mu is the only place temperature appears.
struct ThermoPoint {
    double lambda = 1.0;  // thermal de Broglie length
    double rho = 0.0;     // target total density
    double beta_mu = -1.0;
    double volume = 1.0;
};

struct OccupationSpectrum {
    struct Mode {
        ModeIndex n;
        double density;
    };
    std::vector<Mode> modes;
    double volume = 0.0;
    std::array<std::int64_t, 3> n_max{0, 0, 0};
    double tail_bound = 0.0;  // bound on total density outside the listed modes
};

/// beta * epsilon(k) = pi lambda^2 sum_nu (n_nu / V^{alpha_nu})^2.
double mode_energy_beta(const BoxGeometry& geom, double lambda, const ModeIndex& n);

/// Single-mode density (1/V) / (exp(beta(eps - mu)) - 1); beta_mu < 0.
double mode_density(const ThermoPoint& tp, const BoxGeometry& geom, const ModeIndex& n);

/// Total density as a direct dual-lattice sum with per-axis Gaussian tail
/// bounds. Anisotropy makes the per-axis truncation radii differ.
SeriesResult total_density_direct(const ThermoPoint& tp, const BoxGeometry& geom);

/// Total density through the cycle representation:
/// (1/V) sum_j e^{j beta mu} prod_nu theta3(0, e^{-j pi lambda^2 / V^{2 alpha_nu}}).
/// The slowly convergent j-tail is resummed per mode of the long axis.
SeriesResult total_density_cycles(const ThermoPoint& tp, const BoxGeometry& geom);

/// d rho / d(beta mu), a positive lattice sum (used by the Newton polish).
double total_density_cycles_derivative(const ThermoPoint& tp, const BoxGeometry& geom);

/// Grand-canonical pressure, beta * p.
SeriesResult pressure(const ThermoPoint& tp, const BoxGeometry& geom);

/// Phase-weighted density (1/V) sum_j e^{j beta mu} prod_nu
/// theta3(u_nu, e^{-j pi lambda^2 / V^{2 alpha_nu}}) — the j-series
/// engine behind both the total density (u = 0) and the two-point
/// correlation (u_nu = pi X_nu / L_nu).
SeriesResult phase_weighted_density(const ThermoPoint& tp, const BoxGeometry& geom,
                                    const std::array<double, 3>& u);

/// Partial cycle sum (1/V) sum_{j=j_lo}^{j_hi} e^{j beta mu} prod_nu theta3.
/// Terms beyond the direct split are resummed per mode through the
/// two-ended geometric sum (g^{j_lo} - g^{j_hi+1})/(1 - g).
SeriesResult cycle_window_sum(const ThermoPoint& tp, const BoxGeometry& geom, std::int64_t j_lo,
                              std::int64_t j_hi);

/// Solve rho = rho_Lambda(beta, mu) for the unique beta_mu < 0.
/// Bracketed doubling + bisection + Newton polish; throws
/// SolveError with diagnostics if the bracket cannot be established.
ThermoPoint solve_chemical_potential(const BoxGeometry& geom, double lambda, double rho);

/// All modes with ||k|| <= k_radius plus a bound on everything outside.
OccupationSpectrum occupation_spectrum(const ThermoPoint& tp, const BoxGeometry& geom,
                                       double k_radius);

struct SolveError : std::exception {
    explicit SolveError(std::string msg) : message(std::move(msg)) {}
    const char* what() const noexcept override { return message.c_str(); }
    std::string message;
};

}  // namespace casimir

#endif
