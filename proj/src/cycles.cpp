#include "casimir/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "casimir/condensate.hpp"
#include "casimir/numerics.hpp"

namespace casimir {

namespace {
// "open" upper window end: exp(j * beta_mu) underflows long before this
constexpr std::int64_t kOpenEnd = std::int64_t{1} << 62;
}  // namespace

double cycle_density(const ThermoPoint& tp, const BoxGeometry& geom, std::int64_t j) {
    if (j < 1) throw std::domain_error("cycle_density: require j >= 1, got " + std::to_string(j));
    if (!(tp.beta_mu < 0.0)) throw std::domain_error("cycle_density: require beta_mu < 0");
    double term = std::exp(static_cast<double>(j) * tp.beta_mu);
    for (int nu = 0; nu < 3; ++nu) {
        const double L = geom.side(nu);
        term *= theta3_exp(0.0, static_cast<double>(j) * tp.lambda * tp.lambda / (L * L));
    }
    return term / geom.volume;
}

CycleSpectrum cycle_spectrum(const ThermoPoint& tp, const BoxGeometry& geom, std::int64_t j_max) {
    if (j_max < 1) throw std::domain_error("cycle_spectrum: require j_max >= 1");
    CycleSpectrum s;
    s.volume = geom.volume;
    s.beta_mu = tp.beta_mu;
    s.densities.reserve(j_max);
    for (std::int64_t j = 1; j <= j_max; ++j) s.densities.push_back(cycle_density(tp, geom, j));
    const SeriesResult rest = cycle_window_sum(tp, geom, j_max + 1, kOpenEnd);
    s.tail = rest.value;
    s.tail_bound = rest.tail_bound;
    return s;
}

CycleWindow::CycleWindow(double delta_, double x_, double y_) : delta(delta_), x(x_), y(y_) {
    if (!(x > 0.0 && y > x)) throw std::invalid_argument("CycleWindow: require 0 < x < y");
    if (!(delta > 0.0)) throw std::invalid_argument("CycleWindow: require delta > 0");
}

ScalingSeries short_cycle_density(const BoxGeometry& geom, double lambda, double rho,
                                  const std::vector<double>& volumes, std::int64_t m_cut) {
    if (m_cut < 1) throw std::domain_error("short_cycle_density: require M >= 1");
    std::vector<double> values(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        const BoxGeometry g = geom.with_volume(volumes[i]);
        const ThermoPoint tp = solve_chemical_potential(g, lambda, rho);
        values[i] = cycle_window_sum(tp, g, 1, m_cut).value;
    });
    return fit_series(volumes, std::move(values));
}

double short_cycle_limit(double lambda, double rho) {
    if (!(rho > 0.0 && lambda > 0.0))
        throw std::domain_error("short_cycle_limit: require rho > 0 and lambda > 0");
    const double l3 = lambda * lambda * lambda;
    const double target = rho * l3;
    if (target >= riemann_zeta(1.5)) return riemann_zeta(1.5) / l3;  // saturated: rho_c
    // z_inf solves g_{3/2}(z) = rho lambda^3; g_{3/2} is increasing
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (polylog(1.5, mid).value < target)
            lo = mid;
        else
            hi = mid;
    }
    return polylog(1.5, 0.5 * (lo + hi)).value / l3;
}

ScalingSeries long_cycle_density(const BoxGeometry& geom, double lambda, double rho,
                                 const std::vector<double>& volumes) {
    if (!(rho > 0.0)) throw std::domain_error("long_cycle_density: require rho > 0");
    const std::int64_t m_cut = 64;
    const double l3 = lambda * lambda * lambda;

    // z_inf^j partial sum of the short part beyond the cutoff
    const double rho_short = short_cycle_limit(lambda, rho);
    double z_inf = 1.0;
    if (rho * l3 < riemann_zeta(1.5)) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (polylog(1.5, mid).value < rho * l3)
                lo = mid;
            else
                hi = mid;
        }
        z_inf = 0.5 * (lo + hi);
    }
    double partial = 0.0, zj = 1.0;
    for (std::int64_t j = 1; j <= m_cut; ++j) {
        zj *= z_inf;
        partial += zj / (std::sqrt(static_cast<double>(j)) * static_cast<double>(j));
    }
    const double analytic_rest = rho_short - partial / l3;  // sum over j > m_cut at V = inf

    std::vector<double> values(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        const BoxGeometry g = geom.with_volume(volumes[i]);
        const ThermoPoint tp = solve_chemical_potential(g, lambda, rho);
        values[i] = rho - cycle_window_sum(tp, g, 1, m_cut).value - analytic_rest;
    });
    return fit_series(volumes, std::move(values));
}

namespace {

std::pair<std::int64_t, std::int64_t> window_bounds(const CycleWindow& w, double V) {
    // outward rounding: conservative inclusion of the scaled endpoints
    const double scale = std::pow(V, w.delta);
    const std::int64_t lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                          std::floor(w.x * scale)));
    const std::int64_t hi =
        std::max(lo, static_cast<std::int64_t>(std::ceil(w.y * scale)));
    return {lo, hi};
}

std::vector<double> windowed_values(const BoxGeometry& geom, const std::vector<ThermoPoint>& tps,
                                    const CycleWindow& window,
                                    const std::vector<double>& volumes) {
    std::vector<double> values(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        const BoxGeometry g = geom.with_volume(volumes[i]);
        const auto [lo, hi] = window_bounds(window, volumes[i]);
        values[i] = cycle_window_sum(tps[i], g, lo, hi).value;
    });
    return values;
}

std::vector<ThermoPoint> solve_all(const BoxGeometry& geom, double lambda, double rho,
                                   const std::vector<double>& volumes) {
    std::vector<ThermoPoint> tps(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        tps[i] = solve_chemical_potential(geom.with_volume(volumes[i]), lambda, rho);
    });
    return tps;
}

}  // namespace

ScalingSeries windowed_cycle_density(const BoxGeometry& geom, double lambda, double rho,
                                     const CycleWindow& window,
                                     const std::vector<double>& volumes) {
    const std::vector<ThermoPoint> tps = solve_all(geom, lambda, rho, volumes);
    std::vector<double> values = windowed_values(geom, tps, window, volumes);
    return fit_series_log(volumes, std::move(values), geom.alpha[2], 2);
}

HierarchyResult hierarchy_detect(const BoxGeometry& geom, double lambda, double rho,
                                 const std::vector<double>& volumes) {
    const double rho0 = rho - critical_density(lambda);
    if (!(rho0 > 0.0)) throw std::domain_error("hierarchy_detect: require rho > rho_c");
    if (volumes.size() < 7)
        throw std::domain_error("hierarchy_detect: need at least 7 volumes for the slope fit");

    HierarchyResult res;
    res.median_scales.resize(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        const BoxGeometry g = geom.with_volume(volumes[i]);
        const ThermoPoint tp = solve_chemical_potential(g, lambda, rho);
        const auto tail_mass = [&](std::int64_t j) {
            return cycle_window_sum(tp, g, j, kOpenEnd).value;
        };
        const double half = 0.5 * rho0;
        std::int64_t lo = 1, hi = 2;
        while (tail_mass(hi) > half) {
            lo = hi;
            hi *= 2;
        }
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            (tail_mass(mid) > half ? lo : hi) = mid;
        }
        // log-interpolate the crossing for a fractional scale
        const double t_lo = tail_mass(lo), t_hi = tail_mass(hi);
        res.median_scales[i] = static_cast<double>(lo) + (std::log(t_lo) - std::log(half)) /
                                                             (std::log(t_lo) - std::log(t_hi));
    });

    std::vector<double> mid_volumes, slopes;
    for (std::size_t i = 0; i + 1 < volumes.size(); ++i) {
        mid_volumes.push_back(std::sqrt(volumes[i] * volumes[i + 1]));
        slopes.push_back(std::log2(res.median_scales[i + 1] / res.median_scales[i]) /
                         std::log2(volumes[i + 1] / volumes[i]));
    }
    res.slopes = slopes;

    const ScalingSeries fit = fit_series_log(mid_volumes, std::move(slopes), geom.alpha[2], 2);
    res.delta_star = fit.extrapolated_limit;
    res.macroscopic = std::abs(res.delta_star - 1.0) <= 0.05;
    res.conclusive = fit.converged;
    std::ostringstream ev;
    ev << "median cycle scale grows like V^" << res.delta_star << " (slope fit residual "
       << fit.residual << ", " << volumes.size() << " volumes)";
    res.evidence = ev.str();
    return res;
}

}  // namespace casimir
