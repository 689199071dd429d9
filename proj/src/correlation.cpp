#include "casimir/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "casimir/kernels.hpp"
#include "casimir/numerics.hpp"

namespace casimir {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEnergyCutoff = 42.0;

std::array<double, 3> phase_angles(const BoxGeometry& geom, const std::array<double, 3>& X) {
    std::array<double, 3> u;
    for (int nu = 0; nu < 3; ++nu) u[nu] = kPi * X[nu] / geom.side(nu);
    return u;
}

// sum_{|n| > N} e^{-a n^2} <= 2 e^{-a (N+1)^2} / (1 - e^{-a (2N+3)})
double gaussian_axis_tail(double a, std::int64_t N) {
    const double head = 2.0 * std::exp(-a * static_cast<double>(N + 1) * static_cast<double>(N + 1));
    const double r = std::exp(-a * static_cast<double>(2 * N + 3));
    return head / (1.0 - r);
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

SeriesResult correlation_theta(const ThermoPoint& tp, const BoxGeometry& geom,
                               const std::array<double, 3>& X) {
    return phase_weighted_density(tp, geom, phase_angles(geom, X));
}

SeriesResult correlation_direct(const ThermoPoint& tp, const BoxGeometry& geom,
                                const std::array<double, 3>& X) {
    if (!(tp.beta_mu < 0.0)) throw std::domain_error("correlation_direct: require beta_mu < 0");
    const double V = geom.volume;
    const double z = std::exp(tp.beta_mu);
    const std::array<double, 3> u = phase_angles(geom, X);

    std::array<double, 3> a;
    for (int nu = 0; nu < 3; ++nu) {
        const double L = geom.side(nu);
        a[nu] = kPi * tp.lambda * tp.lambda / (L * L);
    }

    // per-axis tables: weights, exact energies, and mode phases 2 n u
    std::array<std::int64_t, 3> N;
    std::array<std::vector<double>, 3> w, x2, cr, ci;
    std::array<double, 3> axis_sum{}, axis_tail{};
    for (int nu = 0; nu < 3; ++nu) {
        N[nu] = static_cast<std::int64_t>(std::ceil(std::sqrt(kEnergyCutoff / a[nu])));
        const std::size_t len = static_cast<std::size_t>(2 * N[nu] + 1);
        w[nu].reserve(len);
        x2[nu].reserve(len);
        cr[nu].reserve(len);
        ci[nu].reserve(len);
        for (std::int64_t n = -N[nu]; n <= N[nu]; ++n) {
            const double an2 = a[nu] * static_cast<double>(n) * static_cast<double>(n);
            w[nu].push_back(std::exp(-an2));
            x2[nu].push_back(an2);
            cr[nu].push_back(std::cos(2.0 * static_cast<double>(n) * u[nu]));
            ci[nu].push_back(std::sin(2.0 * static_cast<double>(n) * u[nu]));
            axis_sum[nu] += w[nu].back();
        }
        axis_tail[nu] = gaussian_axis_tail(a[nu], N[nu]);
    }

    // innermost loop over the longest lattice line
    int inner = 0;
    if (w[1].size() > w[inner].size()) inner = 1;
    if (w[2].size() > w[inner].size()) inner = 2;
    const int o1 = (inner + 1) % 3, o2 = (inner + 2) % 3;

    const double kSoftLine = 0.01;  // near-divergent occupancies need expm1

    double sum = 0.0;
    for (std::size_t i = 0; i < w[o1].size(); ++i) {
        const double zwi = z * w[o1][i];
        for (std::size_t j = 0; j < w[o2].size(); ++j) {
            // accumulated phase of the two outer axes
            const double pr = cr[o1][i] * cr[o2][j] - ci[o1][i] * ci[o2][j];
            const double pi_ = cr[o1][i] * ci[o2][j] + ci[o1][i] * cr[o2][j];
            const double e12 = tp.beta_mu - x2[o1][i] - x2[o2][j];
            if (e12 <= -kSoftLine) {
                sum += kernels::occupancy_cos_sum(zwi * w[o2][j], pr, pi_, w[inner].data(),
                                                  cr[inner].data(), ci[inner].data(),
                                                  w[inner].size());
            } else {
                for (std::size_t k = 0; k < w[inner].size(); ++k) {
                    const double e = e12 - x2[inner][k];
                    const double phase = pr * cr[inner][k] - pi_ * ci[inner][k];
                    sum += phase * std::exp(e) / (-std::expm1(e));
                }
            }
        }
    }

    // |cos| <= 1, so the same product bound as the plain density applies
    const double excluded = (axis_sum[0] + axis_tail[0]) * (axis_sum[1] + axis_tail[1]) *
                                (axis_sum[2] + axis_tail[2]) -
                            axis_sum[0] * axis_sum[1] * axis_sum[2];
    const double tail = z * excluded / (1.0 - z * std::exp(-kEnergyCutoff));

    SeriesResult r;
    r.value = sum / V;
    r.tail_bound = tail / V + 1e-15 * std::abs(r.value);
    r.terms_used = static_cast<std::int64_t>(w[0].size()) * w[1].size() * w[2].size();
    return r;
}

std::array<double, 3> SeparationPath::separation(double V) const {
    std::array<double, 3> X;
    for (int nu = 0; nu < 3; ++nu) X[nu] = x[nu] == 0.0 ? 0.0 : x[nu] * std::pow(V, s[nu]);
    return X;
}

void SeparationPath::validate(const BoxGeometry& geom, const std::vector<double>& volumes) const {
    for (int nu = 0; nu < 3; ++nu)
        if (!(x[nu] >= 0.0))
            throw std::domain_error("SeparationPath: coefficients must be >= 0");
    for (double V : volumes) {
        const std::array<double, 3> X = separation(V);
        const BoxGeometry g = geom.with_volume(V);
        for (int nu = 0; nu < 3; ++nu)
            if (X[nu] > 0.5 * g.side(nu))
                throw std::domain_error(
                    "SeparationPath: axis " + std::to_string(nu + 1) + " separation " +
                    std::to_string(X[nu]) + " exceeds the half-period at V = " +
                    std::to_string(V) + "; paths are rejected, not clamped");
    }
}

ScalingSeries odlro_profile(const BoxGeometry& geom, double lambda, double rho,
                            const SeparationPath& path, const std::vector<double>& volumes) {
    path.validate(geom, volumes);
    std::vector<double> values(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        const BoxGeometry g = geom.with_volume(volumes[i]);
        const ThermoPoint tp = solve_chemical_potential(g, lambda, rho);
        values[i] = correlation_theta(tp, g, path.separation(volumes[i])).value;
    });
    return fit_series_log(volumes, std::move(values), geom.alpha[2], 3);
}

double limiting_profile(const CondensateConstants& constants, double y) {
    if (!(y >= 0.0)) throw std::domain_error("limiting_profile: require y >= 0");
    const double l = constants.lambda;
    switch (constants.regime) {
        case CondensationType::TypeI: return constants.rho0;
        case CondensationType::TypeII: {
            // reduce by the period of cos(2 pi n y); the closed form below
            // holds for y in [0, 1]
            double yr = y - std::floor(y);
            const double c = std::sqrt(constants.constant / kPi) / l;
            return std::cosh(kPi * c * (1.0 - 2.0 * yr)) / (l * l * c * std::sinh(kPi * c));
        }
        case CondensationType::TypeIII:
            return constants.rho0 * std::exp(-2.0 * y * std::sqrt(kPi * constants.constant) / l);
        case CondensationType::None: return 0.0;
    }
    return 0.0;
}

CoherenceResult coherence_length(const BoxGeometry& geom, double lambda, double rho,
                                 const std::vector<double>& volumes) {
    const double rho0 = rho - critical_density(lambda);
    if (!(rho0 > 0.0)) throw std::domain_error("coherence_length: require rho > rho_c");

    const double v_top = *std::max_element(volumes.begin(), volumes.end());
    const BoxGeometry g_top = geom.with_volume(v_top);
    const ThermoPoint tp_top = solve_chemical_potential(g_top, lambda, rho);
    const double threshold = 0.05 * rho0;
    const double x_coeff = 0.3;

    CoherenceResult res;
    std::ostringstream ev;
    for (int axis = 0; axis < 3; ++axis) {
        AxisCoherence& ax = res.axes[axis];
        ax.axis = axis + 1;

        ax.s_grid.clear();
        for (int i = 1; i <= 10; ++i) ax.s_grid.push_back(0.1 * i * geom.alpha[axis]);
        if (axis == 0 && geom.alpha[0] > 0.5) ax.s_grid.push_back(1.0 - geom.alpha[0]);
        std::sort(ax.s_grid.begin(), ax.s_grid.end());
        ax.s_grid.erase(std::unique(ax.s_grid.begin(), ax.s_grid.end(),
                                    [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                        ax.s_grid.end());

        ax.sigma_top.resize(ax.s_grid.size());
        parallel_for(ax.s_grid.size(), [&](std::size_t gi) {
            std::array<double, 3> X{0.0, 0.0, 0.0};
            X[axis] = x_coeff * std::pow(v_top, ax.s_grid[gi]);
            ax.sigma_top[gi] = correlation_theta(tp_top, g_top, X).value;
        });

        ax.s_star = 0.0;
        ax.conclusive = true;
        for (std::size_t gi = 0; gi < ax.s_grid.size(); ++gi) {
            if (ax.sigma_top[gi] >= threshold) ax.s_star = std::max(ax.s_star, ax.s_grid[gi]);
            const double margin = ax.sigma_top[gi] / threshold;
            if (margin > 1.0 / 1.5 && margin < 1.5) ax.conclusive = false;
        }
        ax.macroscopic = std::abs(ax.s_star - geom.alpha[axis]) < 1e-12;
        ev << "axis " << ax.axis << ": " << (ax.macroscopic ? "macroscopic" : "microscopic")
           << " (s* = " << ax.s_star << "); ";
    }
    res.evidence = ev.str();
    return res;
}

}  // namespace casimir
