#include "casimir/condensate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "casimir/numerics.hpp"

namespace casimir {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* to_string(CondensationType t) {
    switch (t) {
        case CondensationType::None: return "none";
        case CondensationType::TypeI: return "type-I";
        case CondensationType::TypeII: return "type-II";
        case CondensationType::TypeIII: return "type-III";
    }
    return "unknown";
}

CondensationType regime_of(const BoxGeometry& geom) {
    if (geom.alpha[0] < 0.5) return CondensationType::TypeI;
    if (geom.alpha[0] > 0.5) return CondensationType::TypeIII;
    return CondensationType::TypeII;
}

double critical_density(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("critical_density: require lambda > 0");
    return riemann_zeta(1.5) / (lambda * lambda * lambda);
}

CondensateConstants solve_constant(CondensationType regime, double lambda, double rho_minus_rhoc,
                                   double alpha1) {
    if (!(rho_minus_rhoc > 0.0))
        throw std::domain_error("solve_constant: require rho - rho_c > 0, got " +
                                std::to_string(rho_minus_rhoc));
    if (!(lambda > 0.0)) throw std::domain_error("solve_constant: require lambda > 0");

    CondensateConstants k;
    k.regime = regime;
    k.lambda = lambda;
    k.rho0 = rho_minus_rhoc;
    switch (regime) {
        case CondensationType::TypeI:
            k.constant = 1.0 / rho_minus_rhoc;
            k.delta = 1.0;
            break;
        case CondensationType::TypeII: {
            // lattice_lorentz_sum(B) is strictly decreasing in B from
            // +inf to 0; bracket by doubling, then bisect.
            double lo = 1.0;
            while (lattice_lorentz_sum(lo, lambda) < rho_minus_rhoc) lo /= 2.0;
            double hi = lo;
            while (lattice_lorentz_sum(hi, lambda) > rho_minus_rhoc) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (lattice_lorentz_sum(mid, lambda) > rho_minus_rhoc)
                    lo = mid;
                else
                    hi = mid;
            }
            k.constant = 0.5 * (lo + hi);
            k.delta = 1.0;
            break;
        }
        case CondensationType::TypeIII: {
            if (!(alpha1 > 0.5 && alpha1 < 1.0))
                throw std::domain_error("solve_constant: TypeIII needs alpha1 in (1/2, 1)");
            const double s = lambda * rho_minus_rhoc;
            k.constant = kPi / (s * s);
            k.delta = 2.0 * (1.0 - alpha1);
            break;
        }
        case CondensationType::None:
            throw std::domain_error("solve_constant: no constants without a condensate");
    }
    return k;
}

double ScaleFunction::operator()(double V) const {
    if (!(V > 0.0)) throw std::domain_error("ScaleFunction: require V > 0");
    return coefficient * std::pow(V, -exponent);
}

ScaleFunction ScaleFunction::threshold_offset(double delta) {
    return ScaleFunction{2.0 * kPi, 0.5 - delta};
}

ScaleFunction ScaleFunction::mode_count(double gamma, double s) {
    if (!(gamma > 0.0)) throw std::domain_error("ScaleFunction: require Gamma > 0");
    return ScaleFunction{2.0 * kPi * gamma, s};
}

ScalingSeries scaled_condensate_density(const BoxGeometry& geom, double lambda, double rho,
                                        const ScaleFunction& eta,
                                        const std::vector<double>& volumes) {
    std::vector<double> values(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        const BoxGeometry g = geom.with_volume(volumes[i]);
        const ThermoPoint tp = solve_chemical_potential(g, lambda, rho);
        const OccupationSpectrum spec = occupation_spectrum(tp, g, eta(volumes[i]));
        double sum = 0.0;
        for (const auto& m : spec.modes) sum += m.density;
        values[i] = sum;
    });
    return fit_series_log(volumes, std::move(values), geom.alpha[2], 3);
}

double limiting_occupation_profile(const CondensateConstants& constants, std::int64_t n1) {
    switch (constants.regime) {
        case CondensationType::TypeI: return n1 == 0 ? constants.rho0 : 0.0;
        case CondensationType::TypeII: {
            const double l2 = constants.lambda * constants.lambda;
            return 1.0 / (constants.constant + kPi * l2 * static_cast<double>(n1) * n1);
        }
        case CondensationType::TypeIII: return 0.0;
        case CondensationType::None: return 0.0;
    }
    return 0.0;
}

double limiting_window_occupation(const CondensateConstants& constants, double gamma) {
    if (!(gamma >= 0.0))
        throw std::domain_error("limiting_window_occupation: require Gamma >= 0");
    switch (constants.regime) {
        case CondensationType::TypeI: return constants.rho0;
        case CondensationType::TypeII: {
            double sum = limiting_occupation_profile(constants, 0);
            for (std::int64_t n = 1; n <= static_cast<std::int64_t>(gamma); ++n)
                sum += 2.0 * limiting_occupation_profile(constants, n);
            return sum;
        }
        case CondensationType::TypeIII: {
            // closed form of the erf integral over the mode window
            const double C = constants.constant;
            const double l = constants.lambda;
            return 2.0 / (l * std::sqrt(kPi * C)) * std::atan(gamma * l * std::sqrt(kPi / C));
        }
        case CondensationType::None: return 0.0;
    }
    return 0.0;
}

ClassificationResult classify(const BoxGeometry& geom, double lambda, double rho,
                              const std::vector<double>& volumes) {
    ClassificationResult res;
    const double rho0 = rho - critical_density(lambda);
    if (rho0 <= 0.0) {
        res.regime = CondensationType::None;
        res.conclusive = true;
        res.evidence = rho0 == 0.0 ? "rho = rho_c exactly: boundary, no condensate"
                                   : "rho below critical density: no condensate";
        return res;
    }

    std::vector<double> z0(volumes.size()), z1(volumes.size());
    parallel_for(volumes.size(), [&](std::size_t i) {
        const BoxGeometry g = geom.with_volume(volumes[i]);
        const ThermoPoint tp = solve_chemical_potential(g, lambda, rho);
        z0[i] = mode_density(tp, g, ModeIndex{0, 0, 0});
        z1[i] = mode_density(tp, g, ModeIndex{1, 0, 0});
    });

    const double q = geom.alpha[2];
    res.zero_mode = fit_series_log(volumes, z0, q, 3);
    res.first_mode = fit_series_log(volumes, z1, q, 3);

    // A decaying zero mode rules out macroscopic occupation of any state.
    const ScalingSeries decay = fit_decay_exponent(volumes, z0, q);
    const double p0 = decay.extrapolated_limit;
    const double zero_limit = res.zero_mode.extrapolated_limit;
    const double first_limit = res.first_mode.extrapolated_limit;

    std::ostringstream ev;
    ev << "zero-mode limit " << zero_limit << ", decay exponent " << p0 << ", first-mode limit "
       << first_limit << ", rho0 " << rho0;
    res.evidence = ev.str();

    if (p0 > 0.04) {
        res.regime = CondensationType::TypeIII;
        res.conclusive = decay.converged && zero_limit < 0.5 * rho0;
        return res;
    }
    if (first_limit > 0.05 * rho0) {
        res.regime = CondensationType::TypeII;
        res.conclusive = res.zero_mode.converged && res.first_mode.converged &&
                         zero_limit > 0.0 && zero_limit < rho0;
        return res;
    }
    res.regime = CondensationType::TypeI;
    res.conclusive = res.zero_mode.converged && std::abs(zero_limit - rho0) < 0.05 * rho0;
    return res;
}

FragmentationReport fragmentation_report(const BoxGeometry& geom, double lambda, double rho,
                                         double volume, double threshold_fraction, double gamma) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw std::domain_error("fragmentation_report: threshold fraction must be in (0,1)");
    const BoxGeometry g = geom.with_volume(volume);
    const ThermoPoint tp = solve_chemical_potential(g, lambda, rho);

    FragmentationReport rep;
    rep.volume = volume;
    rep.n_total = rho * volume;
    rep.threshold_fraction = threshold_fraction;

    const double s = std::min(0.5, 1.0 - geom.alpha[0]);
    const double radius = ScaleFunction::mode_count(gamma, s)(volume);
    const OccupationSpectrum spec = occupation_spectrum(tp, g, radius);

    const double cut = threshold_fraction * rep.n_total;
    for (const auto& m : spec.modes) {
        const double n_i = m.density * volume;
        rep.n0 += n_i;
        if (n_i >= cut) rep.top_occupations.push_back(n_i);
    }
    std::sort(rep.top_occupations.begin(), rep.top_occupations.end(), std::greater<>());
    rep.fragment_count = static_cast<std::int64_t>(rep.top_occupations.size());
    return rep;
}

}  // namespace casimir
