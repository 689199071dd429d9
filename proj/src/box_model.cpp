#include "casimir/box_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "casimir/kernels.hpp"

namespace casimir {

namespace {
constexpr double kPi = 3.14159265358979323846;
// per-axis energy cutoff for the direct lattice sums: e^{-42} ~ 6e-19
constexpr double kEnergyCutoff = 42.0;
// relative accuracy target of the j-series evaluators
constexpr double kSeriesRelTol = 1e-13;

void require_negative_mu(double beta_mu, const char* who) {
    if (!(beta_mu < 0.0))
        throw std::domain_error(std::string(who) + ": require beta_mu < 0, got " +
                                std::to_string(beta_mu));
}

// Per-axis inverse Gaussian widths a_nu = pi lambda^2 / V^{2 alpha_nu}.
std::array<double, 3> axis_widths(const BoxGeometry& geom, double lambda) {
    std::array<double, 3> a;
    for (int nu = 0; nu < 3; ++nu) {
        const double L = geom.side(nu);
        a[nu] = kPi * lambda * lambda / (L * L);
    }
    return a;
}

// sum_{|n| > N} e^{-a n^2} <= 2 e^{-a (N+1)^2} / (1 - e^{-a (2N+3)})
double gaussian_axis_tail(double a, std::int64_t N) {
    const double head = 2.0 * std::exp(-a * static_cast<double>(N + 1) * static_cast<double>(N + 1));
    const double r = std::exp(-a * static_cast<double>(2 * N + 3));
    return head / (1.0 - r);
}

// Direct/tail split of the j-series. The direct part costs O(J) theta
// evaluations; the tail, resummed mode by mode, touches only the
// ~ V / J^{3/2} modes softer than (J+1) beta eps <= cutoff. J ~ (3V)^{2/5}
// balances the two, so one evaluation costs O(V^{2/5}) overall.
std::int64_t series_split(double V) {
    const double j = std::pow(3.0 * V, 0.4);
    return std::max<std::int64_t>(4, static_cast<std::int64_t>(std::ceil(j)));
}

}  // namespace

BoxGeometry::BoxGeometry(std::array<double, 3> alpha_, double volume_)
    : alpha(alpha_), volume(volume_) {
    if (!(alpha[0] >= alpha[1] && alpha[1] >= alpha[2] && alpha[2] > 0.0))
        throw std::invalid_argument("BoxGeometry: require alpha1 >= alpha2 >= alpha3 > 0");
    const double s = alpha[0] + alpha[1] + alpha[2];
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("BoxGeometry: alpha exponents must sum to 1, got " +
                                    std::to_string(s));
    if (!(volume > 0.0)) throw std::invalid_argument("BoxGeometry: require V > 0");
}

double BoxGeometry::side(int axis) const { return std::pow(volume, alpha[axis]); }

double mode_energy_beta(const BoxGeometry& geom, double lambda, const ModeIndex& n) {
    const std::array<double, 3> a = axis_widths(geom, lambda);
    return a[0] * static_cast<double>(n.n1) * static_cast<double>(n.n1) +
           a[1] * static_cast<double>(n.n2) * static_cast<double>(n.n2) +
           a[2] * static_cast<double>(n.n3) * static_cast<double>(n.n3);
}

double mode_density(const ThermoPoint& tp, const BoxGeometry& geom, const ModeIndex& n) {
    require_negative_mu(tp.beta_mu, "mode_density");
    const double x = mode_energy_beta(geom, tp.lambda, n) - tp.beta_mu;
    return 1.0 / (geom.volume * std::expm1(x));
}

SeriesResult total_density_direct(const ThermoPoint& tp, const BoxGeometry& geom) {
    require_negative_mu(tp.beta_mu, "total_density_direct");
    const double V = geom.volume;
    const double z = std::exp(tp.beta_mu);
    const std::array<double, 3> a = axis_widths(geom, tp.lambda);

    std::array<std::int64_t, 3> N;
    std::array<std::vector<double>, 3> w, x2;  // weights e^{-a n^2} and energies a n^2
    std::array<double, 3> axis_sum{}, axis_tail{};
    for (int nu = 0; nu < 3; ++nu) {
        N[nu] = static_cast<std::int64_t>(std::ceil(std::sqrt(kEnergyCutoff / a[nu])));
        w[nu].reserve(2 * N[nu] + 1);
        x2[nu].reserve(2 * N[nu] + 1);
        for (std::int64_t n = -N[nu]; n <= N[nu]; ++n) {
            const double an2 = a[nu] * static_cast<double>(n) * static_cast<double>(n);
            w[nu].push_back(std::exp(-an2));
            x2[nu].push_back(an2);
        }
        axis_sum[nu] = 0.0;
        for (double x : w[nu]) axis_sum[nu] += x;
        axis_tail[nu] = gaussian_axis_tail(a[nu], N[nu]);
    }

    // innermost loop over the longest axis line
    int inner = 0;
    if (w[1].size() > w[inner].size()) inner = 1;
    if (w[2].size() > w[inner].size()) inner = 2;
    const int o1 = (inner + 1) % 3, o2 = (inner + 2) % 3;

    // Lines whose softest mode has beta(eps - mu) below this go through the
    // exact expm1 path: forming 1 - z*w by subtraction would cancel
    // catastrophically when the occupancy is near-divergent.
    const double kSoftLine = 0.01;

    double sum = 0.0;
    for (std::size_t i = 0; i < w[o1].size(); ++i) {
        const double zwi = z * w[o1][i];
        for (std::size_t j = 0; j < w[o2].size(); ++j) {
            const double e12 = tp.beta_mu - x2[o1][i] - x2[o2][j];
            if (e12 <= -kSoftLine) {
                sum += kernels::occupancy_sum(zwi * w[o2][j], w[inner].data(), w[inner].size());
            } else {
                for (double ek : x2[inner]) {
                    const double e = e12 - ek;
                    sum += std::exp(e) / (-std::expm1(e));
                }
            }
        }
    }

    // modes outside the truncation box: occupancy <= z w / (1 - z e^{-T})
    const double excluded = (axis_sum[0] + axis_tail[0]) * (axis_sum[1] + axis_tail[1]) *
                                (axis_sum[2] + axis_tail[2]) -
                            axis_sum[0] * axis_sum[1] * axis_sum[2];
    const double tail = z * excluded / (1.0 - z * std::exp(-kEnergyCutoff));

    SeriesResult r;
    r.value = sum / V;
    r.tail_bound = tail / V + 1e-15 * r.value;
    r.terms_used = static_cast<std::int64_t>(w[0].size()) * w[1].size() * w[2].size();
    return r;
}

namespace {

// Shared j-series engine:
//   sum_{j>=1} w_j z^j prod_nu theta3(u_nu, e^{-j a_nu})
// with w_j = 1 (density), j (derivative in beta_mu), 1/j (pressure).
// Terms j <= J are summed directly through the theta products. The tail
// j > J is swapped into a dual-lattice sum over modes, exactly:
//   sum_{j>J} w_j g_n^j summed over modes n with g_n = e^{beta_mu - beta eps_n}
// carrying the phase weight prod_nu cos(2 n_nu u_nu). Only modes with
// (J+1) beta eps_n <= cutoff contribute above the kSeriesRelTol floor.
SeriesResult cycle_series(const ThermoPoint& tp, const BoxGeometry& geom, int weight_mode,
                          const std::array<double, 3>& u) {
    require_negative_mu(tp.beta_mu, "cycle_series");
    const double V = geom.volume;
    const std::array<double, 3> a = axis_widths(geom, tp.lambda);
    const std::int64_t J = series_split(V);
    const double Jp1 = static_cast<double>(J + 1);

    double direct = 0.0;
    for (std::int64_t j = 1; j <= J; ++j) {
        const double zj = std::exp(static_cast<double>(j) * tp.beta_mu);
        double term = zj;
        for (int nu = 0; nu < 3; ++nu)
            term *= theta3_exp(u[nu], static_cast<double>(j) * a[nu] / kPi);
        if (weight_mode == 1) term *= static_cast<double>(j);
        if (weight_mode == 2) term /= static_cast<double>(j);
        direct += term;
        if (zj < 1e-280) break;  // underflow guard; remaining terms are nil
    }

    // per-axis tables over the soft-mode window |n| <= N_nu:
    //   x2[n] = a n^2                 (exact exponent pieces)
    //   W[n]  = e^{-(J+1) a n^2}      (builds g^{J+1}, separable)
    //   c[n]  = cos(2 n u)            (phase weight)
    // 1 - g is always formed as -expm1(beta_mu - beta eps): the softest
    // modes have g within 1e-8 of 1 and plain subtraction would cancel.
    std::array<std::int64_t, 3> N;
    std::array<std::vector<double>, 3> x2, W, c;
    std::array<double, 3> axis_sum{}, axis_tail{};
    std::int64_t mode_count = 1;
    for (int nu = 0; nu < 3; ++nu) {
        N[nu] = static_cast<std::int64_t>(std::floor(std::sqrt(kEnergyCutoff / (Jp1 * a[nu]))));
        mode_count *= 2 * N[nu] + 1;
        if (mode_count > 400'000'000)
            throw std::runtime_error("cycle_series: soft-mode window too large at V = " +
                                     std::to_string(V));
        x2[nu].reserve(2 * N[nu] + 1);
        W[nu].reserve(2 * N[nu] + 1);
        c[nu].reserve(2 * N[nu] + 1);
        for (std::int64_t n = -N[nu]; n <= N[nu]; ++n) {
            const double an2 = a[nu] * static_cast<double>(n) * static_cast<double>(n);
            x2[nu].push_back(an2);
            W[nu].push_back(std::exp(-Jp1 * an2));
            c[nu].push_back(std::cos(2.0 * static_cast<double>(n) * u[nu]));
            axis_sum[nu] += W[nu].back();
        }
        axis_tail[nu] = gaussian_axis_tail(Jp1 * a[nu], N[nu]);
    }

    const double zJ1 = std::exp(Jp1 * tp.beta_mu);
    double tail = 0.0;
    for (std::size_t i1 = 0; i1 < x2[0].size(); ++i1) {
        const double A1 = zJ1 * W[0][i1] * c[0][i1];
        const double e1 = tp.beta_mu - x2[0][i1];
        for (std::size_t i2 = 0; i2 < x2[1].size(); ++i2) {
            const double A12 = A1 * W[1][i2] * c[1][i2];
            const double e12 = e1 - x2[1][i2];
            double acc = 0.0;
            const std::size_t m = x2[2].size();
            if (weight_mode == 0) {
                for (std::size_t i = 0; i < m; ++i)
                    acc += c[2][i] * W[2][i] / (-std::expm1(e12 - x2[2][i]));
                acc *= A12;
            } else if (weight_mode == 1) {
                // d/d(beta_mu): (J+1) g^{J+1}/(1-g) + g^{J+2}/(1-g)^2
                for (std::size_t i = 0; i < m; ++i) {
                    const double omg = -std::expm1(e12 - x2[2][i]);
                    acc += c[2][i] * W[2][i] * (Jp1 / omg + (1.0 - omg) / (omg * omg));
                }
                acc *= A12;
            } else {
                // sum_{j>J} g^j/j = -log(1-g) - sum_{j<=J} g^j/j, per mode
                for (std::size_t i = 0; i < m; ++i) {
                    if (zJ1 * W[0][i1] * W[1][i2] * W[2][i] < 1e-18) continue;
                    const double omg = -std::expm1(e12 - x2[2][i]);
                    const double g = 1.0 - omg;
                    double partial = 0.0, gj = 1.0;
                    for (std::int64_t j = 1; j <= J; ++j) {
                        gj *= g;
                        partial += gj / static_cast<double>(j);
                    }
                    acc += c[0][i1] * c[1][i2] * c[2][i] * (-std::log(omg) - partial);
                }
            }
            tail += acc;
        }
    }

    // modes outside the soft window: g^{J+1} <= z^{J+1} e^{-cutoff} and
    // 1 - g >= -expm1(-cutoff/(J+1)); same per-axis product bound as the
    // direct lattice sum. The j-weights only help (1/j) or cost a factor
    // <= (J+1)/(1-g) (derivative), folded in below.
    const double excluded = (axis_sum[0] + axis_tail[0]) * (axis_sum[1] + axis_tail[1]) *
                                (axis_sum[2] + axis_tail[2]) -
                            axis_sum[0] * axis_sum[1] * axis_sum[2];
    const double gap = -std::expm1(-kEnergyCutoff / Jp1);
    double trunc = zJ1 * excluded / gap;
    if (weight_mode == 1) trunc *= Jp1 + 1.0 / gap;

    SeriesResult r;
    r.value = (direct + tail) / V;
    r.tail_bound = trunc / V + kSeriesRelTol * std::abs(r.value);
    r.terms_used = J + mode_count;
    return r;
}

}  // namespace

SeriesResult total_density_cycles(const ThermoPoint& tp, const BoxGeometry& geom) {
    return cycle_series(tp, geom, 0, {0.0, 0.0, 0.0});
}

SeriesResult phase_weighted_density(const ThermoPoint& tp, const BoxGeometry& geom,
                                    const std::array<double, 3>& u) {
    return cycle_series(tp, geom, 0, u);
}

SeriesResult cycle_window_sum(const ThermoPoint& tp, const BoxGeometry& geom, std::int64_t j_lo,
                              std::int64_t j_hi) {
    require_negative_mu(tp.beta_mu, "cycle_window_sum");
    if (j_lo < 1 || j_hi < j_lo)
        throw std::domain_error("cycle_window_sum: require 1 <= j_lo <= j_hi, got [" +
                                std::to_string(j_lo) + ", " + std::to_string(j_hi) + "]");
    const double V = geom.volume;
    const std::array<double, 3> a = axis_widths(geom, tp.lambda);
    const std::int64_t J = series_split(V);

    double direct = 0.0;
    std::int64_t terms = 0;
    for (std::int64_t j = j_lo; j <= std::min(j_hi, J); ++j, ++terms) {
        double term = std::exp(static_cast<double>(j) * tp.beta_mu);
        for (int nu = 0; nu < 3; ++nu)
            term *= theta3_exp(0.0, static_cast<double>(j) * a[nu] / kPi);
        direct += term;
    }

    double tail = 0.0;
    double trunc = 0.0;
    if (j_hi > J) {
        // two-ended geometric resummation per mode:
        //   sum_{j=J'+1}^{j_hi} g^j = (g^{J'+1} - g^{j_hi+1}) / (1 - g)
        const double lo_exp = static_cast<double>(std::max(j_lo - 1, J) + 1);
        const double hi_exp = static_cast<double>(j_hi) + 1.0;

        std::array<std::int64_t, 3> N;
        std::array<std::vector<double>, 3> x2;
        std::array<double, 3> axis_sum{}, axis_tail{};
        std::int64_t mode_count = 1;
        for (int nu = 0; nu < 3; ++nu) {
            N[nu] =
                static_cast<std::int64_t>(std::floor(std::sqrt(kEnergyCutoff / (lo_exp * a[nu]))));
            mode_count *= 2 * N[nu] + 1;
            if (mode_count > 400'000'000)
                throw std::runtime_error("cycle_window_sum: soft-mode window too large at V = " +
                                         std::to_string(V));
            x2[nu].reserve(2 * N[nu] + 1);
            for (std::int64_t n = -N[nu]; n <= N[nu]; ++n) {
                const double an2 = a[nu] * static_cast<double>(n) * static_cast<double>(n);
                x2[nu].push_back(an2);
                axis_sum[nu] += std::exp(-lo_exp * an2);
            }
            axis_tail[nu] = gaussian_axis_tail(lo_exp * a[nu], N[nu]);
        }
        terms += mode_count;

        for (double e1v : x2[0]) {
            const double e1 = tp.beta_mu - e1v;
            for (double e2v : x2[1]) {
                const double e12 = e1 - e2v;
                for (double e3v : x2[2]) {
                    const double e = e12 - e3v;
                    const double lo_pow = std::exp(lo_exp * e);
                    const double hi_pow = std::exp(hi_exp * e);
                    tail += (lo_pow - hi_pow) / (-std::expm1(e));
                }
            }
        }

        const double excluded = (axis_sum[0] + axis_tail[0]) * (axis_sum[1] + axis_tail[1]) *
                                    (axis_sum[2] + axis_tail[2]) -
                                axis_sum[0] * axis_sum[1] * axis_sum[2];
        const double gap = -std::expm1(-kEnergyCutoff / lo_exp);
        trunc = std::exp(lo_exp * tp.beta_mu) * excluded / gap;
    }

    SeriesResult r;
    r.value = (direct + tail) / V;
    r.tail_bound = trunc / V + kSeriesRelTol * std::abs(r.value);
    r.terms_used = terms;
    return r;
}

double total_density_cycles_derivative(const ThermoPoint& tp, const BoxGeometry& geom) {
    return cycle_series(tp, geom, 1, {0.0, 0.0, 0.0}).value;
}

SeriesResult pressure(const ThermoPoint& tp, const BoxGeometry& geom) {
    return cycle_series(tp, geom, 2, {0.0, 0.0, 0.0});
}

ThermoPoint solve_chemical_potential(const BoxGeometry& geom, double lambda, double rho) {
    if (!(rho > 0.0))
        throw std::invalid_argument("solve_chemical_potential: require rho > 0");
    if (!(lambda > 0.0))
        throw std::invalid_argument("solve_chemical_potential: require lambda > 0");

    ThermoPoint tp;
    tp.lambda = lambda;
    tp.rho = rho;
    tp.volume = geom.volume;

    auto density = [&](double bm) {
        tp.beta_mu = bm;
        return total_density_cycles(tp, geom).value;
    };

    // upper end: the ground mode diverges like 1/(V |beta_mu|)
    double hi = -1e-14;
    int guard = 0;
    while (density(hi) < rho) {
        hi *= 1.0 / 16.0;
        if (++guard > 40 || hi > -1e-300)
            throw SolveError("solve_chemical_potential: cannot bracket from above; rho = " +
                             std::to_string(rho) + ", V = " + std::to_string(geom.volume));
    }
    // lower end by doubling
    double lo = -1.0;
    guard = 0;
    while (density(lo) > rho) {
        lo *= 2.0;
        if (++guard > 12)
            throw SolveError("solve_chemical_potential: cannot bracket from below; rho = " +
                             std::to_string(rho));
    }
    if (hi < lo) hi = lo / 2.0;

    // bisection, then Newton polish with the analytic derivative
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double f = density(mid) - rho;
        if (f > 0.0)
            hi = mid;
        else
            lo = mid;
        if (std::abs(f) <= 1e-12 * rho) break;
        if (hi - lo <= 1e-13 * std::abs(lo)) break;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 30; ++it) {
        tp.beta_mu = x;
        const double f = total_density_cycles(tp, geom).value - rho;
        if (std::abs(f) <= 1e-11 * rho) break;
        const double d = total_density_cycles_derivative(tp, geom);
        double step = f / d;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // keep the bracket
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        x = xn;
    }
    tp.beta_mu = x;

    const double check = total_density_cycles(tp, geom).value;
    if (std::abs(check - rho) > 1e-10 * rho)
        throw SolveError("solve_chemical_potential: residual " + std::to_string(check - rho) +
                         " exceeds tolerance at V = " + std::to_string(geom.volume));
    return tp;
}

OccupationSpectrum occupation_spectrum(const ThermoPoint& tp, const BoxGeometry& geom,
                                       double k_radius) {
    require_negative_mu(tp.beta_mu, "occupation_spectrum");
    if (k_radius < 0.0) throw std::invalid_argument("occupation_spectrum: k_radius < 0");
    OccupationSpectrum spec;
    spec.volume = geom.volume;

    // inclusive boundary with a tiny relative slack: windows are often
    // chosen to end exactly on a mode shell (e.g. 2 pi Gamma / V^s with
    // integer Gamma) and rounding must not flicker those modes in and out
    const double radius = k_radius * (1.0 + 1e-9);
    std::array<std::int64_t, 3> N;
    for (int nu = 0; nu < 3; ++nu)
        N[nu] = static_cast<std::int64_t>(std::floor(radius * geom.side(nu) / (2.0 * kPi)));
    spec.n_max = N;

    const double r2 = radius * radius;
    std::array<double, 3> kunit;
    for (int nu = 0; nu < 3; ++nu) kunit[nu] = 2.0 * kPi / geom.side(nu);

    const std::int64_t budget = 20'000'000;
    if ((2 * N[0] + 1) * (2 * N[1] + 1) * (2 * N[2] + 1) > budget)
        throw std::runtime_error("occupation_spectrum: window contains too many modes");

    double listed = 0.0;
    for (std::int64_t n1 = -N[0]; n1 <= N[0]; ++n1)
        for (std::int64_t n2 = -N[1]; n2 <= N[1]; ++n2)
            for (std::int64_t n3 = -N[2]; n3 <= N[2]; ++n3) {
                const double k1 = kunit[0] * static_cast<double>(n1);
                const double k2 = kunit[1] * static_cast<double>(n2);
                const double k3 = kunit[2] * static_cast<double>(n3);
                if (k1 * k1 + k2 * k2 + k3 * k3 > r2) continue;
                ModeIndex m{n1, n2, n3};
                spec.modes.push_back({m, mode_density(tp, geom, m)});
                listed += spec.modes.back().density;
            }

    const SeriesResult total = total_density_cycles(tp, geom);
    spec.tail_bound = std::max(0.0, total.value - listed) + total.tail_bound;
    return spec;
}

}  // namespace casimir
