#include "casimir/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace casimir {

namespace {
constexpr double kPi = 3.14159265358979323846;
// direct/dual crossover for theta3; both series then converge at rate
// e^{-pi} or faster
constexpr double kThetaCrossover = 0.04321391826377224;  // e^{-pi}
}  // namespace

SeriesResult polylog(double s, double z, SeriesTolerance tol) {
    if (s <= 1.0)
        throw std::domain_error("polylog: require s > 1, got s = " + std::to_string(s));
    if (z < 0.0 || z > 1.0)
        throw std::domain_error("polylog: require 0 <= z <= 1, got z = " + std::to_string(z));

    if (z == 0.0) return {0.0, 0.0, 1};

    if (z == 1.0) {
        // zeta(s) by Euler-Maclaurin: sum the first N-1 terms, then
        // integral + correction terms for the tail starting at N.
        const double N = 4096.0;
        double sum = 0.0;
        for (double j = N - 1.0; j >= 1.0; j -= 1.0) sum += std::pow(j, -s);
        const double fN = std::pow(N, -s);
        double tail = N * fN / (s - 1.0);            // integral_N^inf x^-s dx
        tail += 0.5 * fN;                            // f(N)/2
        tail += s * fN / N / 12.0;                   // -f'(N)/12
        const double t3 = s * (s + 1.0) * (s + 2.0) * fN / (N * N * N) / 720.0;
        tail -= t3;
        const double t5 =
            s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * fN / (N * N * N * N * N) / 30240.0;
        tail += t5;
        return {sum + tail, t5 + 1e-16 * sum, static_cast<std::int64_t>(N)};
    }

    double sum = 0.0;
    double zj = 1.0;
    const std::int64_t max_terms = 50'000'000;
    for (std::int64_t j = 1; j <= max_terms; ++j) {
        zj *= z;
        sum += zj / std::pow(static_cast<double>(j), s);
        // tail <= z^{j+1} / ((j+1)^s (1-z))
        const double bound = zj * z / (std::pow(static_cast<double>(j) + 1.0, s) * (1.0 - z));
        if (bound < tol.abs_tol || bound < tol.rel_tol * sum)
            return {sum, bound, j};
    }
    const double bound = zj * z / (std::pow(static_cast<double>(max_terms) + 1.0, s) * (1.0 - z));
    return {sum, bound, max_terms};
}

double riemann_zeta(double s) { return polylog(s, 1.0).value; }

double theta3_direct(double u, double q) {
    double sum = 1.0;
    double logq = std::log(q);
    for (int n = 1; n < 20000; ++n) {
        const double qn2 = std::exp(logq * static_cast<double>(n) * n);
        sum += 2.0 * qn2 * std::cos(2.0 * n * u);
        if (qn2 < 1e-18 * sum) break;
    }
    return sum;
}

double theta3_dual(double u, double q) {
    // Poisson resummation: with q = e^{-pi t},
    //   theta3(u, q) = (1/sqrt(t)) sum_{m in Z} e^{-(u - pi m)^2 / (pi t)}.
    // All terms are positive, so no cancellation.
    const double t = -std::log(q) / kPi;
    double sum = 0.0;
    for (int m = 0; m < 20000; ++m) {
        double term = std::exp(-(u - kPi * m) * (u - kPi * m) / (kPi * t));
        if (m > 0) term += std::exp(-(u + kPi * m) * (u + kPi * m) / (kPi * t));
        sum += term;
        if (term < 1e-18 * sum && m >= 1) break;
    }
    return sum / std::sqrt(t);
}

double theta3_exp(double u, double t) {
    if (t <= 0.0)
        throw std::domain_error("theta3_exp: require t > 0, got t = " + std::to_string(t));
    u = std::remainder(u, kPi);
    if (t >= 1.0) return theta3_direct(u, std::exp(-kPi * t));
    // dual series needs only t, never forms q
    double sum = 0.0;
    for (int m = 0; m < 20000; ++m) {
        double term = std::exp(-(u - kPi * m) * (u - kPi * m) / (kPi * t));
        if (m > 0) term += std::exp(-(u + kPi * m) * (u + kPi * m) / (kPi * t));
        sum += term;
        if (term < 1e-18 * sum && m >= 1) break;
    }
    return sum / std::sqrt(t);
}

double theta3(double u, double q) {
    if (q < 0.0 || q >= 1.0)
        throw std::domain_error("theta3: require 0 <= q < 1, got q = " + std::to_string(q));
    if (q == 0.0) return 1.0;
    // period pi in u; reduce into [-pi/2, pi/2]
    u = std::remainder(u, kPi);
    if (q <= kThetaCrossover) return theta3_direct(u, q);
    return theta3_dual(u, q);
}

double lattice_lorentz_sum(double B, double lambda) {
    if (B <= 0.0)
        throw std::domain_error("lattice_lorentz_sum: require B > 0, got B = " + std::to_string(B));
    if (lambda <= 0.0)
        throw std::domain_error("lattice_lorentz_sum: require lambda > 0");
    const double t = std::sqrt(kPi * B) / lambda;
    // coth(t) = 1 + 2/(e^{2t} - 1), stable for large t
    const double coth = 1.0 + 2.0 / std::expm1(2.0 * t);
    return kPi * coth / (lambda * std::sqrt(kPi * B));
}

double erf_std(double x) { return std::erf(x); }

}  // namespace casimir
