#ifndef CASIMIR_NUMERICS_HPP
#define CASIMIR_NUMERICS_HPP

#include <cstdint>

namespace casimir {

/// A truncated series value together with a certified bound on the
/// discarded tail. Every lattice / j-sum in the library reports one of
/// these so downstream checks can combine tolerances honestly.
struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;  // absolute bound on |value - exact|
    std::int64_t terms_used = 1;
};

/// Default truncation targets: terms are added until the analytic tail
/// bound drops below max(abs_tol, rel_tol * |partial sum|).
struct SeriesTolerance {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
};

/// Bose function g_s(z) = sum_{j>=1} z^j / j^s, s > 1, 0 <= z <= 1.
/// At z = 1 this is zeta(s), evaluated with Euler-Maclaurin tail
/// corrections (the naive tail decays only like j^{-s}).
SeriesResult polylog(double s, double z, SeriesTolerance tol = {});

/// zeta(s) for s > 1.
double riemann_zeta(double s);

/// Elliptic theta function theta3(u, q) = sum_{n in Z} q^{n^2} e^{2inu},
/// real for real u. Switches to the Poisson-resummed series for q above
/// e^{-pi} so the relative error stays <= 1e-12 uniformly on
/// q in [0, 1 - 1e-9]. Periodic with period pi in u.
double theta3(double u, double q);

/// The two evaluation branches, exposed so tests can compare them at the
/// crossover. Both are valid wherever they converge.
double theta3_direct(double u, double q);
double theta3_dual(double u, double q);

/// theta3(u, e^{-pi t}) parametrized by t > 0 directly, so callers with
/// tiny t never round q up to 1.
double theta3_exp(double u, double t);

/// sum_{n in Z} 1 / (B + pi lambda^2 n^2) via the closed form
/// pi * coth(sqrt(pi B)/lambda) / (lambda * sqrt(pi B)), B > 0.
double lattice_lorentz_sum(double B, double lambda);

/// Standard error function.
double erf_std(double x);

}  // namespace casimir

#endif
