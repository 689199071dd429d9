#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "casimir/condensate.hpp"
#include "casimir/numerics.hpp"

using namespace casimir;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("critical density") {
    const double z32 = riemann_zeta(1.5);
    CHECK(critical_density(1.0) == doctest::Approx(z32).epsilon(1e-14));
    CHECK(critical_density(2.0) == doctest::Approx(z32 / 8.0).epsilon(1e-14));
    // geometry-independent: rho_c only depends on lambda
    CHECK_THROWS_AS(critical_density(0.0), std::domain_error);
}

TEST_CASE("regime_of follows the alpha1 rule") {
    CHECK(regime_of(BoxGeometry({0.4, 0.3, 0.3}, 1e3)) == CondensationType::TypeI);
    CHECK(regime_of(BoxGeometry({0.5, 0.25, 0.25}, 1e3)) == CondensationType::TypeII);
    CHECK(regime_of(BoxGeometry({0.6, 0.2, 0.2}, 1e3)) == CondensationType::TypeIII);
}

TEST_CASE("solve_constant satisfies the defining equations") {
    const double lambda = 1.3, rho0 = 0.7;

    const CondensateConstants a = solve_constant(CondensationType::TypeI, lambda, rho0);
    CHECK(a.constant * rho0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.delta == doctest::Approx(1.0));

    const CondensateConstants b = solve_constant(CondensationType::TypeII, lambda, rho0);
    CHECK(lattice_lorentz_sum(b.constant, lambda) == doctest::Approx(rho0).epsilon(1e-10));
    CHECK(b.delta == doctest::Approx(1.0));

    const CondensateConstants c = solve_constant(CondensationType::TypeIII, lambda, rho0, 0.6);
    CHECK(std::sqrt(kPi) / (lambda * std::sqrt(c.constant)) ==
          doctest::Approx(rho0).epsilon(1e-12));
    CHECK(c.delta == doctest::Approx(2.0 * (1.0 - 0.6)).epsilon(1e-14));

    CHECK_THROWS(solve_constant(CondensationType::TypeII, lambda, -1.0));
    CHECK_THROWS(solve_constant(CondensationType::TypeI, lambda, 0.0));
}

TEST_CASE("scaled condensate capture across regimes") {
    const double lambda = 1.0;
    const double rho = critical_density(lambda) + 1.0;  // rho0 = 1
    const auto vols = volume_sequence(1e3, 11);

    SUBCASE("TypeI: any threshold window captures all of rho0") {
        const BoxGeometry g({0.4, 0.3, 0.3}, 1e3);
        const ScalingSeries s =
            scaled_condensate_density(g, lambda, rho, ScaleFunction::threshold_offset(0.1), vols);
        CHECK(s.converged);
        CHECK(s.extrapolated_limit == doctest::Approx(1.0).epsilon(0.01));
    }

    SUBCASE("TypeII: a mode-count window captures the corresponding Lorentz partial sum") {
        const BoxGeometry g({0.5, 0.25, 0.25}, 1e3);
        const CondensateConstants cc = solve_constant(CondensationType::TypeII, lambda, 1.0);
        const double expect = limiting_window_occupation(cc, 2.0);
        const ScalingSeries s = scaled_condensate_density(
            g, lambda, rho, ScaleFunction::mode_count(2.0, 0.5), vols);
        CHECK(s.converged);
        CHECK(s.extrapolated_limit == doctest::Approx(expect).epsilon(0.01));
    }

    SUBCASE("TypeIII: a window shrinking faster than the band captures nothing") {
        // corrections decay like V^{-0.05}; extrapolation cannot represent
        // that, so assert the raw decaying trend instead of a fitted limit.
        const BoxGeometry g({0.6, 0.2, 0.2}, 1e3);
        const ScalingSeries s = scaled_condensate_density(
            g, lambda, rho, ScaleFunction::threshold_offset(0.05), vols);
        REQUIRE(s.values.size() == vols.size());
        CHECK(s.values.back() < 0.45);
        CHECK(s.values.back() < 0.4 * s.values.front());
        for (std::size_t i = 2; i < s.values.size(); ++i)
            CHECK(s.values[i] < s.values[i - 2]);  // decaying (allow one-step wiggle)
    }

    SUBCASE("TypeIII: a window shrinking slower than the band captures all of rho0") {
        const BoxGeometry g({0.6, 0.2, 0.2}, 1e3);
        const ScalingSeries s = scaled_condensate_density(
            g, lambda, rho, ScaleFunction::threshold_offset(0.15), vols);
        // slow approach from above: the tail sits near rho0 = 1 and the
        // residual shrinks monotonically until it crosses.
        CHECK(std::abs(s.values.back() - 1.0) < 0.1);
        CHECK(std::abs(s.values.back() - 1.0) < 0.25 * std::abs(s.values.front() - 1.0));
    }

    SUBCASE("TypeIII near the boundary (alpha1 = 0.55) behaves the same way") {
        const BoxGeometry g({0.55, 0.225, 0.225}, 1e3);
        const ScalingSeries s = scaled_condensate_density(
            g, lambda, rho, ScaleFunction::threshold_offset(0.1), vols);
        CHECK(std::abs(s.values.back() - 1.0) < 0.2);
        CHECK(std::abs(s.values.back() - 1.0) < 0.5 * std::abs(s.values.front() - 1.0));
    }

    SUBCASE("subcritical gas: nothing condenses") {
        const BoxGeometry g({0.5, 0.25, 0.25}, 1e3);
        const ScalingSeries s = scaled_condensate_density(
            g, lambda, critical_density(lambda) / 2.0, ScaleFunction::threshold_offset(0.1),
            vols);
        // the window mass dies off; the log-fit cannot represent the decay
        // and is not trusted here, the raw tail is checked instead
        CHECK(s.values.back() < 1e-4);
        for (std::size_t i = 1; i < s.values.size(); ++i)
            CHECK(s.values[i] < s.values[i - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("limiting occupation profile") {
    const double lambda = 1.0;
    const CondensateConstants t1 = solve_constant(CondensationType::TypeI, lambda, 1.0);
    CHECK(limiting_occupation_profile(t1, 0) == doctest::Approx(1.0));
    CHECK(limiting_occupation_profile(t1, 1) == 0.0);

    const CondensateConstants t2 = solve_constant(CondensationType::TypeII, lambda, 1.0);
    const double B = t2.constant;
    CHECK(limiting_occupation_profile(t2, 0) == doctest::Approx(1.0 / B).epsilon(1e-12));
    CHECK(limiting_occupation_profile(t2, 1) ==
          doctest::Approx(1.0 / (B + kPi)).epsilon(1e-12));

    const CondensateConstants t3 = solve_constant(CondensationType::TypeIII, lambda, 1.0, 0.6);
    CHECK(limiting_occupation_profile(t3, 0) == 0.0);

    // TypeII completeness: the profile sums back to rho0 over the soft line
    double total = limiting_occupation_profile(t2, 0);
    for (std::int64_t n = 1; n < 4000000; ++n)
        total += 2.0 * limiting_occupation_profile(t2, n);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    // and the exact resummation agrees
    CHECK(lattice_lorentz_sum(B, lambda) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("limiting window occupation") {
    const double lambda = 1.0;
    const CondensateConstants t2 = solve_constant(CondensationType::TypeII, lambda, 1.0);
    const double B = t2.constant;
    double expect = 1.0 / B;
    for (int n = 1; n <= 2; ++n) expect += 2.0 / (B + kPi * n * n);
    CHECK(limiting_window_occupation(t2, 2.0) == doctest::Approx(expect).epsilon(1e-12));
    // widening the window approaches rho0
    CHECK(limiting_window_occupation(t2, 1e7) == doctest::Approx(1.0).epsilon(1e-4));

    const CondensateConstants t3 = solve_constant(CondensationType::TypeIII, lambda, 1.0, 0.6);
    const double C = t3.constant;
    CHECK(limiting_window_occupation(t3, 1.0) ==
          doctest::Approx(2.0 * std::atan(lambda * std::sqrt(kPi / C)) /
                          (lambda * std::sqrt(kPi * C)))
              .epsilon(1e-12));

    const CondensateConstants t1 = solve_constant(CondensationType::TypeI, lambda, 1.0);
    CHECK(limiting_window_occupation(t1, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("classifier recovers the regime from finite-size sweeps") {
    const double lambda = 1.0;
    const double rho = critical_density(lambda) + 1.0;
    const auto vols = volume_sequence(1e3, 11);
    for (double a1 : {0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7}) {
        const BoxGeometry g({a1, (1.0 - a1) / 2.0, (1.0 - a1) / 2.0}, 1e3);
        const ClassificationResult c = classify(g, lambda, rho, vols);
        CHECK(c.regime == regime_of(g));
        if (a1 <= 0.6) CHECK(c.conclusive);
    }
    // an asymmetric TypeII split
    const ClassificationResult c = classify(BoxGeometry({0.5, 0.3, 0.2}, 1e3), lambda, rho, vols);
    CHECK(c.regime == CondensationType::TypeII);
    CHECK(c.conclusive);

    // below the critical density there is no condensation at all
    const ClassificationResult s = classify(BoxGeometry({0.5, 0.25, 0.25}, 1e3), lambda,
                                            critical_density(lambda) / 2.0, vols);
    CHECK(s.regime == CondensationType::None);
    CHECK(s.conclusive);
}

TEST_CASE("windowed density is bounded and monotone in the window") {
    const double lambda = 1.0;
    const double rho = critical_density(lambda) + 1.0;
    const auto vols = volume_sequence(1e3, 11);
    for (double a1 : {0.4, 0.5, 0.6}) {
        const BoxGeometry g({a1, (1.0 - a1) / 2.0, (1.0 - a1) / 2.0}, 1e3);
        // at finite volume the window also scoops normal modes, so the
        // limit bound rho0 only applies asymptotically; per volume the
        // capture is positive and below the full density
        const ScalingSeries s = scaled_condensate_density(
            g, lambda, rho, ScaleFunction::threshold_offset(0.1), vols);
        for (double v : s.values) {
            CHECK(v > 0.0);
            CHECK(v <= rho * (1.0 + 1e-12));
        }
        // and widening the window can only capture more
        const ScalingSeries wide = scaled_condensate_density(
            g, lambda, rho, ScaleFunction::mode_count(8.0, 0.5 - 0.1), vols);
        const ScalingSeries narrow = scaled_condensate_density(
            g, lambda, rho, ScaleFunction::mode_count(2.0, 0.5 - 0.1), vols);
        for (std::size_t i = 0; i < vols.size(); ++i)
            CHECK(narrow.values[i] <= wide.values[i] * (1.0 + 1e-12));
    }
}

TEST_CASE("fragmentation census") {
    const double lambda = 1.0;
    const double rho = critical_density(lambda) + 1.0;

    SUBCASE("TypeI: one dominant mode holding ~rho0 V particles") {
        const BoxGeometry g({0.4, 0.3, 0.3}, 1e3);
        const FragmentationReport r = fragmentation_report(g, lambda, rho, 1e6, 1e-3, 4.0);
        REQUIRE(r.fragment_count >= 1);
        CHECK(r.fragment_count <= 5);
        CHECK(r.top_occupations[0] == doctest::Approx(1.0 * 1e6).epsilon(0.02));
        const FragmentationReport r2 = fragmentation_report(g, lambda, rho, 4e6, 1e-3, 4.0);
        const double slope =
            std::log(r2.top_occupations[0] / r.top_occupations[0]) / std::log(4.0);
        CHECK(slope == doctest::Approx(1.0).epsilon(0.02));
    }

    SUBCASE("TypeIII: many fragments, none macroscopic, top mode ~ V^delta") {
        const BoxGeometry g({0.6, 0.2, 0.2}, 1e3);
        const FragmentationReport r = fragmentation_report(g, lambda, rho, 1e8, 1e-4, 4.0);
        CHECK(r.fragment_count > 50);
        CHECK(r.top_occupations[0] / r.n_total < 0.01);  // no single mode is macroscopic
        const FragmentationReport r2 = fragmentation_report(g, lambda, rho, 4e8, 1e-4, 4.0);
        const double slope =
            std::log(r2.top_occupations[0] / r.top_occupations[0]) / std::log(4.0);
        CHECK(slope == doctest::Approx(0.8).epsilon(0.1));  // delta = 2(1 - alpha1)
    }

    SUBCASE("subcritical: no fragments above threshold") {
        const BoxGeometry g({0.4, 0.3, 0.3}, 1e3);
        const FragmentationReport r =
            fragmentation_report(g, lambda, critical_density(lambda) / 2.0, 1e6, 1e-3, 4.0);
        CHECK(r.fragment_count == 0);
    }
}
