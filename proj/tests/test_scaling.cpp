#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <vector>

#include "casimir/scaling.hpp"

using namespace casimir;

TEST_CASE("volume_sequence doubles geometrically") {
    const std::vector<double> v = volume_sequence(1e3, 4);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == 1e3);
    CHECK(v[3] == 8e3);
}

TEST_CASE("parallel_for writes every index exactly once") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("fit_series: constant observable") {
    const auto v = volume_sequence(100.0, 8);
    std::vector<double> y(v.size(), 7.0);
    const ScalingSeries s = fit_series(v, y);
    CHECK(s.extrapolated_limit == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(s.converged);
}

TEST_CASE("fit_series: recovers a pure power law") {
    const auto v = volume_sequence(100.0, 11);
    std::vector<double> y;
    for (double V : v) y.push_back(2.0 + 3.0 / V);
    ScalingSeries s = fit_series(v, y);
    CHECK(s.extrapolated_limit == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(s.fit_exponent == doctest::Approx(1.0).epsilon(0.02));
    CHECK(s.converged);

    y.clear();
    for (double V : v) y.push_back(5.0 + std::pow(V, -0.8));
    s = fit_series(v, y);
    CHECK(s.fit_exponent == doctest::Approx(0.8).epsilon(0.025));
    CHECK(exponent_test(s, 0.8, 0.02).pass);
    CHECK_FALSE(exponent_test(s, 0.5, 0.1).pass);
}

TEST_CASE("run_sweep evaluates the observable per volume") {
    const auto v = volume_sequence(100.0, 8);
    const ScalingSeries s = run_sweep([](double V) { return 1.0 + 2.0 / V; }, v);
    REQUIRE(s.values.size() == v.size());
    CHECK(s.values[0] == doctest::Approx(1.02).epsilon(1e-12));
    CHECK(s.extrapolated_limit == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exponent_test refuses unconverged series") {
    ScalingSeries s;
    s.converged = false;
    CHECK_THROWS(exponent_test(s, 1.0, 0.1));
}

TEST_CASE("fit_series_log recovers limits with logarithmic companions") {
    const auto v = volume_sequence(1e3, 12);
    const double q = 0.3;
    std::vector<double> y;
    for (double V : v)
        y.push_back(4.0 + std::pow(V, -q) * (2.0 - 0.7 * std::log(V)) +
                    std::pow(V, -2 * q) * (1.0 + 0.3 * std::log(V)));
    const ScalingSeries s = fit_series_log(v, y, q, 3);
    CHECK(s.extrapolated_limit == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(s.converged);

    // a pure power fit misreads the same data
    const ScalingSeries p = fit_series(v, y);
    CHECK(std::abs(p.extrapolated_limit - 4.0) > 1e-3);
}

TEST_CASE("fit_series_log is exact on its own model class") {
    const auto v = volume_sequence(1e3, 10);
    std::vector<double> y;
    for (double V : v) y.push_back(-1.5 + 2.0 * std::pow(V, -0.25));
    const ScalingSeries s = fit_series_log(v, y, 0.25, 2);
    CHECK(s.extrapolated_limit == doctest::Approx(-1.5).epsilon(1e-10));
    CHECK(s.residual < 1e-10);
}

TEST_CASE("fit_decay_exponent recovers the decay power") {
    const auto v = volume_sequence(1e3, 14);
    std::vector<double> y;
    for (double V : v) y.push_back(3.0 * std::pow(V, -0.8) * (1.0 + 2.0 * std::pow(V, -0.2)));
    const ScalingSeries s = fit_decay_exponent(v, y, 0.2);
    CHECK(s.extrapolated_limit == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("fit inputs are validated") {
    CHECK_THROWS(fit_series({1.0, 2.0}, {1.0, 2.0}));                  // too short
    CHECK_THROWS(fit_series({1.0, 2.0, 3.0}, {1.0, 2.0}));             // mismatched
    CHECK_THROWS(fit_series_log(volume_sequence(10, 4), {1, 2, 3, 4}, 0.3, 3));  // underdetermined
}

TEST_CASE("CASIMIR_THREADS caps the thread count") {
    CHECK(max_threads() >= 1);
}
