#include "joulemark/calibration.hpp"

#include "joulemark/errors.hpp"
#include "joulemark/orchestrator.hpp"
#include "joulemark/stats.hpp"
#include "joulemark/synthetic.hpp"

#include <doctest.h>

using namespace joulemark;

namespace {

SyntheticBackend idle_backend(double idle_w) {
    SyntheticModel model;
    model.active_power_w = 10;
    model.idle_power_w = idle_w;
    model.noise_rel = 0;
    return SyntheticBackend(model);
}

SolutionMeasurement measurement(double c_mean, double wall_mean) {
    SolutionMeasurement m;
    m.solution_id = "s1";
    m.t_mean_ms = wall_mean;
    m.c_mean_j = c_mean;
    m.wall_mean_ms = wall_mean;
    m.kept_runs = 8;
    return m;
}

} // namespace

TEST_CASE("measure_idle reads one energy per sleep duration") {
    auto backend = idle_backend(2.0);
    const auto samples = measure_idle({500, 1000}, backend);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].first == 500);
    CHECK(samples[0].second == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(samples[1].second == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("measure_idle needs at least two distinct durations") {
    auto backend = idle_backend(2.0);
    CHECK_THROWS_AS(measure_idle({1000}, backend), Error);
    CHECK_THROWS_AS(measure_idle({}, backend), Error);
    CHECK_THROWS_AS(measure_idle({800, 800}, backend), Error);
}

TEST_CASE("fit_idle_slope goes through the origin") {
    const auto baseline = fit_idle_slope({{1000, 5}, {2000, 10}}, "M1");
    CHECK(baseline.idle_slope_j_per_ms == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(baseline.sample_count == 2);
    CHECK(baseline.machine == "M1");
    CHECK(baseline.fit_residual_sd == doctest::Approx(0.0));
}

TEST_CASE("fit_idle_slope rejects degenerate samples") {
    try {
        fit_idle_slope({{1000, 5}, {1000, 5}});
        FAIL("expected DegenerateSamples");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_samples);
    }
    CHECK_THROWS_AS(fit_idle_slope({{1000, 5}}), Error);
}

TEST_CASE("fit_idle_slope minimizes through-origin squared error") {
    // sum(d*e)/sum(d^2) = (5100 + 19800) / (1e6 + 4e6) = 0.00498
    const auto baseline = fit_idle_slope({{1000, 5.1}, {2000, 9.9}});
    CHECK(baseline.idle_slope_j_per_ms == doctest::Approx(0.00498).epsilon(1e-12));
    // the free-intercept diagnostic reflects the exact two-point line
    CHECK(baseline.diag_intercept_slope == doctest::Approx((9.9 - 5.1) / 1000.0).epsilon(1e-9));
    CHECK(baseline.diag_intercept_j == doctest::Approx(5.1 - 4.8).epsilon(1e-9));
}

TEST_CASE("subtract_baseline removes idle energy over the wall duration") {
    IdleBaseline baseline;
    baseline.idle_slope_j_per_ms = 0.005;
    const auto adjusted = subtract_baseline(measurement(12.0, 1000.0), baseline);
    CHECK(adjusted.measurement.c_mean_j == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(adjusted.measurement.baseline_adjusted);
    CHECK_FALSE(adjusted.clamped);
    // t and spreads untouched
    CHECK(adjusted.measurement.t_mean_ms == 1000.0);
}

TEST_CASE("a zero slope only flips the adjusted flag") {
    IdleBaseline baseline;
    baseline.idle_slope_j_per_ms = 0;
    const auto adjusted = subtract_baseline(measurement(12.0, 1000.0), baseline);
    CHECK(adjusted.measurement.c_mean_j == 12.0);
    CHECK(adjusted.measurement.baseline_adjusted);
}

TEST_CASE("energy below the baseline clamps to zero with a warning") {
    IdleBaseline baseline;
    baseline.idle_slope_j_per_ms = 0.005;
    const auto adjusted = subtract_baseline(measurement(1.0, 1000.0), baseline);
    CHECK(adjusted.measurement.c_mean_j == 0.0);
    CHECK(adjusted.clamped);

    MeasurementSet set;
    set.machine = "M1";
    set.problem_id = "p";
    set.measurements = {measurement(1.0, 1000.0)};
    const auto [adjusted_set, warnings] = subtract_baseline(set, baseline);
    CHECK(adjusted_set.measurements[0].c_mean_j == 0.0);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("clamped") != std::string::npos);
}

TEST_CASE("subtracting twice is an error, never a double subtraction") {
    IdleBaseline baseline;
    baseline.idle_slope_j_per_ms = 0.001;
    const auto once = subtract_baseline(measurement(12.0, 1000.0), baseline);
    try {
        subtract_baseline(once.measurement, baseline);
        FAIL("expected AlreadyAdjusted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::already_adjusted);
    }
}

TEST_CASE("calibrate-subtract-fit recovers the active power slope exactly") {
    SyntheticModel model;
    model.active_power_w = 10;
    model.idle_power_w = 2;
    model.noise_rel = 0;
    for (int i = 1; i <= 12; ++i)
        model.cpu_ms["s" + std::to_string(i) + "::in"] = 150.0 * i;
    SyntheticBackend backend(model);

    const auto baseline = fit_idle_slope(measure_idle({500, 1000, 2000}, backend), "M1");
    CHECK(baseline.idle_slope_j_per_ms == doctest::Approx(0.002).epsilon(1e-12));

    MachineDescriptor machine{"M1", "", 4, ""};
    ProblemSpec problem{"p", {"in"}, ""};
    std::vector<SolutionSpec> solutions;
    for (int i = 1; i <= 12; ++i) {
        const std::string id = "s" + std::to_string(i);
        solutions.push_back({id, id, "cpp", "O2"});
    }
    RunConfig config;
    const SuiteResult suite = run_problem_suite(backend, machine, problem, solutions, config);
    REQUIRE(suite.set.failures.empty());

    const auto [adjusted, warnings] = subtract_baseline(suite.set, baseline);
    CHECK(warnings.empty());
    const auto profile = fit_ols_origin(to_profile_points(adjusted));
    CHECK(profile.slope_a == doctest::Approx(0.010).epsilon(1e-12));
}
