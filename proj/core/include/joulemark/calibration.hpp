#pragma once

#include "joulemark/backend.hpp"
#include "joulemark/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace joulemark {

/// Idle energy slope of a machine, fitted through the origin from sleep runs.
/// The free-intercept fit is recorded as a diagnostic only; it is never used
/// for baseline removal.
struct IdleBaseline {
    std::string machine;
    double idle_slope_j_per_ms = 0;
    int sample_count = 0;
    double fit_residual_sd = 0;
    double diag_intercept_slope = 0;
    double diag_intercept_j = 0;

    bool operator==(const IdleBaseline&) const = default;
};

/// Runs a sleep of each duration through the backend and returns
/// (duration_ms, energy_j) pairs. Requires at least 2 distinct durations.
std::vector<std::pair<double, double>> measure_idle(const std::vector<double>& durations_ms,
                                                    MeasureBackend& backend);

/// Origin-constrained least squares on (duration, energy):
/// slope = sum(d*e)/sum(d^2). Throws DegenerateSamples for fewer than 2
/// samples or when all durations coincide.
IdleBaseline fit_idle_slope(const std::vector<std::pair<double, double>>& samples,
                            const std::string& machine = {});

struct BaselineAdjusted {
    SolutionMeasurement measurement;
    bool clamped = false; // energy went negative after removal and was clamped to 0
};

/// Removes idle energy (slope x mean wall time) from a measurement's mean
/// energy. Guarded against double application: throws AlreadyAdjusted when
/// the measurement is already baseline-adjusted.
BaselineAdjusted subtract_baseline(const SolutionMeasurement& measurement, const IdleBaseline& baseline);

/// Set-level wrapper; returns the adjusted set plus one warning per clamped
/// solution.
std::pair<MeasurementSet, std::vector<std::string>> subtract_baseline(const MeasurementSet& set,
                                                                      const IdleBaseline& baseline);

} // namespace joulemark
