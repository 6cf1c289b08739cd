#include "joulemark/calibration.hpp"

#include "joulemark/errors.hpp"

#include <algorithm>
#include <cmath>

namespace joulemark {

std::vector<std::pair<double, double>> measure_idle(const std::vector<double>& durations_ms,
                                                    MeasureBackend& backend) {
    std::vector<double> distinct(durations_ms);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2)
        throw Error(Errc::invalid_argument, "idle calibration needs at least 2 distinct sleep durations");

    std::vector<std::pair<double, double>> samples;
    samples.reserve(durations_ms.size());
    for (double d : durations_ms) {
        if (!(d > 0))
            throw Error(Errc::invalid_argument, "sleep durations must be positive");
        samples.emplace_back(d, backend.measure_sleep(d));
    }
    return samples;
}

IdleBaseline fit_idle_slope(const std::vector<std::pair<double, double>>& samples, const std::string& machine) {
    if (samples.size() < 2)
        throw Error(Errc::degenerate_samples, "need at least 2 idle samples");
    const double first = samples.front().first;
    const bool all_same = std::all_of(samples.begin(), samples.end(),
                                      [&](const auto& s) { return s.first == first; });
    if (all_same)
        throw Error(Errc::degenerate_samples, "all sleep durations are equal");

    double sde = 0;
    double sdd = 0;
    double sd = 0;
    double se = 0;
    for (const auto& [d, e] : samples) {
        if (!(d > 0))
            throw Error(Errc::degenerate_samples, "non-positive sleep duration");
        sde += d * e;
        sdd += d * d;
        sd += d;
        se += e;
    }

    IdleBaseline baseline;
    baseline.machine = machine;
    baseline.idle_slope_j_per_ms = sde / sdd;
    baseline.sample_count = static_cast<int>(samples.size());

    double sse = 0;
    for (const auto& [d, e] : samples) {
        const double r = baseline.idle_slope_j_per_ms * d - e;
        sse += r * r;
    }
    baseline.fit_residual_sd = std::sqrt(sse / static_cast<double>(samples.size() - 1));

    // Free-intercept fit, diagnostic only: the intercept swings between
    // positive and negative values across runs and is not trusted.
    const double n = static_cast<double>(samples.size());
    const double denom = n * sdd - sd * sd;
    if (denom != 0) {
        baseline.diag_intercept_slope = (n * sde - sd * se) / denom;
        baseline.diag_intercept_j = (se - baseline.diag_intercept_slope * sd) / n;
    }
    return baseline;
}

BaselineAdjusted subtract_baseline(const SolutionMeasurement& measurement, const IdleBaseline& baseline) {
    if (measurement.baseline_adjusted)
        throw Error(Errc::already_adjusted, "measurement for " + measurement.solution_id +
                                                " already baseline-adjusted");
    BaselineAdjusted out;
    out.measurement = measurement;
    const double idle_j = baseline.idle_slope_j_per_ms * measurement.wall_mean_ms;
    double adjusted = measurement.c_mean_j - idle_j;
    if (adjusted < 0) {
        adjusted = 0;
        out.clamped = true;
    }
    out.measurement.c_mean_j = adjusted;
    out.measurement.baseline_adjusted = true;
    return out;
}

std::pair<MeasurementSet, std::vector<std::string>> subtract_baseline(const MeasurementSet& set,
                                                                      const IdleBaseline& baseline) {
    MeasurementSet adjusted = set;
    std::vector<std::string> warnings;
    for (auto& m : adjusted.measurements) {
        BaselineAdjusted one = subtract_baseline(m, baseline);
        if (one.clamped)
            warnings.push_back("solution " + m.solution_id + ": energy below idle baseline, clamped to 0");
        m = one.measurement;
    }
    return {std::move(adjusted), std::move(warnings)};
}

} // namespace joulemark
