#pragma once

#include "joulemark/types.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace joulemark {

/// One (time, energy) observation entering a fit. t is CPU time in ms and
/// must be positive; the SDs come from the trimmed aggregation.
struct ProfilePoint {
    std::string solution_id;
    double t = 0;
    double c = 0;
    double t_sd = 0;
    double c_sd = 0;

    bool operator==(const ProfilePoint&) const = default;
};

enum class FitMode {
    ols,
    wls_c,  // weights 1/c_sd, diagnostic only
    wls_tc, // weights 1/(t_sd*c_sd), diagnostic only
};

const char* to_string(FitMode mode) noexcept;
FitMode fit_mode_from_string(const std::string& name);

/// Fitted energy profile of one (problem, machine, config) group:
/// the line c = a*t through the origin plus its residual statistics.
struct ProblemProfile {
    double slope_a = 0;  // joules per millisecond
    double sse = 0;
    double sigma_e = 0;
    double spearman = 0;
    int n = 0;
    FitMode fit_mode = FitMode::ols;

    bool operator==(const ProblemProfile&) const = default;
};

/// Converts a measurement set to fit points. Throws InvalidArgument when a
/// measurement has non-positive CPU time.
std::vector<ProfilePoint> to_profile_points(const MeasurementSet& set);

/// Residuals e_i = a*t_i - c_i (predicted minus observed), in point order.
std::vector<double> residuals(std::span<const ProfilePoint> points, double slope);

/// Standard deviation of residuals, sqrt(SSE/(n-2)). Requires n >= 3.
double residual_sd(std::span<const double> residual_values);

/// Spearman rank correlation with average ranks on ties. Requires >= 2
/// points; throws DegenerateRanks when all t or all c coincide.
double spearman_rank(std::span<const double> x, std::span<const double> y);
double spearman_rank(std::span<const ProfilePoint> points);

/// Ordinary least squares through the origin: a = sum(t*c)/sum(t^2), with
/// SSE, sigma_e and Spearman attached. Requires >= 3 points.
ProblemProfile fit_ols_origin(std::span<const ProfilePoint> points);

/// Weighted variant, kept as a diagnostic mode: a = sum(w*t*c)/sum(w*t^2)
/// with w from the chosen mode. Throws ZeroWeightDenominator when any
/// referenced SD is zero. Residual statistics stay unweighted.
ProblemProfile fit_wls_origin(std::span<const ProfilePoint> points, FitMode weight_mode);

enum class OutlierTier { none, low, medium, high };
enum class Direction { above, below };

const char* to_string(OutlierTier tier) noexcept;
const char* to_string(Direction direction) noexcept;

/// Outlier call for one solution. Thresholds are absolute-residual bounds;
/// the tiers nest: crossing thr_high implies crossing thr_medium and thr_low.
struct OutlierEntry {
    std::string solution_id;
    double residual = 0;
    OutlierTier tier = OutlierTier::none;
    double thr_low = 0;    // 2*sigma_e
    double thr_medium = 0; // 2*sigma_e + c_sd
    double thr_high = 0;   // 2*sigma_e + 2*c_sd
    Direction direction = Direction::below;

    bool operator==(const OutlierEntry&) const = default;
};

struct OutlierReport {
    double sigma_e = 0;
    std::vector<OutlierEntry> entries;

    bool operator==(const OutlierReport&) const = default;
};

/// Tiered outlier classification of every point against a fitted profile.
/// Direction is `above` when the point consumed more energy than predicted.
OutlierReport classify_outliers(std::span<const ProfilePoint> points, const ProblemProfile& profile);

/// A solution flagged on every machine, at least medium on one.
struct CrossMachineOutlier {
    std::string solution_id;
    bool direction_consistent = true;
    std::map<std::string, OutlierTier> tier_by_machine;

    bool operator==(const CrossMachineOutlier&) const = default;
};

/// Intersects per-machine outlier reports over the same solution universe:
/// selects solutions with tier >= low everywhere and >= medium somewhere,
/// and records whether the deviation direction agrees across machines.
/// Requires >= 2 machines; throws MismatchedUniverse when the reports cover
/// different solutions.
std::vector<CrossMachineOutlier> cross_machine_outliers(const std::map<std::string, OutlierReport>& by_machine);

} // namespace joulemark
