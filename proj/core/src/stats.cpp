#include "joulemark/stats.hpp"

#include "joulemark/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace joulemark {

const char* to_string(FitMode mode) noexcept {
    switch (mode) {
    case FitMode::ols: return "ols";
    case FitMode::wls_c: return "wls-c";
    case FitMode::wls_tc: return "wls-tc";
    }
    return "unknown";
}

FitMode fit_mode_from_string(const std::string& name) {
    if (name == "ols")
        return FitMode::ols;
    if (name == "wls-c")
        return FitMode::wls_c;
    if (name == "wls-tc")
        return FitMode::wls_tc;
    throw Error(Errc::invalid_argument, "unknown fit mode: " + name);
}

const char* to_string(OutlierTier tier) noexcept {
    switch (tier) {
    case OutlierTier::none: return "none";
    case OutlierTier::low: return "low";
    case OutlierTier::medium: return "medium";
    case OutlierTier::high: return "high";
    }
    return "unknown";
}

const char* to_string(Direction direction) noexcept {
    return direction == Direction::above ? "above" : "below";
}

std::vector<ProfilePoint> to_profile_points(const MeasurementSet& set) {
    std::vector<ProfilePoint> points;
    points.reserve(set.measurements.size());
    for (const auto& m : set.measurements) {
        if (!(m.t_mean_ms > 0))
            throw Error(Errc::invalid_argument, "non-positive CPU time for solution " + m.solution_id);
        points.push_back({m.solution_id, m.t_mean_ms, m.c_mean_j, m.t_sd_ms, m.c_sd_j});
    }
    return points;
}

std::vector<double> residuals(std::span<const ProfilePoint> points, double slope) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points)
        out.push_back(slope * p.t - p.c);
    return out;
}

double residual_sd(std::span<const double> residual_values) {
    const auto n = residual_values.size();
    if (n < 3)
        throw Error(Errc::degenerate_points, "sigma_e needs at least 3 residuals, got " + std::to_string(n));
    double sse = 0;
    for (double e : residual_values)
        sse += e * e;
    return std::sqrt(sse / static_cast<double>(n - 2));
}

namespace {

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]])
            ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

bool all_equal(std::span<const double> values) {
    return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
}

} // namespace

double spearman_rank(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(Errc::invalid_argument, "rank inputs differ in length");
    if (x.size() < 2)
        throw Error(Errc::degenerate_ranks, "need at least 2 points");
    if (all_equal(x) || all_equal(y))
        throw Error(Errc::degenerate_ranks, "constant variable has no rank ordering");

    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(rx.begin(), rx.end(), 0.0) / n; // both rank means coincide

    double sxy = 0;
    double sxx = 0;
    double syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Single sqrt keeps perfectly monotone data exactly at +/-1.
    return sxy / std::sqrt(sxx * syy);
}

double spearman_rank(std::span<const ProfilePoint> points) {
    std::vector<double> t;
    std::vector<double> c;
    t.reserve(points.size());
    c.reserve(points.size());
    for (const auto& p : points) {
        t.push_back(p.t);
        c.push_back(p.c);
    }
    return spearman_rank(t, c);
}

namespace {

ProblemProfile finish_profile(std::span<const ProfilePoint> points, double slope, FitMode mode) {
    ProblemProfile profile;
    profile.slope_a = slope;
    profile.fit_mode = mode;
    profile.n = static_cast<int>(points.size());
    const auto errs = residuals(points, slope);
    for (double e : errs)
        profile.sse += e * e;
    profile.sigma_e = residual_sd(errs);
    profile.spearman = spearman_rank(points);
    return profile;
}

void require_fit_points(std::span<const ProfilePoint> points) {
    if (points.size() < 3)
        throw Error(Errc::degenerate_points, "fit needs at least 3 points, got " + std::to_string(points.size()));
    for (const auto& p : points)
        if (!(p.t > 0) || !std::isfinite(p.t) || !std::isfinite(p.c))
            throw Error(Errc::degenerate_points, "invalid point for solution " + p.solution_id);
}

} // namespace

ProblemProfile fit_ols_origin(std::span<const ProfilePoint> points) {
    require_fit_points(points);
    double stc = 0;
    double stt = 0;
    for (const auto& p : points) {
        stc += p.t * p.c;
        stt += p.t * p.t;
    }
    if (!(stt > 0))
        throw Error(Errc::degenerate_points, "sum of squared times is zero");
    return finish_profile(points, stc / stt, FitMode::ols);
}

ProblemProfile fit_wls_origin(std::span<const ProfilePoint> points, FitMode weight_mode) {
    if (weight_mode != FitMode::wls_c && weight_mode != FitMode::wls_tc)
        throw Error(Errc::invalid_argument, "weight mode must be wls-c or wls-tc");
    require_fit_points(points);

    double swtc = 0;
    double swtt = 0;
    for (const auto& p : points) {
        const double denom = weight_mode == FitMode::wls_c ? p.c_sd : p.t_sd * p.c_sd;
        if (!(denom > 0))
            throw Error(Errc::zero_weight_denominator,
                        "zero standard deviation for solution " + p.solution_id);
        const double w = 1.0 / denom;
        swtc += w * p.t * p.c;
        swtt += w * p.t * p.t;
    }
    if (!(swtt > 0))
        throw Error(Errc::degenerate_points, "weighted sum of squared times is zero");
    return finish_profile(points, swtc / swtt, weight_mode);
}

OutlierReport classify_outliers(std::span<const ProfilePoint> points, const ProblemProfile& profile) {
    OutlierReport report;
    report.sigma_e = profile.sigma_e;
    report.entries.reserve(points.size());
    for (const auto& p : points) {
        OutlierEntry entry;
        entry.solution_id = p.solution_id;
        entry.residual = profile.slope_a * p.t - p.c;
        entry.thr_low = 2 * profile.sigma_e;
        entry.thr_medium = 2 * profile.sigma_e + p.c_sd;
        entry.thr_high = 2 * profile.sigma_e + 2 * p.c_sd;
        const double abs_e = std::abs(entry.residual);
        if (abs_e > entry.thr_high)
            entry.tier = OutlierTier::high;
        else if (abs_e > entry.thr_medium)
            entry.tier = OutlierTier::medium;
        else if (abs_e > entry.thr_low)
            entry.tier = OutlierTier::low;
        else
            entry.tier = OutlierTier::none;
        entry.direction = p.c > profile.slope_a * p.t ? Direction::above : Direction::below;
        report.entries.push_back(std::move(entry));
    }
    return report;
}

std::vector<CrossMachineOutlier> cross_machine_outliers(const std::map<std::string, OutlierReport>& by_machine) {
    if (by_machine.size() < 2)
        throw Error(Errc::invalid_argument, "cross-machine intersection needs at least 2 machines");

    // Same solution universe everywhere.
    std::vector<std::string> universe;
    for (const auto& [machine, report] : by_machine) {
        std::vector<std::string> ids;
        ids.reserve(report.entries.size());
        for (const auto& e : report.entries)
            ids.push_back(e.solution_id);
        std::sort(ids.begin(), ids.end());
        if (universe.empty())
            universe = std::move(ids);
        else if (ids != universe)
            throw Error(Errc::mismatched_universe, "machine " + machine + " covers a different solution set");
    }

    std::vector<CrossMachineOutlier> selected;
    for (const auto& id : universe) {
        bool everywhere = true;
        bool somewhere_medium = false;
        bool direction_consistent = true;
        bool have_direction = false;
        Direction first_direction = Direction::below;
        CrossMachineOutlier candidate;
        candidate.solution_id = id;

        for (const auto& [machine, report] : by_machine) {
            const auto it = std::find_if(report.entries.begin(), report.entries.end(),
                                         [&](const OutlierEntry& e) { return e.solution_id == id; });
            candidate.tier_by_machine[machine] = it->tier;
            if (it->tier == OutlierTier::none)
                everywhere = false;
            if (it->tier == OutlierTier::medium || it->tier == OutlierTier::high)
                somewhere_medium = true;
            if (!have_direction) {
                first_direction = it->direction;
                have_direction = true;
            } else if (it->direction != first_direction) {
                direction_consistent = false;
            }
        }

        if (everywhere && somewhere_medium) {
            candidate.direction_consistent = direction_consistent;
            selected.push_back(std::move(candidate));
        }
    }
    return selected;
}

} // namespace joulemark
