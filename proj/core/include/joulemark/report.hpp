#pragma once

#include "joulemark/io.hpp"
#include "joulemark/stats.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace joulemark {

/// Outlier classification of one fitted group.
struct GroupOutliers {
    std::string problem_id;
    std::string machine;
    std::string config_tag;
    OutlierReport report;

    bool operator==(const GroupOutliers&) const = default;
};

inline constexpr double kSpearmanFlagThreshold = 0.95;

/// Writes profile_report.csv and profile_report.json under `dir`: one row
/// per (problem, machine, config) group with slope, sigma_e, Spearman and
/// outlier tier counts. Groups whose Spearman falls below the threshold are
/// flagged. Output is deterministic: fixed ordering and float formatting.
void write_profile_report(const std::vector<ProfileRecord>& profiles,
                          const std::vector<GroupOutliers>& outliers, const std::filesystem::path& dir,
                          double spearman_flag_threshold = kSpearmanFlagThreshold);

void write_outlier_report_json(const std::vector<GroupOutliers>& outliers, const std::filesystem::path& path);

void write_cross_machine_json(const std::vector<CrossMachineOutlier>& selected,
                              const std::filesystem::path& path);

/// Scatter of (CPU time, energy) points with the fitted origin line, a
/// dashed band at +/-2 sigma_e, and +/-c_sd error bars on flagged outliers.
/// SVG 1.1, deterministic bytes for identical inputs.
void emit_scatter_svg(const std::vector<ProfilePoint>& points, const ProblemProfile& profile,
                      const OutlierReport& outliers, const std::string& title,
                      const std::filesystem::path& path);

} // namespace joulemark
