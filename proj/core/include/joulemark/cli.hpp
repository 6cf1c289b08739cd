#pragma once

#include "joulemark/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace joulemark::cli {

/// Exit code contract shared by every subcommand: 0 success, 1 domain error,
/// 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

/// Manifest-level overrides from the command line.
struct ManifestOverrides {
    std::optional<std::string> backend;
    std::optional<int> repetitions;
    std::optional<bool> single_core;
    std::optional<std::uint64_t> seed;
};

struct PreflightOptions {
    std::filesystem::path manifest;
    ManifestOverrides overrides;
};

struct CalibrateOptions {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    std::vector<double> durations_ms = {500, 1000, 2000, 4000};
    ManifestOverrides overrides;
};

struct MeasureOptions {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    ManifestOverrides overrides;
    bool force = false; // proceed past advisories (never past blockers)
};

struct FitOptions {
    std::vector<std::filesystem::path> datasets;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> baseline;
    FitMode fit_mode = FitMode::ols;
    double spearman_threshold = 0.95;
    bool emit_svg = true;
};

struct OutliersOptions {
    std::vector<std::filesystem::path> datasets;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> baseline;
};

enum class TestNormalization {
    independent, // each table normalized on its own minimum
    train_min,   // test slopes scaled by the training minimum instead
};

struct ClassifyOptions {
    std::filesystem::path train_profiles;
    std::vector<std::filesystem::path> test_datasets;
    std::filesystem::path out_dir;
    int n_lo = 1;
    int n_hi = 0; // 0: up to |train|
    bool blind = false;
    TestNormalization normalization = TestNormalization::independent;
    std::optional<std::string> machine_filter;
    std::optional<std::string> config_filter;
};

struct ReportOptions {
    std::filesystem::path profiles;
    std::vector<std::filesystem::path> datasets; // optional, enables outlier counts and SVGs
    std::filesystem::path out_dir;
    double spearman_threshold = 0.95;
};

int cmd_preflight(const PreflightOptions& options);
int cmd_calibrate(const CalibrateOptions& options);
int cmd_measure(const MeasureOptions& options);
int cmd_fit(const FitOptions& options);
int cmd_outliers(const OutliersOptions& options);
int cmd_classify(const ClassifyOptions& options);
int cmd_report(const ReportOptions& options);

} // namespace joulemark::cli
