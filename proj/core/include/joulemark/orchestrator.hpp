#pragma once

#include "joulemark/backend.hpp"
#include "joulemark/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace joulemark {

enum class TrimPolicy {
    drop_max_min_energy,
};

/// Protocol parameters for one measurement suite. Repetitions must exceed
/// the two trimmed runs.
struct RunConfig {
    int repetitions = 10;
    TrimPolicy trim_policy = TrimPolicy::drop_max_min_energy;
    BackendKind backend = BackendKind::synthetic;
    bool single_core = false;
    std::string flag_tag;
    double timeout_s = 60;
    bool require_unlimited_stack = false;

    bool operator==(const RunConfig&) const = default;
};

/// Group label carried into datasets: "<flag>:<core-mode>:<backend>".
std::string config_tag(const RunConfig& config);

struct PreflightFinding {
    enum class Severity { advisory, blocker };
    Severity severity = Severity::advisory;
    std::string code;
    std::string message;
    std::string remedy;

    bool operator==(const PreflightFinding&) const = default;
};

/// Where preflight probes the host. Defaults target the live sysfs; tests
/// point them at fixtures.
struct SystemProbePaths {
    std::filesystem::path powercap_domain;
    std::filesystem::path cpu_sysfs_root = "/sys/devices/system/cpu";
    std::string perf_binary = "perf";
};

/// Expands a sysfs CPU list such as "0-3,5" into CPU numbers.
std::vector<int> parse_cpu_list(const std::string& text);

/// Environment checks before a suite: stack soft limit, online cores versus
/// a single-core request (with the exact offline commands to run), and
/// energy-backend availability. Read-only: findings are returned, the system
/// is never touched. An empty list means ready to measure.
std::vector<PreflightFinding> preflight_check(const RunConfig& config, const SystemProbePaths& paths);

/// Runs the configured number of repetitions back to back. Backend failures
/// are rethrown annotated with the failing run_index.
std::vector<RunSample> run_solution(MeasureBackend& backend, const SolutionSpec& solution,
                                    const ProblemSpec& problem, const RunConfig& config);

/// Drops exactly one maximal-energy and one minimal-energy sample (ties:
/// lower run_index goes) and aggregates the kept runs into means and sample
/// standard deviations. Requires >= 3 samples.
SolutionMeasurement trim_and_aggregate(const std::vector<RunSample>& samples);

/// One raw execution record as persisted to the samples CSV.
struct SampleRecord {
    std::string problem_id;
    std::string solution_id;
    std::string machine;
    std::string config_tag;
    RunSample sample;

    bool operator==(const SampleRecord&) const = default;
};

struct SuiteResult {
    MeasurementSet set;
    std::vector<SampleRecord> samples;
    std::vector<std::string> warnings;
    // Execution order and start times; synthetic runs record zero so that
    // identical inputs produce identical files.
    std::vector<std::pair<std::string, std::int64_t>> solution_start_unix_ms;
};

/// Sequential suite over one problem: every solution in dataset order, no
/// interleaving, no cooldown. Per-solution failures are recorded in the set
/// and the suite continues.
SuiteResult run_problem_suite(MeasureBackend& backend, const MachineDescriptor& machine,
                              const ProblemSpec& problem, const std::vector<SolutionSpec>& solutions,
                              const RunConfig& config);

struct DiscrepancyEntry {
    std::string solution_id;
    int run_index = 0;
    double gap_ms = 0;

    bool operator==(const DiscrepancyEntry&) const = default;
};

/// Runs whose wall and CPU times disagree by more than threshold_ms; large
/// gaps point at environment problems (stack limits, unsupported
/// instructions) rather than measurement noise.
std::vector<DiscrepancyEntry> wall_cpu_discrepancies(const std::vector<SampleRecord>& samples,
                                                     double threshold_ms = 10.0);

} // namespace joulemark
