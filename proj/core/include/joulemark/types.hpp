#pragma once

#include <string>
#include <vector>

namespace joulemark {

/// One measurement host. `id` is the key used across datasets and reports.
struct MachineDescriptor {
    std::string id;
    std::string cpu_label;
    int core_count = 1;
    std::string notes;

    bool operator==(const MachineDescriptor&) const = default;
};

/// A benchmark task: solutions are run against every input, in order.
struct ProblemSpec {
    std::string problem_id;
    std::vector<std::string> input_paths;
    std::string category;

    bool operator==(const ProblemSpec&) const = default;
};

/// One program under measurement. The command gets each input on stdin;
/// `flag_tag` carries the compilation-flag label the dataset is grouped by.
struct SolutionSpec {
    std::string solution_id;
    std::string command_template;
    std::string language_tag;
    std::string flag_tag;

    bool operator==(const SolutionSpec&) const = default;
};

/// One execution covering all inputs of a problem.
/// cpu_ms is user + system time summed over the inputs.
struct RunSample {
    double wall_ms = 0;
    double cpu_ms = 0;
    double energy_j = 0;
    int run_index = 0;

    bool operator==(const RunSample&) const = default;
};

/// Trimmed aggregate of one solution's repetitions. t refers to CPU time,
/// c to package energy; the SDs are sample standard deviations over the
/// kept runs. wall_mean_ms is kept for idle-baseline removal and for the
/// wall-vs-CPU discrepancy report.
struct SolutionMeasurement {
    std::string solution_id;
    double t_mean_ms = 0;
    double c_mean_j = 0;
    double t_sd_ms = 0;
    double c_sd_j = 0;
    double wall_mean_ms = 0;
    int kept_runs = 0;
    bool baseline_adjusted = false;

    bool operator==(const SolutionMeasurement&) const = default;
};

/// A solution that produced no valid measurement; the suite continues past it.
struct SolutionFailure {
    std::string solution_id;
    std::string error;

    bool operator==(const SolutionFailure&) const = default;
};

/// All measurements of one (problem, machine, config) group. Sets with
/// recorded failures are partial but still usable.
struct MeasurementSet {
    std::string machine;
    std::string problem_id;
    std::string config_tag;
    std::vector<SolutionMeasurement> measurements;
    std::vector<SolutionFailure> failures;

    bool operator==(const MeasurementSet&) const = default;
};

/// Checks every domain invariant of a set and returns one entry per
/// violation, deterministically ordered. An empty result means valid;
/// violations are data for the caller, not errors.
std::vector<std::string> validate_dataset(const MeasurementSet& set);

} // namespace joulemark
