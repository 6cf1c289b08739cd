#pragma once

#include "joulemark/backend.hpp"

#include <string>
#include <vector>

namespace joulemark {

/// Values extracted from one field-separated `perf stat` run. Unit fields are
/// recorded verbatim; time events are nominally seconds and the measuring
/// layer flags anything else.
struct PerfCounters {
    double energy_j = 0;
    double user_s = 0;
    double system_s = 0;
    std::string energy_unit;
    std::string user_unit;
    std::string system_unit;

    bool operator==(const PerfCounters&) const = default;
};

/// Parses the stderr stream of `perf stat -x ';'` run with the package-energy,
/// user-time and system-time events. Field 1 is the value; the line is keyed
/// by whichever field carries the event name. Comment lines starting with '#'
/// and lines for other events are ignored. Throws ParseFailure (with a line
/// number where applicable) on sentinel values, malformed numbers, or any of
/// the three events missing -- never a silent zero.
PerfCounters parse_perf_output(const std::string& text);

/// The exact invocation used per input:
/// `perf stat -x ';' -e power/energy-pkg/,user_time,system_time --all-cpus <cmd> < <input>`.
std::string perf_command(const std::string& perf_binary, const std::string& command, const std::string& input);

struct PerfOptions {
    std::string perf_binary = "perf";
    double timeout_s = 60;
};

/// Cheap availability probe (`perf --version`).
bool perf_available(const std::string& perf_binary);

/// One repetition: the stat tool runs once per input; per-input samples are
/// summed so a repetition covers all inputs. Throws PerfUnavailable when the
/// tool cannot run at all.
RunSample measure_command_perf(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                               const PerfOptions& options, int run_index = 0,
                               std::vector<std::string>* warnings = nullptr);

class PerfStatBackend final : public MeasureBackend {
public:
    explicit PerfStatBackend(PerfOptions options) : options_(std::move(options)) {}

    RunSample measure(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                      int run_index) override;
    double measure_sleep(double duration_ms) override;
    BackendKind kind() const noexcept override { return BackendKind::perf; }

private:
    PerfOptions options_;
};

} // namespace joulemark
