#pragma once

#include "joulemark/backend.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace joulemark {

struct SystimeOptions {
    std::filesystem::path powercap_domain;
    double timeout_s = 60;
    bool discard_output = true;
};

/// Shell chain running the command once per input, stdin-redirected, joined
/// by &&: `<cmd> < <in> > /dev/null 2>&1 && ...`.
std::string systime_command_chain(const std::string& command, const std::vector<std::string>& inputs,
                                  bool discard_output);

/// Same chain with each link wrapped in the shell time builtin, its report
/// appended to tmpfile: `{time <cmd> < <in> > /dev/null 2>&1;} 2>> <tmpfile>`.
std::string systime_time_chain(const std::string& command, const std::vector<std::string>& inputs,
                               const std::string& tmpfile, bool discard_output);

/// Sums user+system CPU milliseconds from the accumulated `time` reports.
/// Accepts both the bash keyword format (0m1.234s) and POSIX `time -p`
/// output. Throws ParseFailure when the number of reports does not match
/// expected_blocks or a line is malformed.
double parse_time_reports_cpu_ms(const std::string& text, std::size_t expected_blocks);

/// One repetition: wall time measured around the whole chain, CPU time summed
/// from the per-input time reports, energy from powercap counter snapshots
/// bracketing the chain.
RunSample measure_command_systime(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                                  const SystimeOptions& options, int run_index = 0);

class SystimeBackend final : public MeasureBackend {
public:
    explicit SystimeBackend(SystimeOptions options) : options_(std::move(options)) {}

    RunSample measure(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                      int run_index) override;
    double measure_sleep(double duration_ms) override;
    BackendKind kind() const noexcept override { return BackendKind::powercap_systime; }

private:
    SystimeOptions options_;
};

} // namespace joulemark
