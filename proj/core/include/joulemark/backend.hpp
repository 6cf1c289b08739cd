#pragma once

#include "joulemark/types.hpp"

#include <string>
#include <vector>

namespace joulemark {

enum class BackendKind {
    powercap_systime,
    perf,
    synthetic,
};

const char* to_string(BackendKind kind) noexcept;
BackendKind backend_from_string(const std::string& name);

/// A measurement backend executes one repetition of a solution over all
/// inputs of a problem and reports wall time, CPU time and package energy.
/// Backends are used strictly sequentially: one measured process at a time
/// owns the machine, and implementations are not reentrant.
class MeasureBackend {
public:
    virtual ~MeasureBackend() = default;

    /// One repetition covering every input in order. run_index distinguishes
    /// repetitions (the synthetic backend derives its noise from it).
    virtual RunSample measure(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                              int run_index) = 0;

    /// Energy in joules burned around a sleep of the given length. Used for
    /// idle-baseline calibration.
    virtual double measure_sleep(double duration_ms) = 0;

    virtual BackendKind kind() const noexcept = 0;

    /// Non-fatal observations accumulated since the last drain (e.g. unknown
    /// counter units). The orchestrator collects these into suite results.
    std::vector<std::string> drain_warnings() {
        std::vector<std::string> out;
        out.swap(warnings_);
        return out;
    }

protected:
    void warn(std::string message) { warnings_.push_back(std::move(message)); }

private:
    std::vector<std::string> warnings_;
};

} // namespace joulemark
