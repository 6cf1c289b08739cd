#pragma once

#include "joulemark/backend.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace joulemark {

/// Deterministic stand-in for a machine with a fixed power draw. CPU cost per
/// execution comes from the cpu_ms table, keyed either "<command>::<input>"
/// (looked up first, lets solutions differ on shared inputs) or plain
/// "<input>". Energy is (active + idle power) x wall time, perturbed by a
/// multiplicative noise term drawn reproducibly from (seed, command, input,
/// run index).
struct SyntheticModel {
    double active_power_w = 10.0;
    double idle_power_w = 0.0;
    std::map<std::string, double> cpu_ms;
    double noise_rel = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const SyntheticModel&) const = default;
};

/// CPU cost for one (command, input) pair. Throws UnknownInput when neither
/// key form is present.
double synthetic_cpu_ms(const SyntheticModel& model, const std::string& command, const std::string& input);

/// One synthetic execution: wall time equals CPU time, energy follows the
/// model. Identical (model, command, input, run_index) yields an identical
/// sample.
RunSample synthetic_measure(const SyntheticModel& model, const std::string& command, const std::string& input,
                            int run_index);

class SyntheticBackend final : public MeasureBackend {
public:
    explicit SyntheticBackend(SyntheticModel model) : model_(std::move(model)) {}

    RunSample measure(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                      int run_index) override;
    double measure_sleep(double duration_ms) override;
    BackendKind kind() const noexcept override { return BackendKind::synthetic; }

    const SyntheticModel& model() const noexcept { return model_; }

private:
    SyntheticModel model_;
};

} // namespace joulemark
