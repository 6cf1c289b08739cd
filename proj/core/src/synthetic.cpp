#include "joulemark/synthetic.hpp"

#include "joulemark/errors.hpp"

#include <random>

namespace joulemark {

namespace {

// FNV-1a, then splitmix finalizer. Hand-rolled so noise streams do not depend
// on the standard library's string hash.
std::uint64_t mix(std::uint64_t h, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t noise_stream(std::uint64_t seed, const std::string& command, const std::string& input,
                           int run_index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = mix(h, &seed, sizeof seed);
    h = mix(h, command.data(), command.size());
    h = mix(h, "\x1f", 1);
    h = mix(h, input.data(), input.size());
    h = mix(h, &run_index, sizeof run_index);
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

double noise_factor(const SyntheticModel& model, const std::string& command, const std::string& input,
                    int run_index) {
    if (model.noise_rel == 0)
        return 1.0;
    std::mt19937_64 rng(noise_stream(model.seed, command, input, run_index));
    std::uniform_real_distribution<double> dist(-model.noise_rel, model.noise_rel);
    return 1.0 + dist(rng);
}

} // namespace

double synthetic_cpu_ms(const SyntheticModel& model, const std::string& command, const std::string& input) {
    if (auto it = model.cpu_ms.find(command + "::" + input); it != model.cpu_ms.end())
        return it->second;
    if (auto it = model.cpu_ms.find(input); it != model.cpu_ms.end())
        return it->second;
    throw Error(Errc::unknown_input, "no cpu_ms entry for command \"" + command + "\" input \"" + input + "\"");
}

RunSample synthetic_measure(const SyntheticModel& model, const std::string& command, const std::string& input,
                            int run_index) {
    RunSample sample;
    sample.run_index = run_index;
    sample.cpu_ms = synthetic_cpu_ms(model, command, input);
    sample.wall_ms = sample.cpu_ms;
    const double power_w = model.active_power_w + model.idle_power_w;
    sample.energy_j = power_w * (sample.wall_ms / 1000.0) * noise_factor(model, command, input, run_index);
    return sample;
}

RunSample SyntheticBackend::measure(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                                    int run_index) {
    if (inputs.empty())
        throw Error(Errc::invalid_argument, "at least one input is required");
    RunSample total;
    total.run_index = run_index;
    for (const auto& input : inputs) {
        RunSample one = synthetic_measure(model_, solution.command_template, input, run_index);
        total.wall_ms += one.wall_ms;
        total.cpu_ms += one.cpu_ms;
        total.energy_j += one.energy_j;
    }
    return total;
}

double SyntheticBackend::measure_sleep(double duration_ms) {
    if (duration_ms < 0)
        throw Error(Errc::invalid_argument, "negative sleep duration");
    // A sleeping process draws idle power only.
    return model_.idle_power_w * (duration_ms / 1000.0) *
           noise_factor(model_, "<sleep>", std::to_string(duration_ms), 0);
}

} // namespace joulemark
