#include "joulemark/orchestrator.hpp"

#include "joulemark/errors.hpp"
#include "joulemark/perf.hpp"
#include "joulemark/powercap.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <sys/resource.h>

namespace joulemark {

std::string config_tag(const RunConfig& config) {
    std::string flag = config.flag_tag.empty() ? "noflag" : config.flag_tag;
    return flag + ":" + (config.single_core ? "single" : "multi") + ":" + to_string(config.backend);
}

std::vector<int> parse_cpu_list(const std::string& text) {
    std::vector<int> cpus;
    std::istringstream parts(text);
    std::string token;
    while (std::getline(parts, token, ',')) {
        while (!token.empty() && (token.back() == '\n' || token.back() == '\r' || token.back() == ' '))
            token.pop_back();
        if (token.empty())
            continue;
        const auto dash = token.find('-');
        auto parse_int = [&](std::string_view s) {
            int v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw Error(Errc::parse_failure, "malformed CPU list token: \"" + token + "\"");
            return v;
        };
        if (dash == std::string::npos) {
            cpus.push_back(parse_int(token));
        } else {
            const int lo = parse_int(std::string_view(token).substr(0, dash));
            const int hi = parse_int(std::string_view(token).substr(dash + 1));
            for (int c = lo; c <= hi; ++c)
                cpus.push_back(c);
        }
    }
    return cpus;
}

namespace {

std::vector<int> read_online_cpus(const std::filesystem::path& cpu_root) {
    std::ifstream in(cpu_root / "online");
    if (!in)
        return {};
    std::string text;
    std::getline(in, text);
    return parse_cpu_list(text);
}

} // namespace

std::vector<PreflightFinding> preflight_check(const RunConfig& config, const SystemProbePaths& paths) {
    std::vector<PreflightFinding> findings;

    if (config.repetitions < 3)
        findings.push_back({PreflightFinding::Severity::blocker, "repetitions",
                            "repetitions = " + std::to_string(config.repetitions) +
                                " but trimming removes 2 runs; need at least 3",
                            "raise --reps"});

    // Stack soft limit. Solutions that place large arrays on the stack
    // segfault under the common 8 MiB default.
    if (config.backend != BackendKind::synthetic) {
        struct rlimit limit{};
        if (::getrlimit(RLIMIT_STACK, &limit) == 0 && limit.rlim_cur != RLIM_INFINITY) {
            PreflightFinding finding;
            finding.severity = config.require_unlimited_stack ? PreflightFinding::Severity::blocker
                                                              : PreflightFinding::Severity::advisory;
            finding.code = "stack-limit";
            finding.message =
                "stack size soft limit is " + std::to_string(limit.rlim_cur / 1024) + " KiB, not unlimited";
            finding.remedy = "ulimit -s unlimited";
            findings.push_back(std::move(finding));
        }
    }

    // Online cores versus a single-core request.
    if (config.single_core) {
        const auto online = read_online_cpus(paths.cpu_sysfs_root);
        if (online.empty()) {
            findings.push_back({PreflightFinding::Severity::advisory, "single-core",
                                "cannot determine online CPUs from " + (paths.cpu_sysfs_root / "online").string(),
                                ""});
        } else if (online.size() > 1) {
            PreflightFinding finding;
            finding.severity = PreflightFinding::Severity::advisory;
            finding.code = "single-core";
            finding.message = std::to_string(online.size()) +
                              " CPUs online but single-core measurement requested";
            std::string remedy;
            for (std::size_t i = 1; i < online.size(); ++i) {
                if (!remedy.empty())
                    remedy += "\n";
                remedy += "echo 0 > /sys/devices/system/cpu/cpu" + std::to_string(online[i]) + "/online";
            }
            finding.remedy = std::move(remedy);
            findings.push_back(std::move(finding));
        }
    }

    // Energy backend availability.
    if (config.backend == BackendKind::powercap_systime) {
        try {
            read_package_energy(paths.powercap_domain);
        } catch (const Error& e) {
            findings.push_back({PreflightFinding::Severity::blocker, "energy-counter",
                                std::string("energy counter unreadable: ") + e.what(),
                                "check powercap support or set JOULEMARK_POWERCAP_ROOT"});
        }
    } else if (config.backend == BackendKind::perf) {
        if (!perf_available(paths.perf_binary)) {
            findings.push_back({PreflightFinding::Severity::blocker, "perf",
                                "perf tool unavailable: " + paths.perf_binary, "install linux-tools"});
        }
    }

    return findings;
}

std::vector<RunSample> run_solution(MeasureBackend& backend, const SolutionSpec& solution,
                                    const ProblemSpec& problem, const RunConfig& config) {
    if (config.repetitions < 3)
        throw Error(Errc::invalid_argument, "repetitions must be at least 3 (trimming removes 2 runs)");
    if (problem.input_paths.empty())
        throw Error(Errc::invalid_argument, "problem " + problem.problem_id + " has no inputs");

    std::vector<RunSample> samples;
    samples.reserve(static_cast<std::size_t>(config.repetitions));
    for (int run = 0; run < config.repetitions; ++run) {
        try {
            samples.push_back(backend.measure(solution, problem.input_paths, run));
        } catch (const Error& e) {
            throw Error(e.code(), "run_index " + std::to_string(run) + ": " + e.what());
        }
        samples.back().run_index = run;
    }
    return samples;
}

namespace {

std::size_t pick_extreme(const std::vector<RunSample>& samples, const std::vector<bool>& removed, bool maximal) {
    std::size_t best = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (removed[i])
            continue;
        if (best == samples.size()) {
            best = i;
            continue;
        }
        const double a = samples[i].energy_j;
        const double b = samples[best].energy_j;
        const bool better = maximal ? a > b : a < b;
        const bool tie_lower_index = a == b && samples[i].run_index < samples[best].run_index;
        if (better || tie_lower_index)
            best = i;
    }
    return best;
}

struct MeanSd {
    double mean = 0;
    double sd = 0;
};

MeanSd mean_sample_sd(const std::vector<double>& values) {
    MeanSd out;
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values)
            ss += (v - out.mean) * (v - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

} // namespace

SolutionMeasurement trim_and_aggregate(const std::vector<RunSample>& samples) {
    if (samples.size() < 3)
        throw Error(Errc::too_few_samples, "trimming needs at least 3 samples, got " +
                                               std::to_string(samples.size()));

    std::vector<bool> removed(samples.size(), false);
    removed[pick_extreme(samples, removed, true)] = true;
    removed[pick_extreme(samples, removed, false)] = true;

    std::vector<double> cpu;
    std::vector<double> energy;
    std::vector<double> wall;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (removed[i])
            continue;
        cpu.push_back(samples[i].cpu_ms);
        energy.push_back(samples[i].energy_j);
        wall.push_back(samples[i].wall_ms);
    }

    const MeanSd t = mean_sample_sd(cpu);
    const MeanSd c = mean_sample_sd(energy);
    const MeanSd w = mean_sample_sd(wall);

    SolutionMeasurement m;
    m.t_mean_ms = t.mean;
    m.t_sd_ms = t.sd;
    m.c_mean_j = c.mean;
    m.c_sd_j = c.sd;
    m.wall_mean_ms = w.mean;
    m.kept_runs = static_cast<int>(samples.size()) - 2;
    m.baseline_adjusted = false;
    return m;
}

SuiteResult run_problem_suite(MeasureBackend& backend, const MachineDescriptor& machine,
                              const ProblemSpec& problem, const std::vector<SolutionSpec>& solutions,
                              const RunConfig& config) {
    SuiteResult result;
    result.set.machine = machine.id;
    result.set.problem_id = problem.problem_id;
    result.set.config_tag = config_tag(config);

    const bool synthetic = backend.kind() == BackendKind::synthetic;
    for (const auto& solution : solutions) {
        const std::int64_t started =
            synthetic ? 0
                      : std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
        result.solution_start_unix_ms.emplace_back(solution.solution_id, started);
        try {
            const auto samples = run_solution(backend, solution, problem, config);
            SolutionMeasurement m = trim_and_aggregate(samples);
            m.solution_id = solution.solution_id;
            result.set.measurements.push_back(std::move(m));
            for (const auto& s : samples)
                result.samples.push_back(
                    {problem.problem_id, solution.solution_id, machine.id, result.set.config_tag, s});
        } catch (const Error& e) {
            result.set.failures.push_back({solution.solution_id, e.what()});
        }
        for (auto& w : backend.drain_warnings())
            result.warnings.push_back(solution.solution_id + ": " + w);
    }
    return result;
}

std::vector<DiscrepancyEntry> wall_cpu_discrepancies(const std::vector<SampleRecord>& samples,
                                                     double threshold_ms) {
    std::vector<DiscrepancyEntry> out;
    for (const auto& rec : samples) {
        const double gap = std::abs(rec.sample.wall_ms - rec.sample.cpu_ms);
        if (gap > threshold_ms)
            out.push_back({rec.solution_id, rec.sample.run_index, gap});
    }
    return out;
}

} // namespace joulemark
