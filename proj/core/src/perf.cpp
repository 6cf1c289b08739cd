#include "joulemark/perf.hpp"

#include "joulemark/errors.hpp"
#include "joulemark/process.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace joulemark {

namespace {

constexpr const char* kEnergyEvent = "power/energy-pkg/";
constexpr const char* kUserEvent = "user_time";
constexpr const char* kSystemEvent = "system_time";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ';') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

bool parse_value(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last && !text.empty();
}

struct TempFile {
    TempFile() {
        char pattern[] = "/tmp/joulemark-perf-XXXXXX";
        int fd = ::mkstemp(pattern);
        if (fd < 0)
            throw Error(Errc::io_failure, "cannot create temporary file");
        ::close(fd);
        path = pattern;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    std::filesystem::path path;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool known_seconds_unit(const std::string& unit) {
    return unit.empty() || unit == "seconds" || unit == "sec" || unit == "s" || unit == "cpu-seconds";
}

} // namespace

PerfCounters parse_perf_output(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(Errc::parse_failure, "empty perf output");

    PerfCounters out;
    bool have_energy = false;
    bool have_user = false;
    bool have_system = false;

    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#')
            continue;

        const auto fields = split_fields(line);
        const auto is_event = [&](const char* name) {
            return std::find(fields.begin(), fields.end(), name) != fields.end();
        };

        const char* event = nullptr;
        if (is_event(kEnergyEvent))
            event = kEnergyEvent;
        else if (is_event(kUserEvent))
            event = kUserEvent;
        else if (is_event(kSystemEvent))
            event = kSystemEvent;
        if (event == nullptr)
            continue; // some other event or solution noise on stderr

        const std::string& value = fields[0];
        if (value == "<not supported>" || value == "<not counted>")
            throw Error(Errc::parse_failure,
                        "line " + std::to_string(line_no) + ": unsupported event " + event);
        double parsed = 0;
        if (!parse_value(value, parsed))
            throw Error(Errc::parse_failure, "line " + std::to_string(line_no) + ": malformed value \"" +
                                                 value + "\" for " + event);
        const std::string unit = fields.size() > 1 ? fields[1] : std::string();

        if (event == kEnergyEvent) {
            out.energy_j = parsed;
            out.energy_unit = unit;
            have_energy = true;
        } else if (event == kUserEvent) {
            out.user_s = parsed;
            out.user_unit = unit;
            have_user = true;
        } else {
            out.system_s = parsed;
            out.system_unit = unit;
            have_system = true;
        }
    }

    if (!have_energy)
        throw Error(Errc::parse_failure, std::string("missing event ") + kEnergyEvent);
    if (!have_user)
        throw Error(Errc::parse_failure, std::string("missing event ") + kUserEvent);
    if (!have_system)
        throw Error(Errc::parse_failure, std::string("missing event ") + kSystemEvent);
    return out;
}

std::string perf_command(const std::string& perf_binary, const std::string& command, const std::string& input) {
    return perf_binary + " stat -x ';' -e power/energy-pkg/,user_time,system_time --all-cpus " + command +
           " < " + input;
}

bool perf_available(const std::string& perf_binary) {
    ShellResult probe = run_shell("command -v " + perf_binary + " > /dev/null 2>&1", 10);
    return !probe.timed_out && probe.exit_code == 0;
}

RunSample measure_command_perf(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                               const PerfOptions& options, int run_index, std::vector<std::string>* warnings) {
    if (inputs.empty())
        throw Error(Errc::invalid_argument, "at least one input is required");
    if (!perf_available(options.perf_binary))
        throw Error(Errc::perf_unavailable, "cannot run " + options.perf_binary);

    RunSample sample;
    sample.run_index = run_index;

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        TempFile stats;
        // Solution stdout is discarded; perf reports land on stderr.
        const std::string cmd = perf_command(options.perf_binary, solution.command_template, inputs[i]) +
                                " > /dev/null 2> " + stats.path.string();
        ShellResult run = run_shell(cmd, options.timeout_s);
        if (run.timed_out)
            throw Error(Errc::timeout, "wall cap of " + std::to_string(options.timeout_s) +
                                           " s exceeded at input index " + std::to_string(i + 1));
        if (run.exit_code != 0)
            throw Error(Errc::non_zero_exit, "\"" + solution.command_template + "\" failed at input index " +
                                                 std::to_string(i + 1) + " (exit " +
                                                 std::to_string(run.exit_code) + ")");

        PerfCounters counters = parse_perf_output(read_file(stats.path));
        if (warnings != nullptr) {
            if (!known_seconds_unit(counters.user_unit))
                warnings->push_back("unknown user_time unit \"" + counters.user_unit + "\", assuming seconds");
            if (!known_seconds_unit(counters.system_unit))
                warnings->push_back("unknown system_time unit \"" + counters.system_unit +
                                    "\", assuming seconds");
        }
        sample.energy_j += counters.energy_j;
        sample.cpu_ms += (counters.user_s + counters.system_s) * 1000.0;
        sample.wall_ms += run.wall_ms;
    }
    return sample;
}

RunSample PerfStatBackend::measure(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                                   int run_index) {
    std::vector<std::string> notes;
    RunSample sample = measure_command_perf(solution, inputs, options_, run_index, &notes);
    for (auto& note : notes)
        warn(std::move(note));
    return sample;
}

double PerfStatBackend::measure_sleep(double duration_ms) {
    if (duration_ms < 0)
        throw Error(Errc::invalid_argument, "negative sleep duration");
    SolutionSpec sleeper;
    sleeper.solution_id = "<sleep>";
    sleeper.command_template = "sleep " + std::to_string(duration_ms / 1000.0);
    RunSample sample = measure_command_perf(sleeper, {"/dev/null"}, options_, 0, nullptr);
    return sample.energy_j;
}

} // namespace joulemark
