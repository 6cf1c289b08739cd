#include "joulemark/systime.hpp"

#include "joulemark/errors.hpp"
#include "joulemark/powercap.hpp"
#include "joulemark/process.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

namespace joulemark {

namespace {

std::string one_run(const std::string& command, const std::string& input, bool discard_output) {
    std::string run = command + " < " + input;
    if (discard_output)
        run += " > /dev/null 2>&1";
    return run;
}

class TempFile {
public:
    TempFile() {
        char pattern[] = "/tmp/joulemark-time-XXXXXX";
        int fd = ::mkstemp(pattern);
        if (fd < 0)
            throw Error(Errc::io_failure, "cannot create temporary file");
        ::close(fd);
        path_ = pattern;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// "0m1.234s", "1.234s" or "1.23" -> seconds.
bool parse_duration_s(std::string_view text, double& out) {
    double minutes = 0;
    if (auto m = text.find('m'); m != std::string_view::npos) {
        auto [p, ec] = std::from_chars(text.data(), text.data() + m, minutes);
        if (ec != std::errc{} || p != text.data() + m)
            return false;
        text.remove_prefix(m + 1);
    }
    if (!text.empty() && text.back() == 's')
        text.remove_suffix(1);
    double seconds = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), seconds);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
        return false;
    out = minutes * 60 + seconds;
    return true;
}

int locate_failing_input(const std::string& command, const std::vector<std::string>& inputs, double timeout_s) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        ShellResult probe = run_shell(one_run(command, inputs[i], true), timeout_s);
        if (probe.timed_out || probe.exit_code != 0)
            return static_cast<int>(i) + 1;
    }
    return 0; // transient failure, cannot attribute
}

} // namespace

std::string systime_command_chain(const std::string& command, const std::vector<std::string>& inputs,
                                  bool discard_output) {
    std::string chain;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i > 0)
            chain += " && ";
        chain += one_run(command, inputs[i], discard_output);
    }
    return chain;
}

std::string systime_time_chain(const std::string& command, const std::vector<std::string>& inputs,
                               const std::string& tmpfile, bool discard_output) {
    std::string chain;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i > 0)
            chain += " && ";
        chain += "{time " + one_run(command, inputs[i], discard_output) + ";} 2>> " + tmpfile;
    }
    return chain;
}

double parse_time_reports_cpu_ms(const std::string& text, std::size_t expected_blocks) {
    std::istringstream lines(text);
    std::string line;
    double user_s = 0;
    double sys_s = 0;
    std::size_t user_count = 0;
    std::size_t sys_count = 0;
    std::size_t line_no = 0;

    while (std::getline(lines, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string key, value;
        fields >> key >> value;
        if (key != "user" && key != "sys")
            continue;
        double seconds = 0;
        if (!parse_duration_s(value, seconds))
            throw Error(Errc::parse_failure,
                        "line " + std::to_string(line_no) + ": malformed time value \"" + value + "\"");
        if (key == "user") {
            user_s += seconds;
            ++user_count;
        } else {
            sys_s += seconds;
            ++sys_count;
        }
    }

    if (user_count != expected_blocks || sys_count != expected_blocks)
        throw Error(Errc::parse_failure, "expected " + std::to_string(expected_blocks) + " time reports, found " +
                                             std::to_string(user_count) + " user / " + std::to_string(sys_count) +
                                             " sys lines");
    return (user_s + sys_s) * 1000.0;
}

RunSample measure_command_systime(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                                  const SystimeOptions& options, int run_index) {
    if (inputs.empty())
        throw Error(Errc::invalid_argument, "at least one input is required");

    TempFile times;
    const std::string chain =
        systime_time_chain(solution.command_template, inputs, times.path().string(), options.discard_output);

    CounterSnapshot before = read_package_energy(options.powercap_domain);
    ShellResult run = run_shell(chain, options.timeout_s);
    CounterSnapshot after = read_package_energy(options.powercap_domain);

    if (run.timed_out)
        throw Error(Errc::timeout, "wall cap of " + std::to_string(options.timeout_s) + " s exceeded by \"" +
                                       solution.command_template + "\"");
    if (run.exit_code != 0) {
        int failing = locate_failing_input(solution.command_template, inputs, options.timeout_s);
        std::string where = failing > 0 ? "input index " + std::to_string(failing)
                                        : "undetermined input";
        throw Error(Errc::non_zero_exit, "\"" + solution.command_template + "\" failed at " + where + " (exit " +
                                             std::to_string(run.exit_code) + ")");
    }

    RunSample sample;
    sample.run_index = run_index;
    sample.wall_ms = run.wall_ms;
    sample.cpu_ms = parse_time_reports_cpu_ms(read_file(times.path()), inputs.size());
    sample.energy_j = counter_delta(before, after);
    return sample;
}

RunSample SystimeBackend::measure(const SolutionSpec& solution, const std::vector<std::string>& inputs,
                                  int run_index) {
    return measure_command_systime(solution, inputs, options_, run_index);
}

double SystimeBackend::measure_sleep(double duration_ms) {
    if (duration_ms < 0)
        throw Error(Errc::invalid_argument, "negative sleep duration");
    CounterSnapshot before = read_package_energy(options_.powercap_domain);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(duration_ms));
    CounterSnapshot after = read_package_energy(options_.powercap_domain);
    return counter_delta(before, after);
}

} // namespace joulemark
