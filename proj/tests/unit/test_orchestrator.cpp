#include "joulemark/orchestrator.hpp"

#include "helpers.hpp"
#include "joulemark/errors.hpp"
#include "joulemark/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace joulemark;
using testutil::TempDir;

namespace {

RunSample sample_with_energy(double energy, int run_index) {
    RunSample s;
    s.energy_j = energy;
    s.cpu_ms = energy * 100; // keep t distinct but correlated
    s.wall_ms = s.cpu_ms + 1;
    s.run_index = run_index;
    return s;
}

std::vector<RunSample> samples_from_energies(const std::vector<double>& energies) {
    std::vector<RunSample> out;
    for (std::size_t i = 0; i < energies.size(); ++i)
        out.push_back(sample_with_energy(energies[i], static_cast<int>(i)));
    return out;
}

SyntheticModel suite_model() {
    SyntheticModel model;
    model.active_power_w = 10;
    model.idle_power_w = 0;
    model.noise_rel = 0;
    model.seed = 7;
    model.cpu_ms = {{"s1::in", 100.0}, {"s2::in", 200.0}, {"s3::in", 300.0}};
    return model;
}

} // namespace

TEST_CASE("config_tag combines flag, core mode and backend") {
    RunConfig config;
    config.flag_tag = "O2";
    config.single_core = true;
    config.backend = BackendKind::synthetic;
    CHECK(config_tag(config) == "O2:single:synthetic");
    config.single_core = false;
    config.flag_tag.clear();
    CHECK(config_tag(config) == "noflag:multi:synthetic");
}

TEST_CASE("parse_cpu_list expands ranges and singletons") {
    CHECK(parse_cpu_list("0-3") == std::vector<int>{0, 1, 2, 3});
    CHECK(parse_cpu_list("0,2-3") == std::vector<int>{0, 2, 3});
    CHECK(parse_cpu_list("5") == std::vector<int>{5});
    CHECK_THROWS_AS(parse_cpu_list("0-x"), Error);
}

TEST_CASE("preflight is empty when everything is satisfied") {
    RunConfig config;
    config.backend = BackendKind::synthetic;
    SystemProbePaths paths;
    CHECK(preflight_check(config, paths).empty());
}

TEST_CASE("preflight blocks on an unreadable energy counter") {
    TempDir dir;
    RunConfig config;
    config.backend = BackendKind::powercap_systime;
    config.require_unlimited_stack = false;
    SystemProbePaths paths;
    paths.powercap_domain = dir / "absent";
    const auto findings = preflight_check(config, paths);
    const auto blocker = std::find_if(findings.begin(), findings.end(), [](const PreflightFinding& f) {
        return f.code == "energy-counter";
    });
    REQUIRE(blocker != findings.end());
    CHECK(blocker->severity == PreflightFinding::Severity::blocker);
    CHECK(blocker->message.find("energy counter unreadable") != std::string::npos);
}

TEST_CASE("preflight lists the exact offline commands for a single-core request") {
    TempDir dir;
    std::filesystem::create_directories(dir.path() / "cpu");
    testutil::write_file(dir.path() / "cpu" / "online", "0-3\n");

    RunConfig config;
    config.backend = BackendKind::synthetic;
    config.single_core = true;
    SystemProbePaths paths;
    paths.cpu_sysfs_root = dir.path() / "cpu";

    const auto findings = preflight_check(config, paths);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].severity == PreflightFinding::Severity::advisory);
    for (int n : {1, 2, 3})
        CHECK(findings[0].remedy.find("echo 0 > /sys/devices/system/cpu/cpu" + std::to_string(n) +
                                      "/online") != std::string::npos);
    CHECK(findings[0].remedy.find("cpu0/online") == std::string::npos);
}

TEST_CASE("preflight passes a single-core request on a one-core box") {
    TempDir dir;
    std::filesystem::create_directories(dir.path() / "cpu");
    testutil::write_file(dir.path() / "cpu" / "online", "0\n");

    RunConfig config;
    config.backend = BackendKind::synthetic;
    config.single_core = true;
    SystemProbePaths paths;
    paths.cpu_sysfs_root = dir.path() / "cpu";
    CHECK(preflight_check(config, paths).empty());
}

TEST_CASE("run_solution produces one deterministic sample per repetition") {
    SyntheticBackend backend(suite_model());
    SolutionSpec solution{"s1", "s1", "cpp", "O2"};
    ProblemSpec problem{"p", {"in"}, ""};
    RunConfig config;
    config.repetitions = 10;

    const auto first = run_solution(backend, solution, problem, config);
    const auto second = run_solution(backend, solution, problem, config);
    REQUIRE(first.size() == 10);
    CHECK(first == second);
    for (int i = 0; i < 10; ++i)
        CHECK(first[static_cast<std::size_t>(i)].run_index == i);
}

TEST_CASE("run_solution rejects repetitions that cannot survive trimming") {
    SyntheticBackend backend(suite_model());
    SolutionSpec solution{"s1", "s1", "cpp", "O2"};
    ProblemSpec problem{"p", {"in"}, ""};
    RunConfig config;
    config.repetitions = 2;
    try {
        run_solution(backend, solution, problem, config);
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_argument);
    }
}

namespace {

class FailingBackend final : public MeasureBackend {
public:
    explicit FailingBackend(int failing_run) : failing_run_(failing_run) {}
    RunSample measure(const SolutionSpec&, const std::vector<std::string>&, int run_index) override {
        if (run_index == failing_run_)
            throw Error(Errc::non_zero_exit, "exit 1");
        return sample_with_energy(1.0, run_index);
    }
    double measure_sleep(double) override { return 0; }
    BackendKind kind() const noexcept override { return BackendKind::synthetic; }

private:
    int failing_run_;
};

} // namespace

TEST_CASE("backend failures are annotated with the run index") {
    FailingBackend backend(4);
    SolutionSpec solution{"s1", "s1", "cpp", "O2"};
    ProblemSpec problem{"p", {"in"}, ""};
    RunConfig config;
    try {
        run_solution(backend, solution, problem, config);
        FAIL("expected NonZeroExit");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_zero_exit);
        CHECK(std::string(e.what()).find("run_index 4") != std::string::npos);
    }
}

TEST_CASE("trim drops the top and bottom energy runs") {
    const auto m = trim_and_aggregate(samples_from_energies({5, 1, 9, 5, 5, 5, 5, 5, 5, 5}));
    CHECK(m.c_mean_j == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(m.c_sd_j == 0.0);
    CHECK(m.kept_runs == 8);
}

TEST_CASE("trimming identical samples keeps the shared value with zero spread") {
    const auto m = trim_and_aggregate(samples_from_energies(std::vector<double>(10, 3.25)));
    CHECK(m.c_mean_j == 3.25);
    CHECK(m.c_sd_j == 0.0);
    CHECK(m.kept_runs == 8);
}

TEST_CASE("trim of 1..10 leaves mean 5.5 and sd sqrt(6)") {
    const auto m = trim_and_aggregate(samples_from_energies({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
    CHECK(m.c_mean_j == doctest::Approx(5.5).epsilon(1e-12));
    CHECK(m.c_sd_j == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
    CHECK(m.kept_runs == 8);
}

TEST_CASE("trim requires at least 3 samples") {
    try {
        trim_and_aggregate(samples_from_energies({1, 2}));
        FAIL("expected TooFewSamples");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::too_few_samples);
    }
}

TEST_CASE("trimmed means stay inside the kept range and order does not matter") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.1, 50.0);
    for (int round = 0; round < 200; ++round) {
        const std::size_t n = 3 + rng() % 10;
        std::vector<double> energies(n);
        for (auto& e : energies)
            e = dist(rng);
        auto samples = samples_from_energies(energies);
        const auto m = trim_and_aggregate(samples);
        CHECK(m.kept_runs == static_cast<int>(n) - 2);

        std::vector<double> sorted = energies;
        std::sort(sorted.begin(), sorted.end());
        const std::vector<double> kept(sorted.begin() + 1, sorted.end() - 1);
        CHECK(m.c_mean_j >= *std::min_element(kept.begin(), kept.end()) - 1e-12);
        CHECK(m.c_mean_j <= *std::max_element(kept.begin(), kept.end()) + 1e-12);

        std::shuffle(samples.begin(), samples.end(), rng);
        const auto permuted = trim_and_aggregate(samples);
        CHECK(permuted.c_mean_j == doctest::Approx(m.c_mean_j).epsilon(1e-12));
        CHECK(permuted.c_sd_j == doctest::Approx(m.c_sd_j).epsilon(1e-12));
        CHECK(permuted.t_mean_ms == doctest::Approx(m.t_mean_ms).epsilon(1e-12));
    }
}

TEST_CASE("a suite records failures and keeps going") {
    SyntheticModel model = suite_model();
    // s2 has no cpu entry -> UnknownInput
    model.cpu_ms.erase("s2::in");
    SyntheticBackend backend(model);

    MachineDescriptor machine{"M1", "test cpu", 4, ""};
    ProblemSpec problem{"p", {"in"}, ""};
    std::vector<SolutionSpec> solutions = {{"s1", "s1", "cpp", "O2"},
                                           {"s2", "s2", "cpp", "O2"},
                                           {"s3", "s3", "cpp", "O2"}};
    RunConfig config;
    config.flag_tag = "O2";

    const SuiteResult result = run_problem_suite(backend, machine, problem, solutions, config);
    CHECK(result.set.measurements.size() == 2);
    REQUIRE(result.set.failures.size() == 1);
    CHECK(result.set.failures[0].solution_id == "s2");
    CHECK(result.set.machine == "M1");
    CHECK(result.set.config_tag == "O2:multi:synthetic");
    CHECK(result.samples.size() == 20); // 10 reps x 2 successful solutions
    // synthetic runs record a fixed zero start time
    for (const auto& [id, started] : result.solution_start_unix_ms)
        CHECK(started == 0);
}

TEST_CASE("zero-noise suites have zero spread everywhere") {
    SyntheticBackend backend(suite_model());
    MachineDescriptor machine{"M1", "", 4, ""};
    ProblemSpec problem{"p", {"in"}, ""};
    std::vector<SolutionSpec> solutions = {{"s1", "s1", "cpp", "O2"}, {"s2", "s2", "cpp", "O2"}};
    RunConfig config;

    const SuiteResult result = run_problem_suite(backend, machine, problem, solutions, config);
    REQUIRE(result.set.measurements.size() == 2);
    for (const auto& m : result.set.measurements) {
        CHECK(m.c_sd_j == 0.0);
        CHECK(m.t_sd_ms == 0.0);
    }
}

TEST_CASE("wall/cpu discrepancies beyond the threshold are listed") {
    std::vector<SampleRecord> records;
    RunSample ok;
    ok.wall_ms = 105;
    ok.cpu_ms = 100;
    records.push_back({"p", "s1", "m", "c", ok});
    RunSample bad;
    bad.wall_ms = 160;
    bad.cpu_ms = 100;
    bad.run_index = 3;
    records.push_back({"p", "s2", "m", "c", bad});

    const auto entries = wall_cpu_discrepancies(records, 10.0);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].solution_id == "s2");
    CHECK(entries[0].run_index == 3);
    CHECK(entries[0].gap_ms == doctest::Approx(60.0));
}
