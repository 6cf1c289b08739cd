#include "joulemark/cli.hpp"
#include "joulemark/errors.hpp"
#include "joulemark/stats.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <string>

namespace {

using namespace joulemark;

// "A..B" -> [A, B]
std::pair<int, int> parse_n_range(const std::string& text) {
    const auto sep = text.find("..");
    auto parse_int = [&](std::string_view s) {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw CLI::ValidationError("--n-range", "expected A..B, got \"" + text + "\"");
        return v;
    };
    if (sep == std::string::npos) {
        const int n = parse_int(text);
        return {n, n};
    }
    return {parse_int(std::string_view(text).substr(0, sep)),
            parse_int(std::string_view(text).substr(sep + 2))};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark orchestration and CPU-package energy profiling"};
    app.require_subcommand(1);

    std::string manifest;
    std::string out_dir = "out";
    std::string backend;
    int reps = 0;
    bool single_core = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool force = false;

    auto add_manifest_flags = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("--manifest", manifest, "suite manifest (JSON)")->required();
        cmd->add_option("--backend", backend, "powercap-systime|perf|synthetic");
        cmd->add_option("--reps", reps, "repetitions per solution (default 10)");
        cmd->add_flag("--single-core", single_core, "request single-core measurement");
        cmd->add_option("--seed", seed, "synthetic noise seed")->each([&](const std::string&) {
            seed_given = true;
        });
        if (with_out)
            cmd->add_option("--out", out_dir, "output directory");
    };

    auto overrides = [&]() {
        cli::ManifestOverrides o;
        if (!backend.empty())
            o.backend = backend;
        if (reps > 0)
            o.repetitions = reps;
        if (single_core)
            o.single_core = true;
        if (seed_given)
            o.seed = seed;
        return o;
    };

    // preflight
    auto* preflight = app.add_subcommand("preflight", "check the machine before measuring");
    add_manifest_flags(preflight, false);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "fit the idle-energy baseline from sleep runs");
    add_manifest_flags(calibrate, true);
    std::vector<double> durations;
    calibrate->add_option("--durations", durations, "sleep durations in ms (default 500 1000 2000 4000)");

    // measure
    auto* measure = app.add_subcommand("measure", "run the measurement suite from a manifest");
    add_manifest_flags(measure, true);
    measure->add_flag("--force", force, "measure despite preflight advisories");

    // fit
    auto* fit = app.add_subcommand("fit", "fit energy profiles per dataset group");
    std::vector<std::string> datasets;
    std::string baseline;
    std::string fit_mode = "ols";
    double spearman_threshold = 0.95;
    fit->add_option("--dataset", datasets, "measurement set JSON (repeatable)")->required();
    fit->add_option("--baseline", baseline, "idle baseline JSON to subtract first");
    fit->add_option("--fit-mode", fit_mode, "ols|wls-c|wls-tc (weighted modes are diagnostic)");
    fit->add_option("--spearman-threshold", spearman_threshold, "flag groups below this correlation");
    fit->add_option("--out", out_dir, "output directory");

    // outliers
    auto* outliers = app.add_subcommand("outliers", "classify outliers and intersect across machines");
    outliers->add_option("--dataset", datasets, "measurement set JSON (repeatable)")->required();
    outliers->add_option("--baseline", baseline, "idle baseline JSON to subtract first");
    outliers->add_option("--out", out_dir, "output directory");

    // classify
    auto* classify = app.add_subcommand("classify", "match test sets to training problems by slope");
    std::string train_profiles;
    std::vector<std::string> test_datasets;
    std::string n_range = "1..0";
    bool blind = false;
    std::string test_norm = "independent";
    std::string machine_filter;
    std::string config_filter;
    classify->add_option("--train", train_profiles, "training profiles.json")->required();
    classify->add_option("--test", test_datasets, "test measurement set JSON (repeatable)")->required();
    classify->add_option("--n-range", n_range, "success counts for n in A..B (default 1..|train|)");
    classify->add_flag("--blind", blind, "no ground truth: emit ranked candidates only");
    classify->add_option("--test-norm", test_norm, "independent|train-min");
    classify->add_option("--machine", machine_filter, "restrict training profiles to one machine");
    classify->add_option("--config", config_filter, "restrict training profiles to one config tag");
    classify->add_option("--out", out_dir, "output directory");

    // report
    auto* report = app.add_subcommand("report", "render profile reports from stored fits");
    std::string profiles;
    report->add_option("--profiles", profiles, "profiles.json from a fit run")->required();
    report->add_option("--dataset", datasets, "measurement sets for outlier counts and plots");
    report->add_option("--spearman-threshold", spearman_threshold, "flag groups below this correlation");
    report->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return cli::kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kExitUsageError;
    }

    try {
        if (preflight->parsed())
            return cli::cmd_preflight({manifest, overrides()});
        if (calibrate->parsed()) {
            cli::CalibrateOptions options{manifest, out_dir, {}, overrides()};
            if (!durations.empty())
                options.durations_ms = durations;
            else
                options.durations_ms = {500, 1000, 2000, 4000};
            return cli::cmd_calibrate(options);
        }
        if (measure->parsed())
            return cli::cmd_measure({manifest, out_dir, overrides(), force});
        if (fit->parsed()) {
            cli::FitOptions options;
            options.datasets.assign(datasets.begin(), datasets.end());
            options.out_dir = out_dir;
            if (!baseline.empty())
                options.baseline = baseline;
            options.fit_mode = fit_mode_from_string(fit_mode);
            options.spearman_threshold = spearman_threshold;
            return cli::cmd_fit(options);
        }
        if (outliers->parsed()) {
            cli::OutliersOptions options;
            options.datasets.assign(datasets.begin(), datasets.end());
            options.out_dir = out_dir;
            if (!baseline.empty())
                options.baseline = baseline;
            return cli::cmd_outliers(options);
        }
        if (classify->parsed()) {
            cli::ClassifyOptions options;
            options.train_profiles = train_profiles;
            options.test_datasets.assign(test_datasets.begin(), test_datasets.end());
            options.out_dir = out_dir;
            auto [lo, hi] = parse_n_range(n_range);
            options.n_lo = lo;
            options.n_hi = hi;
            options.blind = blind;
            if (test_norm == "independent")
                options.normalization = cli::TestNormalization::independent;
            else if (test_norm == "train-min")
                options.normalization = cli::TestNormalization::train_min;
            else
                throw Error(Errc::invalid_argument, "--test-norm must be independent or train-min");
            if (!machine_filter.empty())
                options.machine_filter = machine_filter;
            if (!config_filter.empty())
                options.config_filter = config_filter;
            return cli::cmd_classify(options);
        }
        if (report->parsed()) {
            cli::ReportOptions options;
            options.profiles = profiles;
            options.datasets.assign(datasets.begin(), datasets.end());
            options.out_dir = out_dir;
            options.spearman_threshold = spearman_threshold;
            return cli::cmd_report(options);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return cli::kExitUsageError;
    } catch (const Error& e) {
        std::cerr << "{\"error\":\"" << errc_name(e.code()) << "\",\"message\":\"" << e.what() << "\"}\n";
        return cli::kExitDomainError;
    }
    return cli::kExitUsageError;
}
