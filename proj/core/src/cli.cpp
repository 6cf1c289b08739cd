#include "joulemark/cli.hpp"

#include "joulemark/calibration.hpp"
#include "joulemark/classifier.hpp"
#include "joulemark/errors.hpp"
#include "joulemark/io.hpp"
#include "joulemark/manifest.hpp"
#include "joulemark/orchestrator.hpp"
#include "joulemark/perf.hpp"
#include "joulemark/powercap.hpp"
#include "joulemark/report.hpp"
#include "joulemark/synthetic.hpp"
#include "joulemark/systime.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace joulemark::cli {

namespace {

using nlohmann::json;

void print_error(const Error& e) {
    json j = {{"error", errc_name(e.code())}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
}

void apply_overrides(SuiteManifest& manifest, const ManifestOverrides& overrides) {
    if (overrides.backend)
        manifest.config.backend = backend_from_string(*overrides.backend);
    if (overrides.repetitions)
        manifest.config.repetitions = *overrides.repetitions;
    if (overrides.single_core)
        manifest.config.single_core = *overrides.single_core;
    if (overrides.seed && manifest.synthetic)
        manifest.synthetic->seed = *overrides.seed;
}

std::unique_ptr<MeasureBackend> make_backend(const SuiteManifest& manifest) {
    switch (manifest.config.backend) {
    case BackendKind::synthetic:
        if (!manifest.synthetic)
            throw Error(Errc::invalid_argument, "synthetic backend selected but manifest has no model");
        return std::make_unique<SyntheticBackend>(*manifest.synthetic);
    case BackendKind::powercap_systime: {
        SystimeOptions options;
        options.powercap_domain = default_powercap_domain();
        options.timeout_s = manifest.config.timeout_s;
        return std::make_unique<SystimeBackend>(options);
    }
    case BackendKind::perf: {
        PerfOptions options;
        options.timeout_s = manifest.config.timeout_s;
        return std::make_unique<PerfStatBackend>(options);
    }
    }
    throw Error(Errc::invalid_argument, "unsupported backend");
}

// Concurrent measurement invalidates energy attribution; one lock per output
// directory guards measure and calibrate.
class MeasurementLock {
public:
    explicit MeasurementLock(const std::filesystem::path& out_dir) : path_(out_dir / "joulemark.lock") {
        std::filesystem::create_directories(out_dir);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw Error(Errc::lock_held, "another measurement appears to be running (lock file " +
                                             path_.string() + " exists)");
    }
    ~MeasurementLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }
    MeasurementLock(const MeasurementLock&) = delete;
    MeasurementLock& operator=(const MeasurementLock&) = delete;

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

std::string sanitize(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ? c
                                                                                                      : '_');
    return out;
}

void print_findings(const std::vector<PreflightFinding>& findings) {
    for (const auto& f : findings) {
        std::cout << (f.severity == PreflightFinding::Severity::blocker ? "BLOCKER " : "advisory ") << "["
                  << f.code << "] " << f.message << "\n";
        if (!f.remedy.empty()) {
            std::cout << "  remedy:\n";
            std::istringstream lines(f.remedy);
            std::string line;
            while (std::getline(lines, line))
                std::cout << "    " << line << "\n";
        }
    }
}

bool has_blockers(const std::vector<PreflightFinding>& findings) {
    return std::any_of(findings.begin(), findings.end(), [](const PreflightFinding& f) {
        return f.severity == PreflightFinding::Severity::blocker;
    });
}

struct LoadedGroup {
    MeasurementSet set;
    std::vector<std::string> baseline_warnings;
};

std::vector<LoadedGroup> load_groups(const std::vector<std::filesystem::path>& datasets,
                                     const std::optional<std::filesystem::path>& baseline_path) {
    std::optional<IdleBaseline> baseline;
    if (baseline_path)
        baseline = read_baseline_json(*baseline_path);

    std::vector<LoadedGroup> groups;
    for (const auto& path : datasets) {
        LoadedGroup group;
        group.set = read_measurement_set_json(path);
        if (baseline) {
            auto [adjusted, warnings] = subtract_baseline(group.set, *baseline);
            group.set = std::move(adjusted);
            group.baseline_warnings = std::move(warnings);
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

std::string group_label(const MeasurementSet& set) {
    return set.problem_id + "/" + set.machine + "/" + set.config_tag;
}

} // namespace

int cmd_preflight(const PreflightOptions& options) {
    try {
        SuiteManifest manifest = load_manifest(options.manifest);
        apply_overrides(manifest, options.overrides);

        SystemProbePaths paths;
        paths.powercap_domain = default_powercap_domain();
        const auto findings = preflight_check(manifest.config, paths);
        print_findings(findings);
        if (findings.empty())
            std::cout << "preflight clean\n";
        std::cout << "note: restart the machine before each problem suite; the tool does not do this\n";
        return has_blockers(findings) ? kExitDomainError : kExitOk;
    } catch (const Error& e) {
        print_error(e);
        return kExitDomainError;
    }
}

int cmd_calibrate(const CalibrateOptions& options) {
    try {
        SuiteManifest manifest = load_manifest(options.manifest);
        apply_overrides(manifest, options.overrides);

        MeasurementLock lock(options.out_dir);
        auto backend = make_backend(manifest);
        const auto samples = measure_idle(options.durations_ms, *backend);
        const IdleBaseline baseline = fit_idle_slope(samples, manifest.machine.id);

        const auto path = options.out_dir / ("baseline-" + sanitize(manifest.machine.id) + ".json");
        write_baseline_json(baseline, path);
        std::cout << "idle slope " << format_double(baseline.idle_slope_j_per_ms) << " J/ms over "
                  << baseline.sample_count << " sleep runs -> " << path.string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        print_error(e);
        return kExitDomainError;
    }
}

int cmd_measure(const MeasureOptions& options) {
    try {
        SuiteManifest manifest = load_manifest(options.manifest);
        apply_overrides(manifest, options.overrides);

        const auto violations = validate_manifest(manifest);
        if (!violations.empty()) {
            for (const auto& v : violations)
                std::cerr << "manifest: " << v << "\n";
            throw Error(Errc::invalid_argument, "manifest invalid: " + violations.front());
        }

        SystemProbePaths paths;
        paths.powercap_domain = default_powercap_domain();
        const auto findings = preflight_check(manifest.config, paths);
        print_findings(findings);
        if (has_blockers(findings))
            throw Error(Errc::invalid_argument, "preflight reported blockers");
        if (!findings.empty() && !options.force)
            throw Error(Errc::invalid_argument,
                        "preflight reported advisories; rerun with --force to measure anyway");

        MeasurementLock lock(options.out_dir);
        auto backend = make_backend(manifest);

        std::vector<SampleRecord> all_samples;
        bool any_failure = false;
        json timeline = json::array();
        for (const auto& mp : manifest.problems) {
            const SuiteResult result =
                run_problem_suite(*backend, manifest.machine, mp.problem, mp.solutions, manifest.config);

            const auto set_path =
                options.out_dir / ("measurements-" + sanitize(mp.problem.problem_id) + "-" +
                                   sanitize(result.set.config_tag) + ".json");
            write_measurement_set_json(result.set, set_path);
            std::cout << "problem " << mp.problem.problem_id << ": " << result.set.measurements.size()
                      << " solutions measured, " << result.set.failures.size() << " failed -> "
                      << set_path.string() << "\n";

            for (const auto& f : result.set.failures) {
                std::cerr << "failure: " << mp.problem.problem_id << "/" << f.solution_id << ": " << f.error
                          << "\n";
                any_failure = true;
            }
            for (const auto& w : result.warnings)
                std::cerr << "warning: " << w << "\n";
            for (const auto& d : wall_cpu_discrepancies(result.samples))
                std::cerr << "warning: wall/CPU gap " << format_double(d.gap_ms) << " ms for " << d.solution_id
                          << " run " << d.run_index << "\n";

            all_samples.insert(all_samples.end(), result.samples.begin(), result.samples.end());
            for (const auto& [solution_id, started] : result.solution_start_unix_ms)
                timeline.push_back({{"problem_id", mp.problem.problem_id},
                                    {"solution_id", solution_id},
                                    {"started_unix_ms", started}});

            const auto dataset_violations = validate_dataset(result.set);
            for (const auto& v : dataset_violations) {
                std::cerr << "invalid dataset: " << v << "\n";
                any_failure = true;
            }
        }

        write_samples_csv(all_samples, options.out_dir / "samples.csv");
        std::ofstream timeline_out(options.out_dir / "timeline.json", std::ios::binary | std::ios::trunc);
        timeline_out << timeline.dump(2) << "\n";
        std::cout << all_samples.size() << " samples -> " << (options.out_dir / "samples.csv").string()
                  << "\n";
        return any_failure ? kExitDomainError : kExitOk;
    } catch (const Error& e) {
        print_error(e);
        return kExitDomainError;
    }
}

int cmd_fit(const FitOptions& options) {
    try {
        if (options.datasets.empty())
            throw Error(Errc::invalid_argument, "no datasets given");
        std::filesystem::create_directories(options.out_dir);

        const auto groups = load_groups(options.datasets, options.baseline);
        std::vector<ProfileRecord> profiles;
        std::vector<GroupOutliers> outliers;
        std::vector<std::string> degenerate;

        for (const auto& group : groups) {
            for (const auto& w : group.baseline_warnings)
                std::cerr << "warning: " << group_label(group.set) << ": " << w << "\n";
            try {
                const auto points = to_profile_points(group.set);
                const ProblemProfile profile = options.fit_mode == FitMode::ols
                                                   ? fit_ols_origin(points)
                                                   : fit_wls_origin(points, options.fit_mode);
                profiles.push_back({group.set.problem_id, group.set.machine, group.set.config_tag, profile});
                outliers.push_back({group.set.problem_id, group.set.machine, group.set.config_tag,
                                    classify_outliers(points, profile)});
                if (options.emit_svg) {
                    const auto svg_path =
                        options.out_dir / ("scatter-" + sanitize(group.set.problem_id) + "-" +
                                           sanitize(group.set.machine) + "-" +
                                           sanitize(group.set.config_tag) + ".svg");
                    emit_scatter_svg(points, profile, outliers.back().report, group_label(group.set),
                                     svg_path);
                }
            } catch (const Error& e) {
                degenerate.push_back(group_label(group.set) + ": " + e.what());
            }
        }

        write_profiles_json(profiles, options.out_dir / "profiles.json");
        write_profile_report(profiles, outliers, options.out_dir, options.spearman_threshold);
        write_outlier_report_json(outliers, options.out_dir / "outlier_report.json");
        std::cout << profiles.size() << " groups fitted -> "
                  << (options.out_dir / "profiles.json").string() << "\n";

        if (!degenerate.empty()) {
            for (const auto& d : degenerate)
                std::cerr << "degenerate group: " << d << "\n";
            return kExitDomainError;
        }
        return kExitOk;
    } catch (const Error& e) {
        print_error(e);
        return kExitDomainError;
    }
}

int cmd_outliers(const OutliersOptions& options) {
    try {
        if (options.datasets.empty())
            throw Error(Errc::invalid_argument, "no datasets given");
        std::filesystem::create_directories(options.out_dir);

        const auto groups = load_groups(options.datasets, options.baseline);
        std::vector<GroupOutliers> outliers;
        // (problem, config) -> machine -> report, for the cross-machine pass
        std::map<std::pair<std::string, std::string>, std::map<std::string, OutlierReport>> by_group;

        for (const auto& group : groups) {
            const auto points = to_profile_points(group.set);
            const ProblemProfile profile = fit_ols_origin(points);
            OutlierReport report = classify_outliers(points, profile);
            outliers.push_back({group.set.problem_id, group.set.machine, group.set.config_tag, report});
            by_group[{group.set.problem_id, group.set.config_tag}][group.set.machine] = std::move(report);
        }

        write_outlier_report_json(outliers, options.out_dir / "outlier_report.json");

        json cross = json::array();
        for (const auto& [key, reports] : by_group) {
            if (reports.size() < 2)
                continue;
            const auto selected = cross_machine_outliers(reports);
            json entries = json::array();
            for (const auto& s : selected) {
                json tiers;
                for (const auto& [machine, tier] : s.tier_by_machine)
                    tiers[machine] = to_string(tier);
                entries.push_back({{"solution_id", s.solution_id},
                                   {"direction_consistent", s.direction_consistent},
                                   {"tier_by_machine", std::move(tiers)}});
            }
            cross.push_back({{"problem_id", key.first},
                             {"config_tag", key.second},
                             {"machines", static_cast<int>(reports.size())},
                             {"selected", std::move(entries)}});
        }
        std::ofstream cross_out(options.out_dir / "cross_machine.json", std::ios::binary | std::ios::trunc);
        cross_out << cross.dump(2) << "\n";

        std::cout << outliers.size() << " groups classified -> "
                  << (options.out_dir / "outlier_report.json").string() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        print_error(e);
        return kExitDomainError;
    }
}

int cmd_classify(const ClassifyOptions& options) {
    try {
        if (options.test_datasets.empty())
            throw Error(Errc::invalid_argument, "no test datasets given");
        std::filesystem::create_directories(options.out_dir);

        auto records = read_profiles_json(options.train_profiles);
        if (options.machine_filter)
            std::erase_if(records, [&](const ProfileRecord& r) { return r.machine != *options.machine_filter; });
        if (options.config_filter)
            std::erase_if(records,
                          [&](const ProfileRecord& r) { return r.config_tag != *options.config_filter; });
        if (records.empty())
            throw Error(Errc::invalid_argument, "no training profiles after filtering");

        std::set<std::pair<std::string, std::string>> scopes;
        for (const auto& r : records)
            scopes.insert({r.machine, r.config_tag});
        if (scopes.size() > 1) {
            std::string detail;
            for (const auto& [m, c] : scopes)
                detail += " " + m + "/" + c;
            throw Error(Errc::invalid_argument,
                        "training profiles span multiple machine/config groups:" + detail +
                            "; narrow with --machine/--config");
        }

        std::map<std::string, double> train_slopes;
        for (const auto& r : records) {
            if (!train_slopes.emplace(r.problem_id, r.profile.slope_a).second)
                throw Error(Errc::invalid_argument, "duplicate training problem " + r.problem_id);
        }
        if (train_slopes.size() < 2)
            throw Error(Errc::invalid_argument, "need at least 2 training problems");
        const SlopeTable train = normalize_slopes(train_slopes, scopes.begin()->first);

        std::map<std::string, double> test_slopes;
        for (const auto& path : options.test_datasets) {
            const MeasurementSet set = read_measurement_set_json(path);
            if (set.measurements.size() < 10)
                std::cerr << "warning: test set " << set.problem_id << " has only "
                          << set.measurements.size() << " solutions; slopes from < 10 are fragile\n";
            const auto points = to_profile_points(set);
            const ProblemProfile profile = fit_ols_origin(points); // throws on degenerate sets
            if (!test_slopes.emplace(set.problem_id, profile.slope_a).second)
                throw Error(Errc::invalid_argument, "duplicate test set for problem " + set.problem_id);
        }

        SlopeTable test;
        if (options.normalization == TestNormalization::independent) {
            test = normalize_slopes(test_slopes, "test");
        } else {
            const double train_min =
                std::min_element(train.entries.begin(), train.entries.end(), [](const auto& a, const auto& b) {
                    return a.second < b.second;
                })->second;
            test.machine = "test";
            test.entries = test_slopes;
            for (const auto& [id, slope] : test_slopes) {
                if (!(slope > 0))
                    throw Error(Errc::non_positive_slope, "slope for test " + id + " is not positive");
                test.normalized[id] = slope / train_min;
            }
        }

        ClassificationTable table = distance_table(train, test);
        if (!options.blind)
            for (const auto& id : table.test_ids)
                table.ground_truth[id] = id;

        // distance table CSV: rows train problems, columns test sets
        std::string csv = "train_problem";
        for (const auto& id : table.test_ids)
            csv += "," + id;
        csv += "\n";
        for (std::size_t r = 0; r < table.train_ids.size(); ++r) {
            csv += table.train_ids[r];
            for (double cell : table.cells[r])
                csv += "," + format_double(cell);
            csv += "\n";
        }
        std::ofstream csv_out(options.out_dir / "classification_table.csv",
                              std::ios::binary | std::ios::trunc);
        csv_out << csv;

        const int n_max = static_cast<int>(table.train_ids.size());
        const int n_lo = std::max(1, options.n_lo);
        const int n_hi = options.n_hi > 0 ? std::min(options.n_hi, n_max) : n_max;

        json summary;
        summary["machine"] = train.machine;
        summary["train_problems"] = table.train_ids;
        summary["blind"] = options.blind;
        json per_test = json::array();
        for (const auto& id : table.test_ids)
            per_test.push_back({{"test_id", id}, {"nearest", nearest_n(table, id, n_max)}});
        summary["tests"] = std::move(per_test);
        if (!options.blind) {
            json successes;
            for (int n = n_lo; n <= n_hi; ++n)
                successes[std::to_string(n)] = success_count(table, n);
            summary["success_counts"] = std::move(successes);
            summary["test_sets"] = static_cast<int>(table.test_ids.size());
        }
        std::ofstream json_out(options.out_dir / "classification_summary.json",
                               std::ios::binary | std::ios::trunc);
        json_out << summary.dump(2) << "\n";

        std::cout << table.test_ids.size() << " test sets against " << table.train_ids.size()
                  << " training problems -> " << (options.out_dir / "classification_table.csv").string()
                  << "\n";
        return kExitOk;
    } catch (const Error& e) {
        print_error(e);
        return kExitDomainError;
    }
}

int cmd_report(const ReportOptions& options) {
    try {
        std::filesystem::create_directories(options.out_dir);
        const auto profiles = read_profiles_json(options.profiles);

        std::vector<GroupOutliers> outliers;
        if (!options.datasets.empty()) {
            const auto groups = load_groups(options.datasets, std::nullopt);
            for (const auto& group : groups) {
                const auto it = std::find_if(profiles.begin(), profiles.end(), [&](const ProfileRecord& r) {
                    return r.problem_id == group.set.problem_id && r.machine == group.set.machine &&
                           r.config_tag == group.set.config_tag;
                });
                if (it == profiles.end())
                    continue;
                const auto points = to_profile_points(group.set);
                const OutlierReport report = classify_outliers(points, it->profile);
                outliers.push_back({it->problem_id, it->machine, it->config_tag, report});
                const auto svg_path = options.out_dir / ("scatter-" + sanitize(it->problem_id) + "-" +
                                                         sanitize(it->machine) + "-" +
                                                         sanitize(it->config_tag) + ".svg");
                emit_scatter_svg(points, it->profile, report, group_label(group.set), svg_path);
            }
        }

        write_profile_report(profiles, outliers, options.out_dir, options.spearman_threshold);
        std::cout << profiles.size() << " groups -> " << (options.out_dir / "profile_report.csv").string()
                  << "\n";
        return kExitOk;
    } catch (const Error& e) {
        print_error(e);
        return kExitDomainError;
    }
}

} // namespace joulemark::cli
