#include "joulemark/io.hpp"

#include "joulemark/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace joulemark {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::io_failure, "cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw Error(Errc::io_failure, "short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io_failure, "cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

json parse_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw Error(Errc::schema_mismatch, path.string() + ": " + e.what());
    }
}

template <typename T>
T field(const json& j, const char* key, const std::filesystem::path& path) {
    if (!j.contains(key))
        throw Error(Errc::schema_mismatch, path.string() + ": missing field \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(Errc::schema_mismatch, path.string() + ": field \"" + key + "\": " + e.what());
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

} // namespace

std::string format_double(double value) {
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{})
        throw Error(Errc::io_failure, "cannot format double");
    return std::string(buffer, ptr);
}

double parse_double(std::string_view text) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw Error(Errc::parse_failure, "malformed number: \"" + std::string(text) + "\"");
    return value;
}

void write_samples_csv(const std::vector<SampleRecord>& samples, const std::filesystem::path& path) {
    std::string out(kSamplesCsvHeader);
    out += "\n";
    for (const auto& rec : samples) {
        out += rec.problem_id + "," + rec.solution_id + "," + rec.machine + "," + rec.config_tag + "," +
               std::to_string(rec.sample.run_index) + "," + format_double(rec.sample.wall_ms) + "," +
               format_double(rec.sample.cpu_ms) + "," + format_double(rec.sample.energy_j) + "\n";
    }
    write_text(path, out);
}

std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path) {
    std::istringstream lines(read_text(path));
    std::string line;
    if (!std::getline(lines, line))
        throw Error(Errc::schema_mismatch, path.string() + ": empty file, expected header");

    const auto expected = split_csv_line(kSamplesCsvHeader);
    const auto header = split_csv_line(line);
    for (const auto& col : header)
        if (std::find(expected.begin(), expected.end(), col) == expected.end())
            throw Error(Errc::schema_mismatch, path.string() + ": unknown column \"" + col + "\"");
    for (const auto& col : expected)
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw Error(Errc::schema_mismatch, path.string() + ": missing column \"" + col + "\"");
    if (header != expected)
        throw Error(Errc::schema_mismatch, path.string() + ": columns out of order");

    std::vector<SampleRecord> samples;
    std::size_t line_no = 1;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != expected.size())
            throw Error(Errc::schema_mismatch,
                        path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(expected.size()));
        SampleRecord rec;
        rec.problem_id = fields[0];
        rec.solution_id = fields[1];
        rec.machine = fields[2];
        rec.config_tag = fields[3];
        rec.sample.run_index = static_cast<int>(parse_double(fields[4]));
        rec.sample.wall_ms = parse_double(fields[5]);
        rec.sample.cpu_ms = parse_double(fields[6]);
        rec.sample.energy_j = parse_double(fields[7]);
        samples.push_back(std::move(rec));
    }
    return samples;
}

void write_measurement_set_json(const MeasurementSet& set, const std::filesystem::path& path) {
    json j;
    j["machine"] = set.machine;
    j["problem_id"] = set.problem_id;
    j["config_tag"] = set.config_tag;
    j["measurements"] = json::array();
    for (const auto& m : set.measurements) {
        j["measurements"].push_back({{"solution_id", m.solution_id},
                                     {"t_mean_ms", m.t_mean_ms},
                                     {"c_mean_j", m.c_mean_j},
                                     {"t_sd_ms", m.t_sd_ms},
                                     {"c_sd_j", m.c_sd_j},
                                     {"wall_mean_ms", m.wall_mean_ms},
                                     {"kept_runs", m.kept_runs},
                                     {"baseline_adjusted", m.baseline_adjusted}});
    }
    j["failures"] = json::array();
    for (const auto& f : set.failures)
        j["failures"].push_back({{"solution_id", f.solution_id}, {"error", f.error}});
    write_text(path, j.dump(2) + "\n");
}

MeasurementSet read_measurement_set_json(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    MeasurementSet set;
    set.machine = field<std::string>(j, "machine", path);
    set.problem_id = field<std::string>(j, "problem_id", path);
    set.config_tag = field<std::string>(j, "config_tag", path);
    for (const auto& mj : field<json>(j, "measurements", path)) {
        SolutionMeasurement m;
        m.solution_id = field<std::string>(mj, "solution_id", path);
        m.t_mean_ms = field<double>(mj, "t_mean_ms", path);
        m.c_mean_j = field<double>(mj, "c_mean_j", path);
        m.t_sd_ms = field<double>(mj, "t_sd_ms", path);
        m.c_sd_j = field<double>(mj, "c_sd_j", path);
        m.wall_mean_ms = field<double>(mj, "wall_mean_ms", path);
        m.kept_runs = field<int>(mj, "kept_runs", path);
        m.baseline_adjusted = field<bool>(mj, "baseline_adjusted", path);
        set.measurements.push_back(std::move(m));
    }
    if (j.contains("failures"))
        for (const auto& fj : j.at("failures"))
            set.failures.push_back({field<std::string>(fj, "solution_id", path),
                                    field<std::string>(fj, "error", path)});
    return set;
}

void write_baseline_json(const IdleBaseline& baseline, const std::filesystem::path& path) {
    json j;
    j["machine"] = baseline.machine;
    j["idle_slope_j_per_ms"] = baseline.idle_slope_j_per_ms;
    j["sample_count"] = baseline.sample_count;
    j["fit_residual_sd"] = baseline.fit_residual_sd;
    j["diagnostic_free_intercept"] = {{"slope", baseline.diag_intercept_slope},
                                      {"intercept_j", baseline.diag_intercept_j},
                                      {"diagnostic_only", true}};
    write_text(path, j.dump(2) + "\n");
}

IdleBaseline read_baseline_json(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    IdleBaseline baseline;
    baseline.machine = field<std::string>(j, "machine", path);
    baseline.idle_slope_j_per_ms = field<double>(j, "idle_slope_j_per_ms", path);
    baseline.sample_count = field<int>(j, "sample_count", path);
    baseline.fit_residual_sd = field<double>(j, "fit_residual_sd", path);
    if (j.contains("diagnostic_free_intercept")) {
        const auto& dj = j.at("diagnostic_free_intercept");
        baseline.diag_intercept_slope = field<double>(dj, "slope", path);
        baseline.diag_intercept_j = field<double>(dj, "intercept_j", path);
    }
    return baseline;
}

void write_profiles_json(const std::vector<ProfileRecord>& profiles, const std::filesystem::path& path) {
    json j = json::array();
    for (const auto& rec : profiles) {
        j.push_back({{"problem_id", rec.problem_id},
                     {"machine", rec.machine},
                     {"config_tag", rec.config_tag},
                     {"fit_mode", to_string(rec.profile.fit_mode)},
                     {"n", rec.profile.n},
                     {"slope_a_j_per_ms", rec.profile.slope_a},
                     {"sse", rec.profile.sse},
                     {"sigma_e", rec.profile.sigma_e},
                     {"spearman", rec.profile.spearman}});
    }
    write_text(path, j.dump(2) + "\n");
}

std::vector<ProfileRecord> read_profiles_json(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    if (!j.is_array())
        throw Error(Errc::schema_mismatch, path.string() + ": expected an array of profiles");
    std::vector<ProfileRecord> profiles;
    for (const auto& pj : j) {
        ProfileRecord rec;
        rec.problem_id = field<std::string>(pj, "problem_id", path);
        rec.machine = field<std::string>(pj, "machine", path);
        rec.config_tag = field<std::string>(pj, "config_tag", path);
        rec.profile.fit_mode = fit_mode_from_string(field<std::string>(pj, "fit_mode", path));
        rec.profile.n = field<int>(pj, "n", path);
        rec.profile.slope_a = field<double>(pj, "slope_a_j_per_ms", path);
        rec.profile.sse = field<double>(pj, "sse", path);
        rec.profile.sigma_e = field<double>(pj, "sigma_e", path);
        rec.profile.spearman = field<double>(pj, "spearman", path);
        profiles.push_back(std::move(rec));
    }
    return profiles;
}

} // namespace joulemark
