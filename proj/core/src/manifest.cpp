#include "joulemark/manifest.hpp"

#include "joulemark/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace joulemark {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io_failure, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return json::parse(buffer.str());
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

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key))
        return fallback;
    return j.at(key).get<T>();
}

} // namespace

SuiteManifest load_manifest(const std::filesystem::path& path) {
    const json j = parse_file(path);
    SuiteManifest manifest;

    const json mj = field<json>(j, "machine", path);
    manifest.machine.id = field<std::string>(mj, "id", path);
    manifest.machine.cpu_label = field_or<std::string>(mj, "cpu_label", "");
    manifest.machine.core_count = field_or<int>(mj, "core_count", 1);
    manifest.machine.notes = field_or<std::string>(mj, "notes", "");

    for (const auto& pj : field<json>(j, "problems", path)) {
        ManifestProblem mp;
        mp.problem.problem_id = field<std::string>(pj, "problem_id", path);
        mp.problem.input_paths = field<std::vector<std::string>>(pj, "inputs", path);
        mp.problem.category = field_or<std::string>(pj, "category", "");
        for (const auto& sj : field<json>(pj, "solutions", path)) {
            SolutionSpec s;
            s.solution_id = field<std::string>(sj, "solution_id", path);
            s.command_template = field<std::string>(sj, "command", path);
            s.language_tag = field_or<std::string>(sj, "language_tag", "");
            s.flag_tag = field_or<std::string>(sj, "flag_tag", "");
            mp.solutions.push_back(std::move(s));
        }
        manifest.problems.push_back(std::move(mp));
    }

    const json cj = field<json>(j, "config", path);
    manifest.config.repetitions = field_or<int>(cj, "repetitions", 10);
    manifest.config.backend = backend_from_string(field_or<std::string>(cj, "backend", "synthetic"));
    manifest.config.single_core = field_or<bool>(cj, "single_core", false);
    manifest.config.flag_tag = field_or<std::string>(cj, "flag_tag", "");
    manifest.config.timeout_s = field_or<double>(cj, "timeout_s", 60.0);
    manifest.config.require_unlimited_stack = field_or<bool>(cj, "require_unlimited_stack", false);

    if (j.contains("synthetic")) {
        const json sj = j.at("synthetic");
        SyntheticModel model;
        model.active_power_w = field<double>(sj, "active_power_w", path);
        model.idle_power_w = field_or<double>(sj, "idle_power_w", 0.0);
        model.noise_rel = field_or<double>(sj, "noise_rel", 0.0);
        model.seed = field_or<std::uint64_t>(sj, "seed", 0);
        model.cpu_ms = field<std::map<std::string, double>>(sj, "cpu_ms", path);
        manifest.synthetic = std::move(model);
    }
    return manifest;
}

void save_manifest(const SuiteManifest& manifest, const std::filesystem::path& path) {
    json j;
    j["machine"] = {{"id", manifest.machine.id},
                    {"cpu_label", manifest.machine.cpu_label},
                    {"core_count", manifest.machine.core_count},
                    {"notes", manifest.machine.notes}};
    j["problems"] = json::array();
    for (const auto& mp : manifest.problems) {
        json pj;
        pj["problem_id"] = mp.problem.problem_id;
        pj["category"] = mp.problem.category;
        pj["inputs"] = mp.problem.input_paths;
        pj["solutions"] = json::array();
        for (const auto& s : mp.solutions)
            pj["solutions"].push_back({{"solution_id", s.solution_id},
                                       {"command", s.command_template},
                                       {"language_tag", s.language_tag},
                                       {"flag_tag", s.flag_tag}});
        j["problems"].push_back(std::move(pj));
    }
    j["config"] = {{"repetitions", manifest.config.repetitions},
                   {"backend", to_string(manifest.config.backend)},
                   {"single_core", manifest.config.single_core},
                   {"flag_tag", manifest.config.flag_tag},
                   {"timeout_s", manifest.config.timeout_s},
                   {"require_unlimited_stack", manifest.config.require_unlimited_stack}};
    if (manifest.synthetic) {
        j["synthetic"] = {{"active_power_w", manifest.synthetic->active_power_w},
                          {"idle_power_w", manifest.synthetic->idle_power_w},
                          {"noise_rel", manifest.synthetic->noise_rel},
                          {"seed", manifest.synthetic->seed},
                          {"cpu_ms", manifest.synthetic->cpu_ms}};
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::io_failure, "cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

std::vector<std::string> validate_manifest(const SuiteManifest& manifest) {
    std::vector<std::string> violations;

    if (manifest.machine.id.empty())
        violations.push_back("empty machine id");
    if (manifest.machine.core_count < 1)
        violations.push_back("machine core_count must be positive");
    if (manifest.problems.empty())
        violations.push_back("no problems");
    if (manifest.config.repetitions < 3)
        violations.push_back("repetitions must be at least 3");
    if (manifest.config.backend == BackendKind::synthetic && !manifest.synthetic)
        violations.push_back("synthetic backend selected but no synthetic model given");

    const bool real_backend = manifest.config.backend != BackendKind::synthetic;
    std::set<std::string> problem_ids;
    for (const auto& mp : manifest.problems) {
        const std::string& pid = mp.problem.problem_id;
        if (pid.empty())
            violations.push_back("empty problem_id");
        else if (!problem_ids.insert(pid).second)
            violations.push_back("duplicate problem_id: " + pid);

        if (mp.problem.input_paths.empty())
            violations.push_back("problem " + pid + ": no inputs");
        std::set<std::string> inputs;
        for (const auto& input : mp.problem.input_paths) {
            if (!inputs.insert(input).second)
                violations.push_back("problem " + pid + ": duplicate input " + input);
            if (real_backend && !std::filesystem::exists(input))
                violations.push_back("problem " + pid + ": input file missing: " + input);
        }

        if (mp.solutions.empty())
            violations.push_back("problem " + pid + ": no solutions");
        std::set<std::string> solution_ids;
        for (const auto& s : mp.solutions) {
            if (s.solution_id.empty())
                violations.push_back("problem " + pid + ": empty solution_id");
            else if (!solution_ids.insert(s.solution_id).second)
                violations.push_back("problem " + pid + ": duplicate solution_id: " + s.solution_id);
            if (s.command_template.empty())
                violations.push_back("problem " + pid + ": empty command for solution " + s.solution_id);
        }
    }

    std::sort(violations.begin(), violations.end());
    return violations;
}

} // namespace joulemark
