#pragma once

#include "joulemark/calibration.hpp"
#include "joulemark/orchestrator.hpp"
#include "joulemark/stats.hpp"
#include "joulemark/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace joulemark {

/// Shortest decimal form that parses back to the same double, so files
/// round-trip bit-exactly and diffs stay stable.
std::string format_double(double value);

/// Strict inverse of format_double; throws ParseFailure on anything else.
double parse_double(std::string_view text);

inline constexpr const char* kSamplesCsvHeader =
    "problem_id,solution_id,machine,config_tag,run_index,wall_ms,cpu_ms,energy_j";

void write_samples_csv(const std::vector<SampleRecord>& samples, const std::filesystem::path& path);

/// Throws SchemaMismatch naming unknown or missing columns; a file with only
/// the header yields an empty list.
std::vector<SampleRecord> read_samples_csv(const std::filesystem::path& path);

void write_measurement_set_json(const MeasurementSet& set, const std::filesystem::path& path);
MeasurementSet read_measurement_set_json(const std::filesystem::path& path);

void write_baseline_json(const IdleBaseline& baseline, const std::filesystem::path& path);
IdleBaseline read_baseline_json(const std::filesystem::path& path);

/// One fitted group as stored in profiles.json.
struct ProfileRecord {
    std::string problem_id;
    std::string machine;
    std::string config_tag;
    ProblemProfile profile;

    bool operator==(const ProfileRecord&) const = default;
};

void write_profiles_json(const std::vector<ProfileRecord>& profiles, const std::filesystem::path& path);
std::vector<ProfileRecord> read_profiles_json(const std::filesystem::path& path);

} // namespace joulemark
