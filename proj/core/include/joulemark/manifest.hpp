#pragma once

#include "joulemark/orchestrator.hpp"
#include "joulemark/synthetic.hpp"
#include "joulemark/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace joulemark {

struct ManifestProblem {
    ProblemSpec problem;
    std::vector<SolutionSpec> solutions;

    bool operator==(const ManifestProblem&) const = default;
};

/// Everything a measurement suite needs: machine, problems with their
/// solutions, the run configuration, and (for the synthetic backend) the
/// machine model.
struct SuiteManifest {
    MachineDescriptor machine;
    std::vector<ManifestProblem> problems;
    RunConfig config;
    std::optional<SyntheticModel> synthetic;

    bool operator==(const SuiteManifest&) const = default;
};

SuiteManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const SuiteManifest& manifest, const std::filesystem::path& path);

/// Structural checks: nonempty unique ids, nonempty command templates,
/// distinct input paths, a synthetic model when the synthetic backend is
/// selected, and -- for backends that execute real programs -- that every
/// input file exists. Violations are data, one entry each.
std::vector<std::string> validate_manifest(const SuiteManifest& manifest);

} // namespace joulemark
