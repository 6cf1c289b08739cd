#include "joulemark/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace joulemark {

namespace {

bool finite_nonneg(double v) {
    return std::isfinite(v) && v >= 0;
}

} // namespace

std::vector<std::string> validate_dataset(const MeasurementSet& set) {
    std::vector<std::string> violations;

    if (set.machine.empty())
        violations.push_back("empty machine id");
    if (set.problem_id.empty())
        violations.push_back("empty problem_id");

    std::set<std::string> seen;
    std::set<std::string> reported_dup;
    for (const auto& m : set.measurements) {
        if (m.solution_id.empty()) {
            violations.push_back("empty solution_id");
            continue;
        }
        if (!seen.insert(m.solution_id).second && reported_dup.insert(m.solution_id).second)
            violations.push_back("duplicate solution_id: " + m.solution_id);

        if (!finite_nonneg(m.t_mean_ms))
            violations.push_back("negative or non-finite mean time: " + m.solution_id);
        if (!finite_nonneg(m.c_mean_j))
            violations.push_back("negative or non-finite mean energy: " + m.solution_id);
        if (!finite_nonneg(m.wall_mean_ms))
            violations.push_back("negative or non-finite mean wall time: " + m.solution_id);
        if (!finite_nonneg(m.t_sd_ms) || !finite_nonneg(m.c_sd_j))
            violations.push_back("negative standard deviation: " + m.solution_id);
        if (m.kept_runs < 1)
            violations.push_back("kept_runs < 1: " + m.solution_id);
    }

    // Deterministic regardless of measurement order.
    std::sort(violations.begin(), violations.end());
    return violations;
}

} // namespace joulemark
