#pragma once

#include <map>
#include <string>
#include <vector>

namespace joulemark {

/// Per-problem slopes of one machine plus their normalized form (each slope
/// divided by the machine minimum, so the smallest entry is exactly 1.000).
/// Normalization makes profiles comparable across machines of different
/// power draw.
struct SlopeTable {
    std::string machine;
    std::map<std::string, double> entries;    // problem_id -> slope (J/ms)
    std::map<std::string, double> normalized; // problem_id -> slope/min(slope)

    bool operator==(const SlopeTable&) const = default;
};

/// Throws NonPositiveSlope when the map is empty or any slope is <= 0.
SlopeTable normalize_slopes(const std::map<std::string, double>& slopes, const std::string& machine = {});

/// Relative differences between normalized training and test slopes.
/// cells[row][col] = |train_row - test_col| / train_row * 100, rows and
/// columns in sorted id order. ground_truth maps a test id to the training
/// problem it actually solves; left empty in blind mode.
struct ClassificationTable {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    std::vector<std::vector<double>> cells;
    std::map<std::string, std::string> ground_truth;

    bool operator==(const ClassificationTable&) const = default;
};

/// Both tables must be normalized on their own minima.
ClassificationTable distance_table(const SlopeTable& train, const SlopeTable& test);

/// The n training problems relatively closest to the test column, ascending
/// by cell value, exact ties broken by problem_id. Requires 1 <= n <= |train|.
std::vector<std::string> nearest_n(const ClassificationTable& table, const std::string& test_id, int n);

/// Number of test columns whose ground-truth problem appears among the n
/// nearest training problems. Throws MissingGroundTruth when a column has no
/// recorded truth or its truth is not a training row.
int success_count(const ClassificationTable& table, int n);

} // namespace joulemark
