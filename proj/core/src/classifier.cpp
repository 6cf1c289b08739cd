#include "joulemark/classifier.hpp"

#include "joulemark/errors.hpp"

#include <algorithm>
#include <cmath>

namespace joulemark {

SlopeTable normalize_slopes(const std::map<std::string, double>& slopes, const std::string& machine) {
    if (slopes.empty())
        throw Error(Errc::non_positive_slope, "no slopes to normalize");
    double min_slope = 0;
    bool first = true;
    for (const auto& [id, slope] : slopes) {
        if (!(slope > 0) || !std::isfinite(slope))
            throw Error(Errc::non_positive_slope, "slope for problem " + id + " is not positive");
        if (first || slope < min_slope) {
            min_slope = slope;
            first = false;
        }
    }

    SlopeTable table;
    table.machine = machine;
    table.entries = slopes;
    for (const auto& [id, slope] : slopes)
        table.normalized[id] = slope / min_slope;
    return table;
}

ClassificationTable distance_table(const SlopeTable& train, const SlopeTable& test) {
    ClassificationTable table;
    table.train_ids.reserve(train.normalized.size());
    for (const auto& [id, value] : train.normalized)
        table.train_ids.push_back(id);
    table.test_ids.reserve(test.normalized.size());
    for (const auto& [id, value] : test.normalized)
        table.test_ids.push_back(id);

    table.cells.resize(table.train_ids.size());
    for (std::size_t r = 0; r < table.train_ids.size(); ++r) {
        const double train_norm = train.normalized.at(table.train_ids[r]);
        auto& row = table.cells[r];
        row.reserve(table.test_ids.size());
        for (const auto& test_id : table.test_ids)
            row.push_back(std::abs(train_norm - test.normalized.at(test_id)) / train_norm * 100.0);
    }
    return table;
}

std::vector<std::string> nearest_n(const ClassificationTable& table, const std::string& test_id, int n) {
    if (n < 1 || static_cast<std::size_t>(n) > table.train_ids.size())
        throw Error(Errc::invalid_argument, "n must be within 1..|train|, got " + std::to_string(n));
    const auto col_it = std::find(table.test_ids.begin(), table.test_ids.end(), test_id);
    if (col_it == table.test_ids.end())
        throw Error(Errc::invalid_argument, "unknown test id: " + test_id);
    const std::size_t col = static_cast<std::size_t>(col_it - table.test_ids.begin());

    std::vector<std::pair<double, std::string>> ranked;
    ranked.reserve(table.train_ids.size());
    for (std::size_t r = 0; r < table.train_ids.size(); ++r)
        ranked.emplace_back(table.cells[r][col], table.train_ids[r]);
    std::sort(ranked.begin(), ranked.end()); // value, then id: deterministic ties

    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(ranked[static_cast<std::size_t>(i)].second);
    return out;
}

int success_count(const ClassificationTable& table, int n) {
    int successes = 0;
    for (const auto& test_id : table.test_ids) {
        const auto truth_it = table.ground_truth.find(test_id);
        if (truth_it == table.ground_truth.end())
            throw Error(Errc::missing_ground_truth, "no ground truth for test " + test_id);
        const std::string& truth = truth_it->second;
        if (std::find(table.train_ids.begin(), table.train_ids.end(), truth) == table.train_ids.end())
            throw Error(Errc::missing_ground_truth,
                        "ground truth " + truth + " is not a training problem (test " + test_id + ")");
        const auto nearest = nearest_n(table, test_id, n);
        if (std::find(nearest.begin(), nearest.end(), truth) != nearest.end())
            ++successes;
    }
    return successes;
}

} // namespace joulemark
