#include "joulemark/types.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace joulemark;

namespace {

SolutionMeasurement make_measurement(const std::string& id, double t = 100, double c = 1.0) {
    SolutionMeasurement m;
    m.solution_id = id;
    m.t_mean_ms = t;
    m.c_mean_j = c;
    m.t_sd_ms = 0.1;
    m.c_sd_j = 0.01;
    m.wall_mean_ms = t;
    m.kept_runs = 8;
    return m;
}

MeasurementSet make_set(std::size_t solutions) {
    MeasurementSet set;
    set.machine = "HPELITE";
    set.problem_id = "1632";
    set.config_tag = "O2:multi:synthetic";
    for (std::size_t i = 0; i < solutions; ++i)
        set.measurements.push_back(make_measurement("s" + std::to_string(i), 100.0 + 10.0 * i));
    return set;
}

} // namespace

TEST_CASE("validate_dataset flags duplicate solution ids") {
    MeasurementSet set = make_set(2);
    set.measurements.push_back(make_measurement("s1"));
    const auto violations = validate_dataset(set);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "duplicate solution_id: s1");
}

TEST_CASE("validate_dataset accepts a well-formed 30-solution set") {
    CHECK(validate_dataset(make_set(30)).empty());
}

TEST_CASE("validate_dataset flags negative standard deviations") {
    MeasurementSet set = make_set(3);
    set.measurements[1].c_sd_j = -1;
    const auto violations = validate_dataset(set);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "negative standard deviation: s1");
}

TEST_CASE("validate_dataset flags kept_runs below 1 and bad means") {
    MeasurementSet set = make_set(2);
    set.measurements[0].kept_runs = 0;
    set.measurements[1].c_mean_j = -2;
    const auto violations = validate_dataset(set);
    REQUIRE(violations.size() == 2);
    CHECK(violations[0] == "kept_runs < 1: s0");
    CHECK(violations[1] == "negative or non-finite mean energy: s1");
}

TEST_CASE("validate_dataset is idempotent and order-independent") {
    MeasurementSet set = make_set(10);
    set.measurements[3].t_sd_ms = -0.5;
    set.measurements.push_back(make_measurement("s7"));

    const auto baseline = validate_dataset(set);
    CHECK(validate_dataset(set) == baseline);

    std::mt19937 rng(42);
    for (int round = 0; round < 20; ++round) {
        MeasurementSet shuffled = set;
        std::shuffle(shuffled.measurements.begin(), shuffled.measurements.end(), rng);
        CHECK(validate_dataset(shuffled) == baseline);
    }
}
