#include "joulemark/synthetic.hpp"

#include "joulemark/errors.hpp"

#include <doctest.h>

using namespace joulemark;

namespace {

SyntheticModel basic_model() {
    SyntheticModel model;
    model.active_power_w = 10;
    model.idle_power_w = 0;
    model.cpu_ms = {{"in1", 1000.0}};
    model.noise_rel = 0;
    model.seed = 7;
    return model;
}

} // namespace

TEST_CASE("synthetic_measure is power times time without noise") {
    const RunSample sample = synthetic_measure(basic_model(), "./a.out", "in1", 0);
    CHECK(sample.cpu_ms == 1000.0);
    CHECK(sample.wall_ms == 1000.0);
    CHECK(sample.energy_j == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("synthetic_measure includes idle power in the drawn total") {
    SyntheticModel model = basic_model();
    model.idle_power_w = 2;
    model.cpu_ms = {{"in1", 500.0}};
    const RunSample sample = synthetic_measure(model, "./a.out", "in1", 0);
    CHECK(sample.energy_j == doctest::Approx(6.0).epsilon(1e-12)); // (10+2) W x 0.5 s
}

TEST_CASE("identical synthetic calls yield identical samples") {
    SyntheticModel model = basic_model();
    model.noise_rel = 0.05;
    const RunSample a = synthetic_measure(model, "./a.out", "in1", 3);
    const RunSample b = synthetic_measure(model, "./a.out", "in1", 3);
    CHECK(a == b);
    // different run index -> different noise draw
    const RunSample c = synthetic_measure(model, "./a.out", "in1", 4);
    CHECK(a.energy_j != c.energy_j);
}

TEST_CASE("synthetic_measure rejects unknown inputs") {
    try {
        synthetic_measure(basic_model(), "./a.out", "nope", 0);
        FAIL("expected UnknownInput");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_input);
    }
}

TEST_CASE("command-qualified cpu entries take precedence over plain input keys") {
    SyntheticModel model = basic_model();
    model.cpu_ms = {{"in1", 100.0}, {"fast::in1", 20.0}};
    CHECK(synthetic_cpu_ms(model, "fast", "in1") == 20.0);
    CHECK(synthetic_cpu_ms(model, "slow", "in1") == 100.0);
}

TEST_CASE("backend sums per-input samples and requires at least one input") {
    SyntheticModel model = basic_model();
    model.cpu_ms = {{"a", 100.0}, {"b", 300.0}};
    SyntheticBackend backend(model);
    SolutionSpec solution{"s1", "./a.out", "cpp", "O2"};

    const RunSample sample = backend.measure(solution, {"a", "b"}, 0);
    CHECK(sample.cpu_ms == 400.0);
    CHECK(sample.energy_j == doctest::Approx(4.0).epsilon(1e-12));

    try {
        backend.measure(solution, {}, 0);
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_argument);
    }
}

TEST_CASE("sleeps draw idle power only") {
    SyntheticModel model = basic_model();
    model.idle_power_w = 2;
    SyntheticBackend backend(model);
    CHECK(backend.measure_sleep(500) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(backend.measure_sleep(1000) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("zero noise makes energy exactly proportional to cpu time") {
    SyntheticModel model = basic_model();
    model.idle_power_w = 3;
    model.cpu_ms.clear();
    for (int i = 1; i <= 20; ++i)
        model.cpu_ms["in" + std::to_string(i)] = 50.0 * i;
    SyntheticBackend backend(model);
    SolutionSpec solution{"s1", "./a.out", "cpp", "O2"};

    const double power = model.active_power_w + model.idle_power_w;
    for (int i = 1; i <= 20; ++i) {
        const RunSample s = backend.measure(solution, {"in" + std::to_string(i)}, 0);
        CHECK(s.energy_j / (s.cpu_ms / 1000.0) == doctest::Approx(power).epsilon(1e-12));
    }
}
