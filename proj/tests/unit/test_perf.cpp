#include "joulemark/perf.hpp"

#include "helpers.hpp"
#include "joulemark/errors.hpp"

#include <doctest.h>

using namespace joulemark;
using testutil::TempDir;

TEST_CASE("perf invocation matches the documented template") {
    CHECK(perf_command("perf", "./a.out", "input01") ==
          "perf stat -x ';' -e power/energy-pkg/,user_time,system_time --all-cpus ./a.out < input01");
}

TEST_CASE("well-formed perf output parses into the three counters") {
    const std::string text = "3.14;Joules;power/energy-pkg/;123456;100.00;;\n"
                             "0.50;;user_time;123456;100.00;;\n"
                             "0.10;;system_time;123456;100.00;;\n";
    const PerfCounters counters = parse_perf_output(text);
    CHECK(counters.energy_j == doctest::Approx(3.14).epsilon(1e-12));
    CHECK(counters.user_s == doctest::Approx(0.50).epsilon(1e-12));
    CHECK(counters.system_s == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(counters.energy_unit == "Joules");
}

TEST_CASE("comment lines and extra events are tolerated") {
    const std::string text = "# started on Mon\n"
                             "12.34;Joules;power/energy-pkg/;1;100.00;;\n"
                             "999;;cycles;1;100.00;;\n"
                             "0.2;;user_time;1;100.00;;\n"
                             "0.1;;system_time;1;100.00;;\n";
    const PerfCounters counters = parse_perf_output(text);
    CHECK(counters.energy_j == doctest::Approx(12.34));
}

TEST_CASE("unsupported event sentinel raises ParseFailure") {
    const std::string text = "<not supported>;;power/energy-pkg/;0;100.00;;\n"
                             "0.2;;user_time;1;100.00;;\n"
                             "0.1;;system_time;1;100.00;;\n";
    try {
        parse_perf_output(text);
        FAIL("expected ParseFailure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_failure);
        CHECK(std::string(e.what()).find("unsupported") != std::string::npos);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("a missing event is named in the failure") {
    const std::string text = "0.2;;user_time;1;100.00;;\n0.1;;system_time;1;100.00;;\n";
    try {
        parse_perf_output(text);
        FAIL("expected ParseFailure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_failure);
        CHECK(std::string(e.what()).find("power/energy-pkg/") != std::string::npos);
    }
}

TEST_CASE("empty or truncated output raises ParseFailure, never silent zeros") {
    CHECK_THROWS_AS(parse_perf_output(""), Error);
    CHECK_THROWS_AS(parse_perf_output("\n  \n"), Error);
    CHECK_THROWS_AS(parse_perf_output("3.14;Joules;power/energy-pkg/;1;100.00;;\n"), Error);
    try {
        parse_perf_output("oops;Joules;power/energy-pkg/;1;100.00;;\n"
                          "0.2;;user_time;1;;;\n0.1;;system_time;1;;;\n");
        FAIL("expected ParseFailure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("every fixture either parses or fails loudly") {
    const std::vector<std::string> corpus = {
        "1;Joules;power/energy-pkg/;1;;;\n2;;user_time;1;;;\n3;;system_time;1;;;\n",
        "<not counted>;;power/energy-pkg/;1;;;\n2;;user_time;1;;;\n3;;system_time;1;;;\n",
        ";;power/energy-pkg/;1;;;\n2;;user_time;1;;;\n3;;system_time;1;;;\n",
        "# only comments\n",
        "junk line without separators\n1;Joules;power/energy-pkg/;1;;;\n2;;user_time;1;;;\n3;;system_time;1;;;\n",
    };
    for (const auto& fixture : corpus) {
        try {
            const PerfCounters counters = parse_perf_output(fixture);
            CHECK(counters.energy_j != 0.0); // parsed fixtures carry nonzero energy
        } catch (const Error& e) {
            CHECK(e.code() == Errc::parse_failure);
        }
    }
}

TEST_CASE("a stub perf binary drives the full measurement path") {
    TempDir dir;
    // Emulates `perf stat`: energy comes from the input on stdin, fixed times.
    const auto fake_perf = dir / "perf-stub.sh";
    testutil::write_script(fake_perf, "val=$(cat)\n"
                                      "echo \"$val;Joules;power/energy-pkg/;1;100.00;;\" >&2\n"
                                      "echo \"0.2;;user_time;1;100.00;;\" >&2\n"
                                      "echo \"0.1;;system_time;1;100.00;;\" >&2\n");
    const auto in1 = dir / "in1";
    const auto in2 = dir / "in2";
    testutil::write_file(in1, "1.0");
    testutil::write_file(in2, "2.5");

    PerfOptions options;
    options.perf_binary = fake_perf.string();
    SolutionSpec solution{"s1", "ignored", "cpp", "O2"};

    const RunSample sample = measure_command_perf(solution, {in1.string(), in2.string()}, options);
    CHECK(sample.energy_j == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(sample.cpu_ms == doctest::Approx(600.0).epsilon(1e-12)); // (0.2+0.1)s per input
    CHECK(sample.wall_ms > 0.0);
}

TEST_CASE("a missing perf binary raises PerfUnavailable") {
    PerfOptions options;
    options.perf_binary = "/nonexistent/joulemark-perf";
    SolutionSpec solution{"s1", "true", "cpp", "O2"};
    try {
        measure_command_perf(solution, {"/dev/null"}, options);
        FAIL("expected PerfUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::perf_unavailable);
    }
}

TEST_CASE("unknown time units are surfaced as warnings") {
    TempDir dir;
    const auto fake_perf = dir / "perf-stub.sh";
    testutil::write_script(fake_perf, "cat > /dev/null\n"
                                      "echo \"1.0;Joules;power/energy-pkg/;1;;;\" >&2\n"
                                      "echo \"0.2;furlongs;user_time;1;;;\" >&2\n"
                                      "echo \"0.1;;system_time;1;;;\" >&2\n");
    const auto input = dir / "in";
    testutil::write_file(input, "x");

    PerfOptions options;
    options.perf_binary = fake_perf.string();
    SolutionSpec solution{"s1", "ignored", "cpp", "O2"};
    std::vector<std::string> warnings;
    measure_command_perf(solution, {input.string()}, options, 0, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("furlongs") != std::string::npos);
}
