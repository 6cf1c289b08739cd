#pragma once

#include <stdexcept>
#include <string>

namespace joulemark {

/// Failure categories surfaced by the library. Tests and callers branch on
/// the code, messages are for humans.
enum class Errc {
    path_unreadable,
    malformed_counter,
    mismatched_range,
    non_zero_exit,
    timeout,
    perf_unavailable,
    parse_failure,
    unknown_input,
    too_few_samples,
    degenerate_samples,
    already_adjusted,
    degenerate_points,
    zero_weight_denominator,
    degenerate_ranks,
    mismatched_universe,
    non_positive_slope,
    missing_ground_truth,
    io_failure,
    schema_mismatch,
    invalid_argument,
    lock_held,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace joulemark
