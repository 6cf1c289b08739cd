#include "joulemark/errors.hpp"

namespace joulemark {

const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::path_unreadable: return "PathUnreadable";
    case Errc::malformed_counter: return "MalformedCounter";
    case Errc::mismatched_range: return "MismatchedRange";
    case Errc::non_zero_exit: return "NonZeroExit";
    case Errc::timeout: return "Timeout";
    case Errc::perf_unavailable: return "PerfUnavailable";
    case Errc::parse_failure: return "ParseFailure";
    case Errc::unknown_input: return "UnknownInput";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::degenerate_samples: return "DegenerateSamples";
    case Errc::already_adjusted: return "AlreadyAdjusted";
    case Errc::degenerate_points: return "DegeneratePoints";
    case Errc::zero_weight_denominator: return "ZeroWeightDenominator";
    case Errc::degenerate_ranks: return "DegenerateRanks";
    case Errc::mismatched_universe: return "MismatchedUniverse";
    case Errc::non_positive_slope: return "NonPositiveSlope";
    case Errc::missing_ground_truth: return "MissingGroundTruth";
    case Errc::io_failure: return "IoFailure";
    case Errc::schema_mismatch: return "SchemaMismatch";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::lock_held: return "LockHeld";
    }
    return "UnknownError";
}

} // namespace joulemark
