#pragma once

#include <cstdint>
#include <filesystem>

namespace joulemark {

/// One reading of a cumulative RAPL energy counter. The counter is a
/// modular value: it wraps to zero at max_range_uj.
struct CounterSnapshot {
    std::uint64_t energy_uj = 0;
    std::uint64_t max_range_uj = 0;
    std::int64_t timestamp_ns = 0;

    bool operator==(const CounterSnapshot&) const = default;
};

/// Reads `energy_uj` and `max_energy_range_uj` under a powercap domain
/// directory (e.g. <root>/intel-rapl:0). One file read each, never blocks.
/// Throws PathUnreadable when a file is missing or unreadable and
/// MalformedCounter when the content is not a counter value.
CounterSnapshot read_package_energy(const std::filesystem::path& domain_path);

/// Energy in joules elapsed between two snapshots of the same counter,
/// unwrapping at most one counter wraparound. Throws MismatchedRange when
/// the snapshots disagree on max_range_uj.
double counter_delta(const CounterSnapshot& before, const CounterSnapshot& after);

/// Sysfs root for powercap, honoring the JOULEMARK_POWERCAP_ROOT override.
std::filesystem::path powercap_root();

/// Package-domain directory under the root: <root>/intel-rapl:0.
std::filesystem::path default_powercap_domain();

} // namespace joulemark
