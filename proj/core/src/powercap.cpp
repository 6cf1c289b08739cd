#include "joulemark/powercap.hpp"

#include "joulemark/errors.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <string>

namespace joulemark {

namespace {

std::uint64_t read_counter_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::path_unreadable, "cannot read " + path.string());
    std::string text;
    std::getline(in, text);
    while (!text.empty() && (text.back() == '\r' || text.back() == ' '))
        text.pop_back();

    std::uint64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw Error(Errc::malformed_counter, "non-integer content in " + path.string() + ": \"" + text + "\"");
    return value;
}

} // namespace

CounterSnapshot read_package_energy(const std::filesystem::path& domain_path) {
    CounterSnapshot snap;
    snap.energy_uj = read_counter_file(domain_path / "energy_uj");
    snap.max_range_uj = read_counter_file(domain_path / "max_energy_range_uj");
    if (snap.max_range_uj == 0)
        throw Error(Errc::malformed_counter, "zero max_energy_range_uj in " + domain_path.string());
    if (snap.energy_uj >= snap.max_range_uj)
        throw Error(Errc::malformed_counter, "energy_uj not below max_energy_range_uj in " + domain_path.string());
    snap.timestamp_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
            .count();
    return snap;
}

double counter_delta(const CounterSnapshot& before, const CounterSnapshot& after) {
    if (before.max_range_uj != after.max_range_uj)
        throw Error(Errc::mismatched_range, "snapshots from counters with different ranges");
    std::uint64_t delta_uj = 0;
    if (after.energy_uj >= before.energy_uj)
        delta_uj = after.energy_uj - before.energy_uj;
    else
        delta_uj = after.energy_uj + (before.max_range_uj - before.energy_uj);
    return static_cast<double>(delta_uj) * 1e-6;
}

std::filesystem::path powercap_root() {
    if (const char* env = std::getenv("JOULEMARK_POWERCAP_ROOT"); env != nullptr && *env != '\0')
        return env;
    return "/sys/class/powercap";
}

std::filesystem::path default_powercap_domain() {
    return powercap_root() / "intel-rapl:0";
}

} // namespace joulemark
