#include "joulemark/backend.hpp"

#include "joulemark/errors.hpp"

namespace joulemark {

const char* to_string(BackendKind kind) noexcept {
    switch (kind) {
    case BackendKind::powercap_systime: return "powercap-systime";
    case BackendKind::perf: return "perf";
    case BackendKind::synthetic: return "synthetic";
    }
    return "unknown";
}

BackendKind backend_from_string(const std::string& name) {
    if (name == "powercap-systime")
        return BackendKind::powercap_systime;
    if (name == "perf")
        return BackendKind::perf;
    if (name == "synthetic")
        return BackendKind::synthetic;
    throw Error(Errc::invalid_argument, "unknown backend: " + name);
}

} // namespace joulemark
