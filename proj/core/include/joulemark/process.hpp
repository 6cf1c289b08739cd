#pragma once

#include <string>

namespace joulemark {

struct ShellResult {
    int exit_code = 0;
    double wall_ms = 0;
    bool timed_out = false;
};

/// Runs `command` through bash -c in its own process group with LC_ALL=C.
/// On timeout the whole group is killed and timed_out is set. timeout_s <= 0
/// means no limit. Wall time is measured around the child's lifetime.
ShellResult run_shell(const std::string& command, double timeout_s);

} // namespace joulemark
