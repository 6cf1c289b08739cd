#include "joulemark/process.hpp"

#include "joulemark/errors.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace joulemark {

ShellResult run_shell(const std::string& command, double timeout_s) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    pid_t pid = ::fork();
    if (pid < 0)
        throw Error(Errc::io_failure, std::string("fork failed: ") + std::strerror(errno));

    if (pid == 0) {
        ::setpgid(0, 0);
        ::setenv("LC_ALL", "C", 1);
        ::execl("/bin/bash", "bash", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }

    ShellResult result;
    const bool limited = timeout_s > 0;
    const auto deadline = start + std::chrono::duration_cast<clock::duration>(
                                      std::chrono::duration<double>(limited ? timeout_s : 0.0));

    int status = 0;
    for (;;) {
        pid_t done = ::waitpid(pid, &status, WNOHANG);
        if (done == pid)
            break;
        if (done < 0 && errno != EINTR)
            throw Error(Errc::io_failure, std::string("waitpid failed: ") + std::strerror(errno));
        if (limited && clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            result.timed_out = true;
            break;
        }
        ::usleep(500);
    }

    result.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    else
        result.exit_code = -1;
    return result;
}

} // namespace joulemark
