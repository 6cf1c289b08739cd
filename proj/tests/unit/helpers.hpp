#pragma once

#include "joulemark/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <sys/stat.h>

namespace testutil {

class TempDir {
public:
    TempDir() {
        char pattern[] = "/tmp/joulemark-test-XXXXXX";
        if (::mkdtemp(pattern) == nullptr)
            throw std::runtime_error("mkdtemp failed");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_script(const std::filesystem::path& path, const std::string& body) {
    write_file(path, "#!/bin/sh\n" + body);
    ::chmod(path.c_str(), 0755);
}

/// Fixture powercap domain with a fixed counter value.
inline std::filesystem::path make_powercap_domain(const std::filesystem::path& dir,
                                                  const std::string& energy = "123456",
                                                  const std::string& range = "262143328850") {
    std::filesystem::create_directories(dir);
    write_file(dir / "energy_uj", energy + "\n");
    write_file(dir / "max_energy_range_uj", range + "\n");
    return dir;
}

} // namespace testutil
