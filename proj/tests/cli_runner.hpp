#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace testing_support {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string shell_quote(const std::string& s)
{
    std::string q = "'";
    for (char c : s)
        q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

/// Scratch directory unique to this test process.
inline std::filesystem::path scratch_dir()
{
    static const auto dir = [] {
        auto d = std::filesystem::temp_directory_path() / ("cvdshift_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

/// Runs the command-line tool with `args`, capturing stdout and stderr.
inline CliResult run_cli(const std::vector<std::string>& args)
{
    static int counter = 0;
    const auto base = scratch_dir() / ("run" + std::to_string(counter++));
    std::string cmd = shell_quote(CVDSHIFT_CLI);
    for (const auto& a : args)
        cmd += " " + shell_quote(a);
    cmd += " >" + shell_quote(base.string() + ".out") + " 2>" + shell_quote(base.string() + ".err");
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(base.string() + ".out");
    r.err = read_file(base.string() + ".err");
    return r;
}

}  // namespace testing_support
