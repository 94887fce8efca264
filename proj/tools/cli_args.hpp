#pragma once

#include <string>
#include <vector>

#include "casbo/casbo.h"

namespace casbo_cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Parsed command line. The C config borrows its strings from this object, so
// it is rebuilt on every call to config().
struct Arguments {
    std::string problem;
    std::string mode = "bdtg";
    std::string out_dir;
    casbo_experiment_config raw{};

    const casbo_experiment_config& config();
};

struct ParseResult {
    bool proceed = false;  // false: exit immediately with exit_code
    int exit_code = kExitOk;
    std::string message;   // help text or usage error
    Arguments args;
};

ParseResult parse_cli(const std::vector<std::string>& argv);
ParseResult parse_cli(int argc, const char* const* argv);

}  // namespace casbo_cli
