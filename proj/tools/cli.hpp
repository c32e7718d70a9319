#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lilbound::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kDomain = 2,
    kNonconvergence = 3,
    kAllDivergent = 4,
    kDominanceFailed = 5,
    kCensored = 6,
};

struct RunConfig {
    std::string model = "chaos:d=1";
    /// Empty selects the model's own phi.
    std::string phi;
    std::string norming = "loglog:r=2";
    /// "a,b,c", "lin:lo:hi:count" or "log:lo:hi:count"; empty selects the default.
    std::string u_grid;
    std::int64_t horizon = 16384;
    std::int64_t paths = 100000;
    std::int64_t seed = 1;
    std::string ratio_grid;
    double tolerance = 1e-6;
    double C = 1.0;
    std::filesystem::path output_dir = ".";
    unsigned workers = 0;
    bool exact = false;

    /// Throws DomainError on out-of-range fields.
    void validate() const;
};

/// Fields present in the JSON document override `base`.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

std::vector<double> parse_grid(const std::string& spec);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lilbound::cli
