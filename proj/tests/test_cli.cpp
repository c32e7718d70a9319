#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lilbound/bound.hpp"
#include "lilbound/errors.hpp"
#include "lilbound/serialize.hpp"

using namespace lilbound;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "lilbound");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("lilbound_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, ConjugateCsvAndJson) {
    const CliRun csv = run({"conjugate", "--phi", "phi2", "--u", "0,1,2"});
    ASSERT_EQ(csv.code, 0) << csv.err;
    const CsvTable t = CsvTable::parse(csv.out);
    EXPECT_EQ(t.column("phi_star"), (std::vector<double>{0.0, 0.5, 2.0}));
    const CliRun js = run({"conjugate", "--phi", "phi2", "--u", "0,1,2", "--json"});
    ASSERT_EQ(js.code, 0);
    EXPECT_EQ(json_number_array(js.out, "phi_star"), (std::vector<double>{0.0, 0.5, 2.0}));
}

TEST(Cli, ParseGrid) {
    EXPECT_EQ(cli::parse_grid("1,2.5"), (std::vector<double>{1.0, 2.5}));
    EXPECT_EQ(cli::parse_grid("lin:0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(cli::parse_grid("log:1:100:3").size(), 3u);
    EXPECT_THROW(cli::parse_grid("lin:0:1"), DomainError);
    EXPECT_THROW(cli::parse_grid(""), DomainError);
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch_dir("codes");
    EXPECT_EQ(run({"conjugate", "--phi", "nope", "--u", "1"}).code, cli::kDomain);
    const CliRun unknown = run({"bound", "--model", "nope", "--out-dir", dir.string()});
    EXPECT_EQ(unknown.code, cli::kDomain);
    EXPECT_NE(unknown.err.find("model registry"), std::string::npos) << unknown.err;
    EXPECT_EQ(run({"bound", "--norming", "const:c=1", "--u", "3,4", "--out-dir", dir.string()}).code,
              cli::kAllDivergent);
    EXPECT_EQ(run({"verify", "-M", "100", "-N", "64", "--out-dir", dir.string()}).code, cli::kCensored);
    EXPECT_EQ(run({"bound", "--tol", "2", "--out-dir", dir.string()}).code, cli::kDomain);
    EXPECT_EQ(run({"bound", "--bogus"}).code, cli::kDomain);
    EXPECT_EQ(run({"models"}).code, cli::kOk);
}

TEST(Cli, BoundFilesRoundTrip) {
    const fs::path dir = scratch_dir("bound");
    const CliRun r = run({"bound", "--u", "3,4,6", "--out-dir", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const BoundProblem p{phi2(), SigmaProfile::power_law(0.5), NormingSequence::iterated_log(2.0), 0};
    const std::vector<double> u{3.0, 4.0, 6.0};
    const std::vector<double> direct = theorem_bound(p, u, 1.0).bounds();
    const std::vector<double> from_csv = CsvTable::parse(slurp(dir / "bound.csv")).column("bound");
    const std::vector<double> from_json = json_number_array(slurp(dir / "bound.json"), "bound");
    ASSERT_EQ(from_csv.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(from_csv[i], direct[i], 1e-12 * direct[i]);
        EXPECT_NEAR(from_json[i], direct[i], 1e-12 * direct[i]);
    }
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const fs::path dir = scratch_dir("config");
    {
        std::ofstream cfg(dir / "run.json");
        cfg << R"({"model": "chaos:d=1", "u_grid": [3, 4], "C": 2.0, "output_dir": ")" << dir.string() << "\"}";
    }
    ASSERT_EQ(run({"bound", "--config", (dir / "run.json").string(), "--C", "1"}).code, 0);
    const BoundProblem p{phi2(), SigmaProfile::power_law(0.5), NormingSequence::iterated_log(2.0), 0};
    const std::vector<double> u{3.0, 4.0};
    EXPECT_NEAR(json_number_array(slurp(dir / "bound.json"), "bound")[0], theorem_bound(p, u, 1.0).bounds()[0],
                1e-12);
    EXPECT_DOUBLE_EQ(json_number(slurp(dir / "bound.json"), "C_used"), 1.0);
}

TEST(Cli, ExactVerifySucceeds) {
    const fs::path dir = scratch_dir("exact");
    const CliRun r = run({"verify", "--exact", "-N", "12", "--u", "1,1.5,2", "--out-dir", dir.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    const CsvTable t = CsvTable::parse(slurp(dir / "sandwich.csv"));
    EXPECT_EQ(t.header, (std::vector<std::string>{"u", "lower_bound", "w_hat", "ci_high", "bound_at_Chat_u"}));
    EXPECT_EQ(t.rows.size(), 3u);
}

TEST(Cli, Reruns) {
    const fs::path a = scratch_dir("rerun_a");
    const fs::path b = scratch_dir("rerun_b");
    const std::vector<std::string> common{"simulate", "--model", "chaos:d=2", "--norming", "loglog:r=1",
                                          "-N", "256", "-M", "2000", "--seed", "9"};
    auto with = [&](const fs::path& dir, const std::string& workers) {
        std::vector<std::string> args = common;
        for (const auto& s : {std::string("--out-dir"), dir.string(), std::string("--workers"), workers})
            args.push_back(s);
        return run(args).code;
    };
    ASSERT_EQ(with(a, "1"), 0);
    ASSERT_EQ(with(b, "4"), 0);
    EXPECT_EQ(slurp(a / "tails.csv"), slurp(b / "tails.csv"));
    EXPECT_EQ(slurp(a / "tails.json"), slurp(b / "tails.json"));
}
