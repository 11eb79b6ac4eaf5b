#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "vblob/errors.hpp"

namespace fs = std::filesystem;
using vblob::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "vblob");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, SimulatePrintsCsv) {
    const auto r = invoke({"simulate", "--cells", "4", "--steps", "2", "--tau", "0.5"});
    EXPECT_EQ(r.code, vblob::cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("# manifest: "), std::string::npos);
    EXPECT_NE(r.out.find("step,t,gamma,px,py,ell,ham"), std::string::npos);
}

TEST(Cli, OutputDirectoryReceivesFiles) {
    const fs::path dir = fs::temp_directory_path() / "vblob_cli_out";
    fs::remove_all(dir);
    const auto r = invoke({"simulate", "--cells", "4", "--steps", "1", "--method", "rm4", "--out", dir.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

TEST(Cli, DeterministicOutputIsReproducible) {
    const std::vector<std::string> args = {"simulate", "--problem", "random", "--vortices", "4", "--seed", "9", "--steps", "3"};
    EXPECT_EQ(invoke(args).out, invoke(args).out);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(invoke({}).code, vblob::cli::kExitUsage);
    EXPECT_EQ(invoke({"simulate", "--bogus"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--m", "3"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--method", "euler"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--deterministic", "maybe"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--q", "1.5"}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(invoke({"--help"}).code, 0); }

TEST(Cli, SolverFailureExitsThree) {
    const auto r = invoke({"simulate", "--cells", "4", "--steps", "2", "--max-iters", "1"});
    EXPECT_EQ(r.code, vblob::cli::kExitSolver);
    EXPECT_NE(r.err.find("step 1"), std::string::npos);
}

TEST(Cli, ExceptionMapping) {
    std::ostringstream err;
    using vblob::cli::exit_code_for;
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(vblob::PairDegeneracyError(0, 1, 3)), err), 4);
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(vblob::SolverFailure({}, {}, 1.0, 5)), err), 3);
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(vblob::ConfigError("x")), err), 2);
    EXPECT_EQ(exit_code_for(std::make_exception_ptr(std::runtime_error("x")), err), 1);
    EXPECT_NE(err.str().find("degeneracy"), std::string::npos);
}

TEST(Cli, OtherSubcommandsRun) {
    EXPECT_EQ(invoke({"e1-table", "--count", "4"}).code, 0);
    EXPECT_EQ(invoke({"conservation", "--cells", "4", "--steps", "2", "--methods", "dmm,rm2"}).code, 0);
    EXPECT_EQ(invoke({"conservation", "--cells-list", "4,8,16", "--steps", "1", "--methods", "dmm"}).code, 0);
    EXPECT_EQ(invoke({"temporal-order", "--orders", "2", "--taus", "0.5,0.25,0.125", "--T", "1"}).code, 0);
    EXPECT_EQ(invoke({"spatial-order", "--orders", "2", "--cells-list", "4,8,16", "--radial-panels", "2",
                      "--angular-nodes", "16"}).code, 0);
    EXPECT_EQ(invoke({"timing", "--steps", "5", "--seeds", "1,2", "--methods", "rm2,dmm"}).code, 0);
    EXPECT_EQ(invoke({"timing", "--steps", "5", "--seeds", "1", "--mode", "matched"}).code, 0);
}

TEST(Cli, ParallelSummationRuns) {
    const auto r = invoke({"simulate", "--cells", "6", "--steps", "2", "--deterministic", "off"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"deterministic\":\"off\""), std::string::npos);
}
