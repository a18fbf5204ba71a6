#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#ifndef VECCOH_CLI_PATH
#define VECCOH_CLI_PATH "veccoh"
#endif

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(VECCOH_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

}  // namespace

TEST(Cli, StructurePasses) {
    auto r = run_cli("structure --m 2");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("28"), std::string::npos);
}

TEST(Cli, StructureRejectsLowDimension) {
    EXPECT_EQ(run_cli("structure --m 1").exit_code, 2);
}

TEST(Cli, UnknownFlagIsUsageError) {
    EXPECT_EQ(run_cli("structure --definitely-not-a-flag 3").exit_code, 2);
}

TEST(Cli, IncompatibleFamilyIsUsageError) {
    // c01 needs q = p + 1
    EXPECT_EQ(run_cli("cocycle --family c01 --m 2 --p 0 --q 0 --k 1").exit_code, 2);
}

TEST(Cli, CocycleJsonIsDeterministicPerSeed) {
    std::string args = "cocycle --family c10 --m 2 --p 0 --q 1 --k 0 --trials 5 --seed 11 --json";
    auto a = run_cli(args);
    auto b = run_cli(args);
    EXPECT_EQ(a.exit_code, 0) << a.output;
    EXPECT_EQ(a.output, b.output);
    auto j = nlohmann::json::parse(a.output);
    EXPECT_EQ(j["command"], "cocycle");
    EXPECT_EQ(j["seed"], 11);
    EXPECT_TRUE(j["elapsed_ms"].is_null());
}

TEST(Cli, CohomologyReportsExpectedCell) {
    auto r = run_cli("cohomology --species mv --m 2 --p 1 --q 1 --k 1 --u 1 --json");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    auto j = nlohmann::json::parse(r.output);
    EXPECT_EQ(j["checks"][0]["computed"], 1);
    EXPECT_EQ(j["checks"][0]["expected"], 1);
    EXPECT_EQ(j["checks"][0]["match"], true);
}

TEST(Cli, ThetaFormVanishes) {
    auto r = run_cli("theta --species form --m 2 --p 0 --q 1 --json");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    auto j = nlohmann::json::parse(r.output);
    EXPECT_EQ(j["checks"][0]["computed"], 0);
}

TEST(Cli, ReportSmallTableAllMatch) {
    auto r = run_cli("report --m 2 --max-k 1 --json");
    EXPECT_EQ(r.exit_code, 0) << r.output;
    auto j = nlohmann::json::parse(r.output);
    // 2 species x 3x3 degrees x 2 orders x 2 cohomology degrees
    EXPECT_EQ(j["checks"].size(), 72u);
    for (const auto& c : j["checks"])
        if (!c["match"].is_null()) EXPECT_EQ(c["match"], true) << c.dump();
}
