// End-to-end runs of the command-line tool.

#include "incrack/io.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(INCRACK_CLI) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

// data rows of a CSV output, split on commas
std::vector<std::vector<std::string>> csv_rows(const std::string& s) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(s);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

const std::string kData = INCRACK_TEST_DATA;

}  // namespace

TEST(Cli, SifPointLoadSmallInclusion) {
    const CliRun r = run("sif --nu 0.05 --k 0.005 --load point");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("# incrack 1.0.0 config=", 0), 0u);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(std::stod(rows[0][2]), 0.2820963648, 1e-9);
    EXPECT_NEAR(std::stod(rows[0][4]), 0.1335321578, 1e-9);
    EXPECT_LT(std::stod(rows[0][6]), 1e-6);
}

TEST(Cli, InvalidConfigurationExitsWithTwo) {
    EXPECT_EQ(run("sif --config " + kData + "/bad.json").code, 2);
    EXPECT_EQ(run("sif --nu 0.7 --k 0.5").code, 2);
    EXPECT_EQ(run("sif --model 2 --k 0.5").code, 2);
    EXPECT_EQ(run("sweep --k 0.1:0.9:x").code, 2);
    EXPECT_EQ(run("sif --config /nonexistent.json").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, QuadratureOrderDoesNotChangeResults) {
    const auto lo = csv_rows(run("sif --k 0.6 --nu 0.2 --quad-n 50 --quad-m 50 --quad-l 50 --no-residual").out);
    const auto hi = csv_rows(run("sif --k 0.6 --nu 0.2 --quad-n 400 --quad-m 400 --quad-l 400 --no-residual").out);
    ASSERT_EQ(lo.size(), 1u);
    ASSERT_EQ(hi.size(), 1u);
    for (int c = 2; c <= 5; ++c) EXPECT_NEAR(std::stod(lo[0][c]), std::stod(hi[0][c]), 1e-7) << c;
}

TEST(Cli, SweepIsOrderedAndOpeningModeIncreases) {
    const CliRun r = run("sweep --k 0.1:0.9:17 --nu 0.3 --no-residual");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 17u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GT(std::stod(rows[i][0]), std::stod(rows[i - 1][0]));
        EXPECT_GT(std::stod(rows[i][2]), std::stod(rows[i - 1][2]));
    }
}

TEST(Cli, SinglePointSweepEqualsSif) {
    const auto a = csv_rows(run("sweep --k 0.4:0.4:1 --nu 0.25").out);
    const auto b = csv_rows(run("sif --k 0.4 --nu 0.25").out);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a, b);
}

TEST(Cli, SweepOverSeveralPoissonRatios) {
    const auto rows = csv_rows(run("sweep --k 0.2:0.6:3 --nu 0.05 --nu 0.45 --no-residual").out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0][1], "0.05");
    EXPECT_EQ(rows[5][1], "0.45");
}

TEST(Cli, OutputIsByteDeterministic) {
    const std::string args = "sweep --k 0.2:0.8:4 --nu 0.3";
    const CliRun a = run(args + " --threads 4"), b = run(args + " --threads 1");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, JsonAndSvgFormats) {
    const CliRun j = run("sif --k 0.5 --format json");
    ASSERT_EQ(j.code, 0);
    const auto doc = incrack::json::parse(j.out);
    EXPECT_NEAR(doc["rows"][0]["K1p_norm"].get<double>(), 0.3022280155, 5e-10);
    EXPECT_EQ(doc["fingerprint"].get<std::string>().size(), 16u);
    const CliRun s = run("sweep --k 0.2:0.8:4 --format svg --no-residual");
    ASSERT_EQ(s.code, 0);
    EXPECT_EQ(s.out.rfind("<svg", 0), 0u);
}

TEST(Cli, ProfileLoadFromFile) {
    const CliRun r = run("sif --k 0.5 --load profile --profile-file " + kData + "/profiles.json");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_LT(std::stod(rows[0][6]), 1e-6);
    EXPECT_EQ(run("sif --k 0.5 --load profile").code, 2);
}

TEST(Cli, TraceHasCentreNode) {
    const CliRun r = run("trace --k 0.7 --nodes 21");
    ASSERT_EQ(r.code, 0);
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 21u);
    EXPECT_EQ(rows[10][0], "0");
    EXPECT_NEAR(std::stod(rows[10][1]), 0.0, 1e-12);  // shear vanishes at the centre
}

TEST(Cli, VerifyExitCodes) {
    const CliRun ok = run("verify --k 0.5 --nu 0.3");
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(incrack::json::parse(ok.out)["pass"].get<bool>());
    EXPECT_EQ(run("verify --k 0.5 --check factorization --perturb-gamma").code, 4);
    const auto one = incrack::json::parse(run("verify --k 0.5 --check theta").out);
    ASSERT_EQ(one["checks"].size(), 1u);
    EXPECT_EQ(one["checks"][0]["name"], "theta");
    EXPECT_EQ(run("verify --k 0.5 --check nonsense").code, 2);
    EXPECT_EQ(run("verify --model equal --check residual --check moment").code, 0);
}

TEST(Cli, LimitsTable) {
    const auto rows = csv_rows(run("limits --nu 0.05 --nu 0.25 --nu 0.45").out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NEAR(std::stod(rows[0][1]), 0.2820948, 5e-8);
    EXPECT_NEAR(std::stod(rows[0][2]), 0.1339950, 5e-8);
    EXPECT_NEAR(std::stod(rows[1][2]), 0.1057855, 5e-8);
    EXPECT_NEAR(std::stod(rows[2][2]), 0.07757607, 5e-9);
}

TEST(Cli, WritesToFile) {
    const std::string path = testing::TempDir() + "incrack_cli_out.csv";
    ASSERT_EQ(run("limits --out " + path).code, 0);
    std::FILE* f = std::fopen(path.c_str(), "r");
    ASSERT_NE(f, nullptr);
    std::fclose(f);
    std::remove(path.c_str());
}
