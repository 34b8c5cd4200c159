#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boostfold/errors.hpp>
#include <boostfold_cli/commands.hpp>

using namespace boostfold;
namespace fs = std::filesystem;

namespace {

class CommandTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("boostfold_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    cli::RunConfig load(const std::string& name) const {
        auto cfg = cli::load_config(std::string(BOOSTFOLD_CONFIG_DIR) + "/" + name);
        cfg.output.dir = dir_;
        return cfg;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    static std::size_t lines(const fs::path& p) {
        const std::string s = slurp(p);
        return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
    }

    fs::path dir_;
};

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BOOSTFOLD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(CommandTest, AnalyzeExample1) {
    const auto res = cli::cmd_analyze(load("example1.cfg"));
    EXPECT_TRUE(contains(res.report, "D_S                 0.78")) << res.report;
    EXPECT_TRUE(contains(res.report, "v_r*                7.096")) << res.report;
    EXPECT_TRUE(contains(res.report, "D_H                 0.5145")) << res.report;
    EXPECT_TRUE(contains(res.report, "Hopf before SNB     true")) << res.report;
    ASSERT_EQ(res.files.size(), 1u);
    EXPECT_EQ(res.files[0].filename(), "example1_analyze.csv");
    EXPECT_TRUE(contains(slurp(res.files[0]), "quantity,value\n"));
}

TEST_F(CommandTest, AnalyzeOtherExamples) {
    EXPECT_TRUE(contains(cli::cmd_analyze(load("example2.cfg")).report, "v_r*                30.96"));
    EXPECT_TRUE(contains(cli::cmd_analyze(load("example3.cfg")).report, "v_r*                17.71"));
}

TEST_F(CommandTest, PolesSignChanges) {
    const auto res = cli::cmd_poles(load("example1.cfg"));
    EXPECT_TRUE(contains(res.report, "c0 changes sign at D = 0.78")) << res.report;
    EXPECT_TRUE(contains(res.report, "c1 changes sign at D = 0.5145")) << res.report;
    EXPECT_EQ(lines(res.files.at(0)), 97u);
    EXPECT_THROW(cli::cmd_poles(load("example3.cfg")), ValidationError);
}

TEST_F(CommandTest, SteadyExample2) {
    const auto res = cli::cmd_steady(load("example2.cfg"), 30.3);
    EXPECT_TRUE(contains(res.report, "2 averaged operating point(s)")) << res.report;
    EXPECT_TRUE(contains(res.report, "2 periodic orbit(s)")) << res.report;
    EXPECT_TRUE(contains(res.report, "stable")) << res.report;
    ASSERT_EQ(res.files.size(), 2u);
    EXPECT_EQ(lines(res.files[1]), 3u);
}

TEST_F(CommandTest, SimulateReachesDcSaturation) {
    const auto res = cli::cmd_simulate(load("example1.cfg"), 5.5, {29.0, 0.1}, 500);
    EXPECT_TRUE(contains(res.report, "DC saturation       true")) << res.report;
    // header, one record per saturated cycle, terminal record
    EXPECT_EQ(lines(res.files.at(0)), 1u + 500u + 1u);
}

TEST_F(CommandTest, SimulateRejectsWrongDimension) {
    EXPECT_THROW(cli::cmd_simulate(load("example2.cfg"), 30.3, {1.0, 2.0}, 10), ValidationError);
}

TEST_F(CommandTest, SweepDeterministic) {
    auto cfg = load("example1.cfg");
    cfg.sweep.points = 21;
    cfg.output.run_id = "a";
    const auto a = cli::cmd_sweep(cfg, 1);
    cfg.output.run_id = "b";
    const auto b = cli::cmd_sweep(cfg, 2);
    ASSERT_EQ(a.files.size(), 2u);
    EXPECT_EQ(slurp(a.files[0]), slurp(b.files[0]));
    EXPECT_EQ(slurp(a.files[1]), slurp(b.files[1]));
    EXPECT_TRUE(contains(a.report, "snb")) << a.report;
}

TEST_F(CommandTest, SweepNeedsRange) {
    auto cfg = load("example1.cfg");
    cfg.sweep.from.reset();
    EXPECT_THROW(cli::cmd_sweep(cfg, 1), ValidationError);
}

TEST_F(CommandTest, ExitCodes) {
    EXPECT_EQ(cli::exit_code_for(ParseError(3, "x")), 2);
    EXPECT_EQ(cli::exit_code_for(ValidationError("k", "x")), 3);
    EXPECT_EQ(cli::exit_code_for(ConvergenceError("x")), 4);
    EXPECT_EQ(cli::exit_code_for(IoError("x")), 5);
    EXPECT_EQ(cli::exit_code_for(std::runtime_error("x")), 1);
}

TEST_F(CommandTest, BinaryEndToEnd) {
    const std::string cfg = std::string(BOOSTFOLD_CONFIG_DIR) + "/example1.cfg";
    const std::string out = " --out " + dir_.string();
    EXPECT_EQ(run_cli("--config " + cfg + out + " analyze"), 0);
    EXPECT_TRUE(fs::exists(dir_ / "example1_analyze.csv"));
    EXPECT_EQ(run_cli("--config " + cfg + out + " --run-id x simulate --vr 5.5 --cycles 20 --x0 29,0.1"), 0);
    EXPECT_TRUE(fs::exists(dir_ / "x_trajectory.csv"));
    EXPECT_EQ(run_cli("--config " + cfg + out + " simulate --x0 1,2,3"), 3);
    EXPECT_EQ(run_cli("--config " + cfg + out + " frobnicate"), 2);

    const fs::path bad = dir_ / "bad.cfg";
    std::ofstream(bad) << "[converter]\nv_s = three\n";
    EXPECT_EQ(run_cli("--config " + bad.string() + out + " analyze"), 2);
    EXPECT_EQ(run_cli("--config " + cfg + " --out /proc/forbidden analyze"), 5);
}
