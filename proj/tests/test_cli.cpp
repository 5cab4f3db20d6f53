#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "ctqw/experiment.hpp"

namespace fs = std::filesystem;
using namespace ctqw::cli;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("ctqw_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int shell(const std::string& args)
{
    const std::string command = std::string(CTQW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig config(Command command)
{
    ExperimentConfig c;
    c.command = command;
    return c;
}

} // namespace

TEST(Config, JsonRoundTrip)
{
    auto c = config(Command::Diagnose);
    c.model.kind = "torus";
    c.model.d = 2;
    c.model.l = 9;
    c.law.kind = "jittered";
    c.law.delta = 0.05;
    c.seed = 0xffffffffffffffffULL;
    c.out = "x.csv";
    c.max_points = 12345;
    EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
    EXPECT_THROW(config_from_json({{"command", "p0-trace"}}), std::invalid_argument);
}

TEST(Config, CommandNames)
{
    for (auto c : {Command::P0Trace, Command::Schedule, Command::PolyaMC, Command::PolyaQuad, Command::Diagnose,
                   Command::Classify, Command::Table1}) {
        EXPECT_EQ(parse_command(command_name(c)), c);
    }
    EXPECT_FALSE(parse_command("plot").has_value());
}

TEST(Config, ValidationCatchesBadKnobs)
{
    auto c = config(Command::P0Trace);
    c.model.kind = "line";
    c.model.gamma = 2.0;
    EXPECT_THROW(validate(c), std::invalid_argument);

    c = config(Command::PolyaQuad);
    c.model.kind = "lattice";
    c.law.kind = "periodic";
    EXPECT_THROW(validate(c), std::invalid_argument);

    c = config(Command::P0Trace);
    c.model.kind = "path";
    c.model.route = "closed-form";
    EXPECT_THROW(validate(c), std::invalid_argument);

    c = config(Command::Schedule);
    c.law.kind = "jittered";
    c.law.period = 1.0;
    c.law.delta = 0.6;
    EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST_F(CliTest, TraceCsvAndManifest)
{
    auto c = config(Command::P0Trace);
    c.out = path("trace.csv");
    c.t_max = 50.0;
    c.points = 2000;
    std::ostringstream out, err;
    ASSERT_EQ(run(c, out, err), kExitOk) << err.str();

    std::ifstream csv(c.out);
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "t,p0");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 2000u);

    const auto manifest = nlohmann::json::parse(slurp(c.out + ".manifest.json"));
    EXPECT_EQ(manifest.at("tool"), "ctqw");
    EXPECT_EQ(manifest.at("command"), "p0-trace");
    EXPECT_EQ(manifest.at("rng_id"), "splitmix64");
    EXPECT_EQ(manifest.at("seed"), 42u);
    EXPECT_EQ(manifest.at("version"), std::string(tool_version()));
    EXPECT_EQ(manifest.at("config"), to_json(c));
}

TEST_F(CliTest, ManifestCanBeDisabled)
{
    auto c = config(Command::Schedule);
    c.out = path("s.csv");
    c.json_manifest = false;
    std::ostringstream out, err;
    ASSERT_EQ(run(c, out, err), kExitOk);
    EXPECT_TRUE(fs::exists(c.out));
    EXPECT_FALSE(fs::exists(c.out + ".manifest.json"));
}

TEST_F(CliTest, ReplayIsByteIdentical)
{
    std::vector<ExperimentConfig> configs;
    auto c = config(Command::PolyaMC);
    c.model.kind = "lattice";
    c.trials = 20000;
    c.out = path("mc.json");
    configs.push_back(c);
    c = config(Command::Schedule);
    c.law.kind = "jittered";
    c.count = 50;
    c.out = path("schedule.json");
    configs.push_back(c);
    c = config(Command::Diagnose);
    c.model.kind = "cycle";
    c.max_points = 2000;
    c.out = path("diag.csv");
    configs.push_back(c);
    c = config(Command::Classify);
    c.model.kind = "envelope";
    c.model.alpha = 3.0;
    c.out = path("verdict.json");
    configs.push_back(c);

    for (const auto& original : configs) {
        SCOPED_TRACE(original.out);
        std::ostringstream out, err;
        ASSERT_EQ(run(original, out, err), kExitOk) << err.str();
        const std::string replayed = path("replay_" + fs::path(original.out).filename().string());
        ASSERT_EQ(replay(original.out + ".manifest.json", replayed, out, err), kExitOk) << err.str();
        EXPECT_EQ(slurp(original.out), slurp(replayed));
        if (original.command == Command::Diagnose) {
            EXPECT_EQ(slurp(original.out + ".fit.json"), slurp(replayed + ".fit.json"));
        }
    }
}

TEST_F(CliTest, ClassifyEnvelope)
{
    auto c = config(Command::Classify);
    c.model.kind = "envelope";
    c.model.alpha = 3.0;
    c.out = path("verdict.json");
    std::ostringstream out, err;
    ASSERT_EQ(run(c, out, err), kExitOk);
    EXPECT_EQ(nlohmann::json::parse(slurp(c.out)).at("verdict"), "transient");
}

TEST_F(CliTest, ExitCodes)
{
    std::ostringstream out, err;
    auto c = config(Command::P0Trace);
    c.model.kind = "hexagon";
    EXPECT_EQ(run(c, out, err), kExitInvalidConfig);

    c = config(Command::P0Trace);
    c.model.kind = "torus";
    c.model.d = 3;
    c.model.l = 17;
    EXPECT_EQ(run(c, out, err), kExitResourceLimit);

    c = config(Command::PolyaQuad);
    c.model.kind = "lattice";
    c.n_points = 4;
    c.nodes = 128;
    EXPECT_EQ(run(c, out, err), kExitResourceLimit);

    c = config(Command::P0Trace);
    c.out = path("missing/dir/trace.csv");
    EXPECT_EQ(run(c, out, err), kExitFailure);

    EXPECT_EQ(replay(path("absent.json"), std::nullopt, out, err), kExitInvalidConfig);
}

TEST_F(CliTest, Binary)
{
    const auto out = path("trace.csv");
    EXPECT_EQ(shell("p0-trace --model line --t-max 50 --points 2000 --out " + out), 0);
    EXPECT_TRUE(fs::exists(out + ".manifest.json"));
    EXPECT_EQ(shell("replay --manifest " + out + ".manifest.json --out " + out + ".again"), 0);
    EXPECT_EQ(slurp(out), slurp(out + ".again"));

    EXPECT_EQ(shell("--help"), 0);
    EXPECT_EQ(shell("p0-trace --model line --gamma 2"), 2);
    EXPECT_EQ(shell("p0-trace --no-such-flag"), 2);
    EXPECT_EQ(shell(""), 2);
    EXPECT_EQ(shell("polya-quad --model lattice --d 3 --n-points 4 --nodes 200"), 3);
    EXPECT_EQ(shell("schedule --law periodic --period 0.5 --first 0.5 --count 4 --json-manifest false --out " + path("s.csv")), 0);
    EXPECT_EQ(slurp(path("s.csv")), "index,t\n1,0.5\n2,1\n3,1.5\n4,2\n");
}
