#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

using nlohmann::json;

namespace {

const std::string kCli = PAINTMO_CLI;
const std::string kData = PAINTMO_TEST_DATA;

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args, bool capture_stderr = false) {
    const std::string cmd = kCli + " " + args + (capture_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string tmp(const std::string& name) { return ::testing::TempDir() + "/cli_" + name; }

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

} // namespace

TEST(Cli, IngestWritesCanonicalJson) {
    const auto r = run("ingest --input " + kData + "/wastewater.csv");
    ASSERT_EQ(r.status, 0);
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc.at("space"), "canonical");
    EXPECT_EQ(doc.at("points")[0][4], -9731);
}

TEST(Cli, PaintThreePoints) {
    const auto out = tmp("approx.json");
    const auto r = run("paint --input " + kData + "/three_points.csv --output " + out);
    ASSERT_EQ(r.status, 0) << r.out;
    const auto summary = json::parse(r.out);
    EXPECT_EQ(summary.at("polytopes"), 2);
    const auto& stats = summary.at("stats");
    EXPECT_GE(stats.at("candidates").get<int>(), stats.at("accepted").get<int>());
    EXPECT_EQ(stats.at("after_removal"), 2);
    std::ifstream in(out);
    EXPECT_EQ(json::parse(in).at("format"), "paintmo-approximation");
}

TEST(Cli, SurrogateAndMilp) {
    const auto approx = tmp("approx_s.json");
    ASSERT_EQ(run("paint --input " + kData + "/three_points.csv --output " + approx).status, 0);
    const auto r = run("surrogate --input " + approx + " --output " + tmp("surrogate.json") + " --milp " +
                       tmp("model.lp") + " --reference 0,0");
    ASSERT_EQ(r.status, 0);
    const auto summary = json::parse(r.out);
    EXPECT_EQ(summary.at("continuous_variables"), 4);
    EXPECT_EQ(summary.at("binary_variables"), 2);
    std::ifstream lp(tmp("model.lp"));
    std::string text{std::istreambuf_iterator<char>(lp), {}};
    EXPECT_NE(text.find("Binaries"), std::string::npos);
}

TEST(Cli, SessionFlow) {
    const auto approx = tmp("approx_flow.json");
    const auto session = tmp("session.json");
    ASSERT_EQ(run("paint --input " + kData + "/three_points.csv --output " + approx).status, 0);
    ASSERT_EQ(run("session start --input " + approx + " --output " + session + " --problem convex2").status, 0);

    write(tmp("bad.json"), R"({"classes":[{"class":"keep"},{"class":"keep"}]})");
    auto r = run("session classify --session " + session + " --input " + tmp("bad.json"), true);
    EXPECT_NE(r.status, 0);
    const auto err = json::parse(r.out);
    EXPECT_EQ(err.at("error").at("kind"), "violations");
    EXPECT_FALSE(err.at("violations").empty());

    write(tmp("good.json"), R"({"classes":[{"objective":"f1","class":"improve"},{"objective":"f2","class":"free"}]})");
    r = run("session classify --session " + session + " --input " + tmp("good.json"));
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(json::parse(r.out).at("index"), 1);

    r = run("session project --session " + session + " --index 0");
    ASSERT_EQ(r.status, 0) << r.out;
    const auto job = json::parse(r.out);
    r = run("session status --session " + session + " --job " + std::to_string(job.at("id").get<int>()));
    ASSERT_EQ(r.status, 0);
    const auto status = json::parse(r.out);
    EXPECT_EQ(status.at("status"), "done");
    const auto& tr = status.at("transitions");
    ASSERT_EQ(tr.size(), 3u);
    EXPECT_EQ(tr[0].at("status"), "pending");
    EXPECT_EQ(tr[1].at("status"), "running");
    EXPECT_EQ(tr[2].at("status"), "done");
    EXPECT_EQ(status.at("result").at("kind"), "projection");

    r = run("session select --session " + session + " --index 2");
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(json::parse(r.out).at("is_current").get<bool>());
    r = run("session history --session " + session);
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(json::parse(r.out).size(), 3u);

    write(tmp("extra.csv"), "name,f1,f2\nunit,,\ndirection,min,min\nd,0.2,0.7\n");
    r = run("update --session " + session + " --input " + tmp("extra.csv"));
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(json::parse(r.out).at("outcomes"), 4);
}

TEST(Cli, ErrorsAreMachineReadable) {
    auto r = run("paint --input /nonexistent.csv", true);
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(json::parse(r.out).at("error").at("kind"), "io");
    write(tmp("two.csv"), "name,f1,f2\nunit,,\ndirection,min,min\na,0,1\nb,1,0\n");
    r = run("paint --input " + tmp("two.csv"), true);
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(json::parse(r.out).at("error").at("kind"), "too_few_points");
    write(tmp("cfg.json"), R"({"paint":{"bogus":1}})");
    r = run("paint --input " + kData + "/three_points.csv --config " + tmp("cfg.json"), true);
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(json::parse(r.out).at("error").at("kind"), "schema");
}

TEST(Cli, GenerateIsDeterministic) {
    const auto a = run("generate --problem convex2 --count 8 --seed 4");
    const auto b = run("generate --problem convex2 --count 8 --seed 4");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_GE(json::parse(a.out).at("points").size(), 3u);
}
