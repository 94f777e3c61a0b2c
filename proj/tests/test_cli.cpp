#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "padendro/cli.hpp"

namespace padendro {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / ("padendro_cli_" + name);
  std::ofstream(path, std::ios::binary) << contents;
  return path.string();
}

const std::vector<std::string> kToy{"0", "1", "3", "4", "12", "20", "32", "64"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST(Cli, ValuateJsonAndTable) {
  const Result r = run({"valuate", "0", "4", "12", "--p", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["matrix"][1][2], 3);
  EXPECT_EQ(j["matrix"][0][0], "inf");
  EXPECT_EQ(j["valuations"][1], 2);
  const Result t = run({"valuate", "0", "4", "--format", "table", "--digits", "5"});
  ASSERT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("[00100]_2"), std::string::npos);
}

TEST(Cli, ClusterFormats) {
  const Result r = run(cat({"cluster", "--include-infinity", "--format", "table"}, kToy));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "((((0,64)@6,32)@5,((4,20)@4,12)@3)@2,(1,3)@1,inf)@0\n");
  const Result nw = run({"cluster", "0", "64", "--format", "newick"});
  EXPECT_EQ(nw.out, "(0:6,64:6);\n");
  const Result dot = run({"cluster", "0", "1", "--format", "dot"});
  EXPECT_EQ(dot.out.rfind("digraph", 0), 0U);
}

TEST(Cli, PointsFromFileWithComments) {
  const std::string path = temp_file("points.txt", "# toy data\n0\n1\n\n3   # odd\ninf\n");
  const Result r = run({"cluster", "--in", path, "--format", "table"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "(0,(1,3)@1,inf)@0\n");
  const std::string bad = temp_file("bad.txt", "0\n1\nfoo\n");
  const Result e = run({"cluster", "--in", bad});
  EXPECT_EQ(e.code, 1);
  EXPECT_NE(e.err.find("line 3"), std::string::npos) << e.err;
}

TEST(Cli, HiddenInsertAndFamily) {
  const Result tree = run(cat({"cluster", "--include-infinity"}, kToy));
  const std::string path = temp_file("fig2.json", tree.out);
  const Json h = Json::parse(run({"hidden", "--in", path}).out);
  EXPECT_EQ(h["v_h"], 1);
  EXPECT_EQ(h["bounds"]["v_h"]["slack"], "5/4");

  const Result ins = run({"insert", "2", "--in", path});
  ASSERT_EQ(ins.code, 0) << ins.err;
  const Json i = Json::parse(ins.out);
  EXPECT_EQ(i["join_level"], 1);
  EXPECT_EQ(i["site"]["kind"], "edge");

  const Result sampled = run({"insert", "--in", path, "--seed", "42", "--mode", "haar"});
  ASSERT_EQ(sampled.code, 0) << sampled.err;
  EXPECT_EQ(sampled.out, run({"insert", "--in", path, "--seed", "42", "--mode", "haar"}).out);

  const std::string series = temp_file(
      "series.json", R"({"p":2,"configs":[{"t":"a","points":["0","1","4","inf"]},{"t":"b","points":["0","1","6","inf"]}]})");
  const Json f = Json::parse(run({"family", "--in", series}).out);
  EXPECT_EQ(f["transitions"][0]["kind"], "LEVEL_SHIFT");
  EXPECT_EQ(f["transitions"][0]["from"], "a");
}

TEST(Cli, EmbedAndEncode) {
  const std::string path = temp_file("star.json", R"({"labels":["a","b","c"],"tree":{"level":0,"children":[{"leaf":0},{"leaf":1},{"leaf":2}]}})");
  const Result small = run({"embed", "--in", path});
  EXPECT_EQ(small.code, 1);
  EXPECT_NE(small.err.find("{a,b,c}"), std::string::npos);
  const Result big = run({"embed", "--in", path, "--q", "4"});
  ASSERT_EQ(big.code, 0) << big.err;
  EXPECT_EQ(Json::parse(big.out)["codes"]["c"], "2");

  const std::string words = temp_file("words.txt", "ab\nac\nb\n");
  const Json e = Json::parse(run({"encode", "--in", words}).out);
  EXPECT_EQ(e["q"], 4);
  EXPECT_EQ(e["codes"]["ac"], "02");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({"cluster", "0", "1", "--format", "xml"}).code, 2);
  const std::string tree = temp_file("pair.json", run({"cluster", "0", "1"}).out);
  EXPECT_EQ(run({"insert", "--in", tree}).code, 2);  // neither point nor seed
  EXPECT_EQ(run({"insert", "--in", temp_file("empty.json", "{}")}).code, 1);
  EXPECT_EQ(run({"valuate", "1", "1"}).code, 1);
  EXPECT_EQ(run({"valuate", "1", "2", "--p", "4"}).code, 1);
  EXPECT_EQ(run({"cluster", "1"}).code, 1);
  const Result missing = run({"hidden", "--in", "/nonexistent/tree.json"});
  EXPECT_NE(missing.code, 0);
  EXPECT_FALSE(missing.err.empty());
}

TEST(Cli, OutputIsDeterministic) {
  for (const auto& fmt : {"json", "newick", "dot", "table"}) {
    const auto args = cat({"cluster", "--include-infinity", "--format", fmt}, kToy);
    EXPECT_EQ(run(args).out, run(args).out);
  }
}

TEST(Cli, WritesOutputFile) {
  const auto path = (std::filesystem::temp_directory_path() / "padendro_cli_out.txt").string();
  ASSERT_EQ(run({"cluster", "0", "64", "--format", "newick", "--out", path}).code, 0);
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "(0:6,64:6);");
}

}  // namespace
}  // namespace padendro
