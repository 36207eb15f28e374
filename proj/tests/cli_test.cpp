#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace msaeval;
namespace fs = std::filesystem;

namespace {

std::string data_path(const char* name) { return std::string(MSAEVAL_TEST_DATA) + "/" + name; }

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("msaeval_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ScoreSixPairFixture) {
  auto r = run({"score", "--gold", data_path("six_gold.jsonl"), "--pred", data_path("six_pred.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "strict_macro_f1=66.67\nstrict_accuracy=66.67\nlenient_macro_f1=77.78\nlenient_accuracy=83.33\n");
}

TEST_F(CliTest, ScorePerClassAndMode) {
  auto r = run({"score", "--gold", data_path("six_gold.jsonl"), "--pred", data_path("six_pred.jsonl"), "--mode",
                "strict", "--per-class"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("strict.to_some_extent.precision=50.00\n"), std::string::npos);
  EXPECT_NE(r.out.find("strict.no.recall=50.00\n"), std::string::npos);
  EXPECT_NE(r.out.find("strict.yes.support=3\n"), std::string::npos);
  EXPECT_EQ(r.out.find("lenient"), std::string::npos);
}

TEST_F(CliTest, ScoreJoinFailureIsExitOne) {
  write_file(path("pred.jsonl"), "{\"id\":\"p1\",\"label\":\"Yes\"}\n");
  auto r = run({"score", "--gold", data_path("six_gold.jsonl"), "--pred", path("pred.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("p2"), std::string::npos);
}

TEST_F(CliTest, PreprocessTwoByTwo) {
  auto r = run({"preprocess", "--input", data_path("two_by_two.json"), "--track", "actionability", "--out",
                path("t4.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string doc = read_file(path("t4.jsonl"));
  EXPECT_EQ(std::count(doc.begin(), doc.end(), '\n'), 4);
  // Idempotent.
  ASSERT_EQ(run({"preprocess", "--input", data_path("two_by_two.json"), "--track", "actionability", "--out",
                 path("t4b.jsonl")})
                .code,
            0);
  EXPECT_EQ(read_file(path("t4b.jsonl")), doc);
}

TEST_F(CliTest, PreprocessUnlabeled) {
  auto r = run({"preprocess", "--input", data_path("one_conversation.json"), "--track", "mistake_location",
                "--include-unlabeled", "--out", path("t2.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto records = parse_instruction_jsonl(read_file(path("t2.jsonl")));
  EXPECT_EQ(records.size(), 2u);
}

TEST_F(CliTest, PreprocessErrors) {
  EXPECT_EQ(run({"preprocess", "--input", data_path("two_by_two.json"), "--track", "coherence", "--out",
                 path("x.jsonl")})
                .code,
            1);
  auto missing = run({"preprocess", "--input", path("nope.json"), "--track", "actionability", "--out", path("x")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("nope.json"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"score", "--gold", "a"}).code, 2);
  EXPECT_EQ(run({"score", "--gold", "a", "--pred", "b", "--bogus"}).code, 2);
  EXPECT_EQ(run({"score", "--gold", "a", "--pred", "b", "--mode", "fuzzy"}).code, 2);
  EXPECT_EQ(run({"ensemble", "--preds", "a", "--out", "b"}).code, 2);
  EXPECT_EQ(run({"ensemble", "--preds", "a", "--out", "b", "--tse-freq", "0.1", "--dev-gold", "g"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, EnsembleZeroQuotaEqualsPlurality) {
  write_file(path("a.jsonl"), "{\"id\":\"x\",\"label\":\"Yes\"}\n{\"id\":\"y\",\"label\":\"No\"}\n"
                              "{\"id\":\"z\",\"label\":\"Yes\"}\n");
  write_file(path("b.jsonl"), "{\"id\":\"z\",\"label\":\"To some extent\"}\n{\"id\":\"y\",\"label\":\"Yes\"}\n"
                              "{\"id\":\"x\",\"label\":\"Yes\"}\n");
  auto r = run({"ensemble", "--preds", path("a.jsonl") + "," + path("b.jsonl"), "--tse-freq", "0", "--out",
                path("out.jsonl"), "--audit", path("audit.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::vector<LabelEntry>> runs{load_label_jsonl(path("a.jsonl")), load_label_jsonl(path("b.jsonl"))};
  auto baseline = to_label_jsonl(to_label_entries(plurality_decisions(matrix_from_runs(runs))));
  EXPECT_EQ(read_file(path("out.jsonl")), baseline);
  // Ties resolve toward "To some extent", then "No".
  EXPECT_EQ(baseline,
            "{\"id\":\"x\",\"label\":\"Yes\"}\n{\"id\":\"y\",\"label\":\"No\"}\n"
            "{\"id\":\"z\",\"label\":\"To some extent\"}\n");
  EXPECT_NE(read_file(path("audit.jsonl")).find("\"basis\":\"unanimous\""), std::string::npos);
}

TEST_F(CliTest, EnsembleWithDevGoldAndCombinedVotes) {
  write_file(path("votes.jsonl"),
             "{\"id\":\"a\",\"votes\":[\"Yes\",\"Yes\",\"Yes\",\"Yes\",\"Yes\"]}\n"
             "{\"id\":\"b\",\"votes\":[\"Yes\",\"Yes\",\"Yes\",\"To some extent\",\"To some extent\"]}\n"
             "{\"id\":\"c\",\"votes\":[\"Yes\",\"Yes\",\"Yes\",\"Yes\",\"To some extent\"]}\n"
             "{\"id\":\"d\",\"votes\":[\"No\",\"No\",\"No\",\"No\",\"No\"]}\n");
  write_file(path("dev.jsonl"), "{\"id\":\"1\",\"label\":\"Yes\"}\n{\"id\":\"2\",\"label\":\"To some extent\"}\n");
  auto r = run({"ensemble", "--preds", path("votes.jsonl"), "--dev-gold", path("dev.jsonl"), "--out",
                path("out.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(path("out.jsonl")),
            "{\"id\":\"a\",\"label\":\"Yes\"}\n{\"id\":\"b\",\"label\":\"To some extent\"}\n"
            "{\"id\":\"c\",\"label\":\"To some extent\"}\n{\"id\":\"d\",\"label\":\"No\"}\n");
  auto dist = run({"distribution", "--labels", path("out.jsonl")});
  ASSERT_EQ(dist.code, 0) << dist.err;
  EXPECT_NE(dist.out.find("50.00%"), std::string::npos);
}

TEST_F(CliTest, SimulateThenEnsembleThenReport) {
  auto s = run({"simulate", "--n", "50", "--models", "5", "--seed", "3", "--profile", data_path("under_tse_profile.json"),
                "--out-gold", path("gold.jsonl"), "--out-preds", path("votes.jsonl")});
  ASSERT_EQ(s.code, 0) << s.err;
  std::string first = read_file(path("votes.jsonl"));
  ASSERT_EQ(run({"simulate", "--n", "50", "--models", "5", "--seed", "3", "--profile",
                 data_path("under_tse_profile.json"), "--out-gold", path("gold2.jsonl"), "--out-preds",
                 path("votes2.jsonl")})
                .code,
            0);
  EXPECT_EQ(read_file(path("votes2.jsonl")), first);
  EXPECT_EQ(read_file(path("gold2.jsonl")), read_file(path("gold.jsonl")));

  ASSERT_EQ(run({"ensemble", "--preds", path("votes.jsonl"), "--dev-gold", path("gold.jsonl"), "--out",
                 path("ens.jsonl")})
                .code,
            0);
  auto sc = run({"score", "--gold", path("gold.jsonl"), "--pred", path("ens.jsonl")});
  EXPECT_EQ(sc.code, 0) << sc.err;
  auto rep = run({"report", "distributions", "--inputs", "dev=" + path("gold.jsonl") + ",ensemble=" + path("ens.jsonl")});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_NE(rep.out.find("ensemble-dev"), std::string::npos);
}

TEST_F(CliTest, ReportRuns) {
  auto md = run({"report", "runs", "--results", data_path("published_runs.tsv")});
  ASSERT_EQ(md.code, 0) << md.err;
  EXPECT_NE(md.out.find("| Mistake Identification | Run 1 | **71.54%** | **91.52%** | 87.59% | **95.35%** |"),
            std::string::npos);
  auto tsv = run({"report", "runs", "--results", data_path("published_runs.tsv"), "--format", "tsv", "--out",
                  path("runs.tsv")});
  ASSERT_EQ(tsv.code, 0) << tsv.err;
  EXPECT_EQ(run({"report", "runs", "--results", path("runs.tsv"), "--format", "tsv"}).out, read_file(path("runs.tsv")));
  EXPECT_EQ(run({"report"}).code, 2);
}

TEST_F(CliTest, ConfigShow) {
  auto r = run({"config", "show"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, to_config_text(TrainConfig{}));
  EXPECT_NE(r.out.find("rank = 64\n"), std::string::npos);
  EXPECT_NE(r.out.find("learning_rate = 4e-05\n"), std::string::npos);
  EXPECT_NE(r.out.find("checkpoint_every = 100\n"), std::string::npos);

  write_file(path("cfg.txt"), "rank = 8\n");
  auto custom = run({"config", "show", "--config", path("cfg.txt")});
  ASSERT_EQ(custom.code, 0);
  EXPECT_NE(custom.out.find("rank = 8\n"), std::string::npos);
  write_file(path("bad.txt"), "rank = -1\n");
  EXPECT_EQ(run({"config", "show", "--config", path("bad.txt")}).code, 1);
}
