#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "support.hpp"

using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const TempDir& dir, const std::string& args) {
  const fs::path out = dir.path() / "stdout.txt", err = dir.path() / "stderr.txt";
  const std::string cmd = std::string("\"") + SEMEME_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

// Config pointing at the mini corpus with a private workdir and optional JSON overrides.
fs::path mini_config(const TempDir& dir, const std::string& extra = "") {
  const fs::path d = data_dir();
  std::string text = "{\"seed\": 3, \"paths\": {\"corpus\": [\"" + (d / "corpus_en.txt").string() + "\"], " +
                     "\"embeddings\": {\"en\": \"" + (d / "emb_en.vec").string() + "\", \"fr\": \"" +
                     (d / "emb_fr.vec").string() + "\"}, " + "\"stopwords\": \"" + (d / "stopwords_en.txt").string() +
                     "\", \"dictionary\": \"" + (d / "dict_fr_en.txt").string() + "\", \"workdir\": \"work\"}, " +
                     "\"dcn\": {\"epochs\": 1, \"finetune_epochs\": 1, \"loops\": 2}" + extra + "}";
  write_file(dir.path() / "config.json", text);
  return dir.path() / "config.json";
}

}  // namespace

TEST(Cli, PrepareIsRepeatableAndWritesManifest) {
  TempDir dir("cli-prepare");
  const auto cfg = mini_config(dir);
  ASSERT_EQ(cli(dir, "prepare --config " + cfg.string()).code, 0);
  const fs::path work = dir.path() / "work";
  const std::string sentences = slurp(work / "sentences.tsv"), sid = slurp(work / "sid.tsv"), vocab = slurp(work / "vocab.tsv");
  EXPECT_FALSE(sid.empty());
  ASSERT_EQ(cli(dir, "prepare --config " + cfg.string()).code, 0);
  EXPECT_EQ(slurp(work / "sentences.tsv"), sentences);
  EXPECT_EQ(slurp(work / "sid.tsv"), sid);
  EXPECT_EQ(slurp(work / "vocab.tsv"), vocab);

  const auto manifest = nlohmann::json::parse(slurp(work / "prepare_manifest.json"));
  EXPECT_EQ(manifest.dump().find("\"seed\":3") != std::string::npos, true);
  EXPECT_NE(manifest.dump().find("\"learning_rate\""), std::string::npos);
  EXPECT_NE(manifest.dump().find("\"upper\":5000"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli-codes");
  const auto cfg = mini_config(dir);
  const std::string c = " --config " + cfg.string();

  EXPECT_EQ(cli(dir, "predict bread" + c).code, 2);  // nothing trained yet
  EXPECT_EQ(cli(dir, "prepare --config " + (dir.path() / "nope.json").string()).code, 2);
  EXPECT_NE(cli(dir, "frobnicate").code, 0);

  ASSERT_EQ(cli(dir, "prepare" + c).code, 0);
  const auto aligned = cli(dir, "align --source fr --target en" + c);
  ASSERT_EQ(aligned.code, 0) << aligned.err;
  EXPECT_NE(aligned.out.find("residual"), std::string::npos);
  ASSERT_EQ(cli(dir, "pretrain" + c).code, 0);
  ASSERT_EQ(cli(dir, "finetune" + c).code, 0);

  const auto missing_word = cli(dir, "predict zzzunknown" + c);
  EXPECT_EQ(missing_word.code, 4);
  EXPECT_NE(missing_word.err.find("not found"), std::string::npos);

  // Pick a word the SID kept and ask for both formats.
  std::ifstream sid_in(dir.path() / "work" / "sid.tsv");
  const auto sid = sememe::read_sid(sid_in);
  const std::string word = sid.tokens().front();
  const auto report = cli(dir, "predict " + word + " --languages en,fr --format json" + c);
  ASSERT_EQ(report.code, 0) << report.err;
  const auto rep = sememe::parse_report_json(report.out);
  EXPECT_EQ(rep.word, word);
  ASSERT_FALSE(rep.entries.empty());
  EXPECT_EQ(rep.entries[0].descriptions.at("en").size(), 3u);
  EXPECT_EQ(rep.entries[0].descriptions.at("fr").size(), 3u);
  double total = 0.0;
  for (const auto& d : rep.distribution) total += d.probability;
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Cli, AlignFailures) {
  TempDir dir("cli-align");
  write_file(dir.path() / "short_dict.txt", "bread_fr\tbread\ncheese_fr\tcheese\n");
  const auto few = mini_config(dir);
  // Two pairs cannot determine a 50-dimensional map.
  auto text = slurp(few);
  const auto at = text.find((data_dir() / "dict_fr_en.txt").string());
  text.replace(at, (data_dir() / "dict_fr_en.txt").string().size(), (dir.path() / "short_dict.txt").string());
  write_file(dir.path() / "few.json", text);
  EXPECT_EQ(cli(dir, "align --source fr --target en --config " + (dir.path() / "few.json").string()).code, 3);

  text.replace(text.find((dir.path() / "short_dict.txt").string()), (dir.path() / "short_dict.txt").string().size(),
               (dir.path() / "absent.txt").string());
  write_file(dir.path() / "absent.json", text);
  const auto absent = cli(dir, "align --source fr --target en --config " + (dir.path() / "absent.json").string());
  EXPECT_EQ(absent.code, 2);
  EXPECT_NE(absent.err.find("dictionary"), std::string::npos);
}

TEST(Cli, EmptyCorpusWarnsAndSucceeds) {
  TempDir dir("cli-empty");
  write_file(dir.path() / "empty.txt", "");
  write_file(dir.path() / "config.json", R"({"paths": {"corpus": "empty.txt", "workdir": "work"}})");
  const auto run = cli(dir, "prepare --config " + (dir.path() / "config.json").string());
  EXPECT_EQ(run.code, 0);
  EXPECT_NE(run.err.find("warning"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path() / "work" / "sid.tsv"));
}
