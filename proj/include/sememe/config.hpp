#pragma once

// Pipeline configuration: one JSON document, resolved against a profile, with
// relative paths anchored at the config file's directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sememe/corpus.hpp"
#include "sememe/dcn.hpp"
#include "sememe/error.hpp"

namespace sememe {

namespace fs = std::filesystem;

struct PipelineConfig {
  std::string profile = "desk";
  std::uint64_t seed = 42;
  std::string language = "en";  // language the sememe space is learned in

  struct Paths {
    std::vector<fs::path> corpus;
    std::map<std::string, fs::path> embeddings;  // language -> vector file
    fs::path stopwords;
    fs::path dictionary;  // source<TAB>target pairs for `align`
    fs::path workdir = "work";
  } paths;

  struct Corpus {
    std::vector<std::string> delimiters;  // empty -> built-in set
    std::size_t min_length = 2;
    std::size_t max_length = 20;
    std::size_t vocab_cap = 50000;
  } corpus;

  struct Sid {
    std::size_t upper = 5000;
    std::size_t lower = 128;  // two batches of 64
  } sid;

  double expansion = 4.0;
  TrainConfig dcn;

  struct Report {
    std::size_t top_n = 6;
    std::size_t sample_cap = 5000;
    std::size_t words_per_sememe = 3;
  } report;

  DelimiterSet delimiter_set() const {
    if (corpus.delimiters.empty()) return default_delimiters();
    return DelimiterSet(corpus.delimiters.begin(), corpus.delimiters.end());
  }

  // Training parameters with the pipeline-wide seed applied.
  TrainConfig train_config() const {
    TrainConfig t = dcn;
    t.seed = seed;
    return t;
  }

  void validate() const {
    require(corpus.min_length >= 1 && corpus.min_length <= corpus.max_length, "config: need 1 <= min_length <= max_length");
    require(corpus.vocab_cap >= 1, "config: vocab_cap must be >= 1");
    require(sid.lower <= sid.upper, "config: sid.lower must be <= sid.upper");
    require(expansion > 0.0, "config: attention expansion must be > 0");
    require(report.top_n >= 1 && report.sample_cap >= 1 && report.words_per_sememe >= 1, "config: report values must be >= 1");
    train_config().validate();
  }
};

inline void apply_profile(PipelineConfig& c, const std::string& profile) {
  if (profile == "desk") {
    c.dcn.clusters = 16;
    c.corpus.vocab_cap = 50000;
  } else if (profile == "full") {
    c.dcn.clusters = 2048;
    c.corpus.vocab_cap = 200000;
  } else {
    fail("unknown profile '" + profile + "' (expected desk or full)");
  }
  c.sid.upper = 5000;
  c.sid.lower = 128;
  c.profile = profile;
}

namespace detail {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

inline fs::path anchored(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace detail

// Applies every key present in `j` on top of `c`. Relative paths resolve against `base`.
inline void apply_json(PipelineConfig& c, const nlohmann::json& j, const fs::path& base) {
  try {
    if (j.contains("profile")) apply_profile(c, j.at("profile").get<std::string>());
    detail::maybe(j, "seed", c.seed);
    detail::maybe(j, "language", c.language);
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      if (p.contains("corpus")) {
        c.paths.corpus.clear();
        if (p.at("corpus").is_string()) {
          c.paths.corpus.push_back(detail::anchored(base, p.at("corpus").get<std::string>()));
        } else {
          for (const auto& f : p.at("corpus")) c.paths.corpus.push_back(detail::anchored(base, f.get<std::string>()));
        }
      }
      if (p.contains("embeddings")) {
        for (const auto& [lang, f] : p.at("embeddings").items()) c.paths.embeddings[lang] = detail::anchored(base, f.get<std::string>());
      }
      if (p.contains("stopwords")) c.paths.stopwords = detail::anchored(base, p.at("stopwords").get<std::string>());
      if (p.contains("dictionary")) c.paths.dictionary = detail::anchored(base, p.at("dictionary").get<std::string>());
      if (p.contains("workdir")) c.paths.workdir = detail::anchored(base, p.at("workdir").get<std::string>());
    }
    if (j.contains("corpus")) {
      const auto& k = j.at("corpus");
      detail::maybe(k, "delimiters", c.corpus.delimiters);
      detail::maybe(k, "min_length", c.corpus.min_length);
      detail::maybe(k, "max_length", c.corpus.max_length);
      detail::maybe(k, "vocab_cap", c.corpus.vocab_cap);
    }
    if (j.contains("sid")) {
      detail::maybe(j.at("sid"), "upper", c.sid.upper);
      detail::maybe(j.at("sid"), "lower", c.sid.lower);
    }
    if (j.contains("attention")) detail::maybe(j.at("attention"), "expansion", c.expansion);
    if (j.contains("dcn")) {
      const auto& d = j.at("dcn");
      detail::maybe(d, "layers", c.dcn.layers);
      detail::maybe(d, "lambda", c.dcn.lambda);
      detail::maybe(d, "learning_rate", c.dcn.learning_rate);
      detail::maybe(d, "batch_size", c.dcn.batch_size);
      detail::maybe(d, "epochs", c.dcn.epochs);
      detail::maybe(d, "finetune_epochs", c.dcn.finetune_epochs);
      detail::maybe(d, "patience", c.dcn.patience);
      detail::maybe(d, "clusters", c.dcn.clusters);
      detail::maybe(d, "loops", c.dcn.loops);
      detail::maybe(d, "per_word_batches", c.dcn.per_word_batches);
      detail::maybe(d, "shuffle_window", c.dcn.shuffle_window);
      detail::maybe(d, "kmeans_max_iters", c.dcn.kmeans_max_iters);
      detail::maybe(d, "initial_count", c.dcn.initial_count);
    }
    if (j.contains("report")) {
      detail::maybe(j.at("report"), "top_n", c.report.top_n);
      detail::maybe(j.at("report"), "sample_cap", c.report.sample_cap);
      detail::maybe(j.at("report"), "words_per_sememe", c.report.words_per_sememe);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("config: ") + e.what());
  }
}

inline PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, "config '" + path.string() + "': " + e.what());
  }
  PipelineConfig c;
  apply_json(c, j, fs::absolute(path).parent_path());
  return c;
}

// Full effective configuration (every default resolved), as echoed in run manifests.
inline nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["profile"] = c.profile;
  j["seed"] = c.seed;
  j["language"] = c.language;
  nlohmann::ordered_json corpus_paths = nlohmann::ordered_json::array();
  for (const auto& p : c.paths.corpus) corpus_paths.push_back(p.string());
  nlohmann::ordered_json emb = nlohmann::ordered_json::object();
  for (const auto& [lang, p] : c.paths.embeddings) emb[lang] = p.string();
  j["paths"] = {{"corpus", corpus_paths},
                {"embeddings", emb},
                {"stopwords", c.paths.stopwords.string()},
                {"dictionary", c.paths.dictionary.string()},
                {"workdir", c.paths.workdir.string()}};
  std::vector<std::string> delims = c.corpus.delimiters;
  if (delims.empty()) delims.assign(default_delimiters().begin(), default_delimiters().end());
  j["corpus"] = {{"delimiters", delims},
                 {"min_length", c.corpus.min_length},
                 {"max_length", c.corpus.max_length},
                 {"vocab_cap", c.corpus.vocab_cap}};
  j["sid"] = {{"upper", c.sid.upper}, {"lower", c.sid.lower}};
  j["attention"] = {{"expansion", c.expansion}};
  j["dcn"] = {{"layers", c.dcn.layers},
              {"lambda", c.dcn.lambda},
              {"learning_rate", c.dcn.learning_rate},
              {"batch_size", c.dcn.batch_size},
              {"epochs", c.dcn.epochs},
              {"finetune_epochs", c.dcn.finetune_epochs},
              {"patience", c.dcn.patience},
              {"clusters", c.dcn.clusters},
              {"loops", c.dcn.loops},
              {"per_word_batches", c.dcn.per_word_batches},
              {"shuffle_window", c.dcn.shuffle_window},
              {"kmeans_max_iters", c.dcn.kmeans_max_iters},
              {"initial_count", c.dcn.initial_count}};
  j["report"] = {{"top_n", c.report.top_n},
                 {"sample_cap", c.report.sample_cap},
                 {"words_per_sememe", c.report.words_per_sememe}};
  return j;
}

}  // namespace sememe
