#pragma once

// The five pipeline commands. Each reads and writes files under the configured
// workdir; every artifact is a pure function of (inputs, config, seed).
//
// workdir/
//   sentences.tsv  vocab.tsv  sid.tsv  prepare_manifest.json
//   align_<src>_<tgt>.txt
//   pretrain/{meta,weights}  pretrain_loss.csv  pretrain_manifest.json
//   finetune/{meta,weights}  finetune_loss.csv  finetune_manifest.json

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sememe/attention.hpp"
#include "sememe/checkpoint.hpp"
#include "sememe/config.hpp"
#include "sememe/corpus.hpp"
#include "sememe/dcn.hpp"
#include "sememe/embeddings.hpp"
#include "sememe/error.hpp"
#include "sememe/report.hpp"
#include "sememe/sid.hpp"

namespace sememe {

namespace files {
inline fs::path sentences(const PipelineConfig& c) { return c.paths.workdir / "sentences.tsv"; }
inline fs::path vocab(const PipelineConfig& c) { return c.paths.workdir / "vocab.tsv"; }
inline fs::path sid(const PipelineConfig& c) { return c.paths.workdir / "sid.tsv"; }
inline fs::path alignment(const PipelineConfig& c, const std::string& src, const std::string& tgt) {
  return c.paths.workdir / ("align_" + src + "_" + tgt + ".txt");
}
inline fs::path checkpoint(const PipelineConfig& c, const std::string& stage) { return c.paths.workdir / stage; }
inline fs::path loss_log(const PipelineConfig& c, const std::string& stage) { return c.paths.workdir / (stage + "_loss.csv"); }
inline fs::path manifest(const PipelineConfig& c, const std::string& stage) {
  return c.paths.workdir / (stage + "_manifest.json");
}
}  // namespace files

namespace detail {

inline void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) fail(ErrorKind::kIo, what + ": no path configured");
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) fail(ErrorKind::kIo, what + " not found: '" + p.string() + "'");
}

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + p.string() + "'");
  return out;
}

inline std::ifstream open_in(const fs::path& p, const std::string& what) {
  require_file(p, what);
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read '" + p.string() + "'");
  return in;
}

inline void ensure_workdir(const PipelineConfig& c) {
  std::error_code ec;
  fs::create_directories(c.paths.workdir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create workdir '" + c.paths.workdir.string() + "'");
}

inline void write_manifest(const PipelineConfig& c, const std::string& stage, nlohmann::ordered_json counts) {
  nlohmann::ordered_json j;
  j["command"] = stage;
  j["seed"] = c.seed;
  j["counts"] = std::move(counts);
  j["config"] = config_to_json(c);
  open_out(files::manifest(c, stage)) << j.dump(2) << '\n';
}

inline void write_loss_log(const fs::path& path, const std::vector<BatchLoss>& history) {
  auto out = open_out(path);
  out << "batch,l_n,l_c\n";
  char buf[96];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", h.batch, h.reconstruction, h.clustering);
    out << buf;
  }
}

inline std::vector<SentenceRecord> load_sentences(const PipelineConfig& c) {
  auto in = open_in(files::sentences(c), "sentence file (run `prepare` first)");
  return read_sentences(in);
}

inline SentenceIndex load_sid(const PipelineConfig& c) {
  auto in = open_in(files::sid(c), "SID file (run `prepare` first)");
  return read_sid(in);
}

inline const fs::path& embedding_path(const PipelineConfig& c, const std::string& lang) {
  auto it = c.paths.embeddings.find(lang);
  if (it == c.paths.embeddings.end()) fail(ErrorKind::kIo, "no embedding file configured for language '" + lang + "'");
  require_file(it->second, "embedding file for '" + lang + "'");
  return it->second;
}

// Everything the training commands need, loaded once.
struct TrainingInputs {
  std::vector<SentenceRecord> sentences;
  SentenceIndex sid;
  EmbeddingMatrix unit;  // clustering-language vectors, unit rows
};

inline TrainingInputs load_training_inputs(const PipelineConfig& c, std::ostream& log) {
  TrainingInputs in;
  in.sentences = load_sentences(c);
  in.sid = load_sid(c);
  std::set<std::string> wanted;
  for (const auto& s : in.sentences) wanted.insert(s.tokens.begin(), s.tokens.end());
  auto loaded = load_embeddings(embedding_path(c, c.language).string(), wanted, c.language);
  if (!loaded.missing.empty()) log << "note: " << loaded.missing.size() << " corpus tokens have no embedding\n";
  in.unit = loaded.matrix.normalized();
  return in;
}

}  // namespace detail

struct PrepareSummary {
  std::size_t raw_sentences = 0;
  std::size_t sentences = 0;
  std::size_t vocab = 0;
  std::size_t sid_before_balance = 0;
  std::size_t sid_words = 0;
};

inline PrepareSummary cmd_prepare(const PipelineConfig& c, std::ostream& log) {
  c.validate();
  if (c.paths.corpus.empty()) fail(ErrorKind::kIo, "no corpus files configured");
  std::vector<std::string> docs;
  for (const auto& p : c.paths.corpus) {
    detail::require_file(p, "corpus file");
    docs.push_back(read_text_file(p.string()));
  }
  std::set<std::string> stopwords;
  if (!c.paths.stopwords.empty()) {
    detail::require_file(c.paths.stopwords, "stop-word file");
    stopwords = read_token_set(c.paths.stopwords.string());
  }

  PrepareSummary sum;
  auto raw = sentences_from_documents(docs, c.delimiter_set());
  sum.raw_sentences = raw.size();
  const auto sentences = filter_by_length(std::move(raw), c.corpus.min_length, c.corpus.max_length);
  sum.sentences = sentences.size();
  for (const auto& s : sentences) {
    if (s.tokens.size() < c.corpus.min_length || s.tokens.size() > c.corpus.max_length) {
      throw std::logic_error("prepare: sentence " + std::to_string(s.id) + " violates the length bounds");
    }
  }
  const Vocabulary vocab = build_vocab(sentences, c.corpus.vocab_cap);
  sum.vocab = vocab.size();
  SentenceIndex sid = remove_stopwords(build_sid(sentences, vocab), stopwords);
  sum.sid_before_balance = sid.size();
  sid = balance(std::move(sid), c.sid.upper, c.sid.lower, c.seed);
  sum.sid_words = sid.size();
  for (const auto& [token, ids] : sid.entries()) {
    if (ids.size() < c.sid.lower || ids.size() > c.sid.upper) {
      throw std::logic_error("prepare: SID entry '" + token + "' violates the balance bounds");
    }
  }

  detail::ensure_workdir(c);
  {
    auto out = detail::open_out(files::sentences(c));
    write_sentences(out, sentences);
  }
  {
    auto out = detail::open_out(files::vocab(c));
    write_vocab(out, vocab);
  }
  {
    auto out = detail::open_out(files::sid(c));
    write_sid(out, sid);
  }
  detail::write_manifest(c, "prepare",
                         {{"raw_sentences", sum.raw_sentences},
                          {"sentences", sum.sentences},
                          {"vocabulary", sum.vocab},
                          {"sid_words_before_balance", sum.sid_before_balance},
                          {"sid_words", sum.sid_words}});
  if (sum.sentences == 0) log << "warning: corpus produced no sentences; artifacts are empty\n";
  else if (sum.sid_words == 0) log << "warning: no word survived SID balancing\n";
  log << "prepare: " << sum.sentences << " sentences, vocabulary " << sum.vocab << ", SID words " << sum.sid_words
      << " (of " << sum.sid_before_balance << ")\n";
  return sum;
}

struct AlignOptions {
  std::string source;
  std::string target;
  AlignMode mode = AlignMode::kOrthogonal;
  bool identical_pairs = false;  // use identically spelled tokens instead of the dictionary file
};

inline AlignmentMap cmd_align(const PipelineConfig& c, const AlignOptions& opt, std::ostream& log) {
  c.validate();
  require(!opt.source.empty() && !opt.target.empty(), "align: source and target languages are required");
  const auto src_path = detail::embedding_path(c, opt.source);
  const auto tgt_path = detail::embedding_path(c, opt.target);
  std::vector<std::pair<std::string, std::string>> dict;
  if (!opt.identical_pairs) {
    detail::require_file(c.paths.dictionary, "dictionary file");
    dict = read_dictionary(c.paths.dictionary.string());
  }
  const auto src = load_embeddings(src_path.string(), {}, opt.source).matrix;
  const auto tgt = load_embeddings(tgt_path.string(), {}, opt.target).matrix;
  if (src.dim() != tgt.dim()) fail(ErrorKind::kDegenerate, "align: embedding dimensions differ");
  if (opt.identical_pairs) dict = identical_pairs(src, tgt);
  const DictionaryPairs pairs = dictionary_pairs(src, tgt, dict);
  if (pairs.pairs.size() < src.dim()) {
    fail(ErrorKind::kDegenerate, "align: dictionary covers " + std::to_string(pairs.pairs.size()) +
                                     " pairs, need at least the dimension " + std::to_string(src.dim()));
  }
  AlignmentMap map = align(pairs.source, pairs.target, opt.mode);
  map.source_language = opt.source;
  map.target_language = opt.target;
  detail::ensure_workdir(c);
  auto out = detail::open_out(files::alignment(c, opt.source, opt.target));
  write_alignment(out, map);
  log << "align " << opt.source << " -> " << opt.target << " (" << to_string(opt.mode) << ", " << pairs.pairs.size()
      << " pairs): residual " << map.residual << '\n';
  return map;
}

inline PretrainResult cmd_pretrain(const PipelineConfig& c, std::ostream& log, const WeightObserver& observer = {}) {
  c.validate();
  auto in = detail::load_training_inputs(c, log);
  CorpusMeanings source(in.sid, in.sentences, in.unit, c.expansion);
  if (observer) source.set_observer(observer);
  if (!source.skipped().empty()) log << "note: " << source.skipped().size() << " SID words have no embedding\n";
  if (source.group_count() == 0) fail(ErrorKind::kDegenerate, "pretrain: no SID word has an embedding");
  const TrainConfig tc = c.train_config();
  PretrainResult res = pretrain(source, tc);
  save_checkpoint(files::checkpoint(c, "pretrain"), res.ae, res.space, tc);
  detail::write_loss_log(files::loss_log(c, "pretrain"), res.history);
  detail::write_manifest(c, "pretrain", {{"words", source.group_count()}, {"batches", res.history.size()}});
  log << "pretrain: " << source.group_count() << " words, " << res.history.size() << " batches";
  if (!res.history.empty()) log << ", final L_n " << res.history.back().reconstruction;
  log << '\n';
  return res;
}

inline FinetuneResult cmd_finetune(const PipelineConfig& c, std::ostream& log) {
  c.validate();
  const auto ckpt_dir = files::checkpoint(c, "pretrain");
  detail::require_file(ckpt_dir / "meta", "pretrain checkpoint (run `pretrain` first)");
  Checkpoint ck = load_checkpoint(ckpt_dir);
  auto in = detail::load_training_inputs(c, log);
  CorpusMeanings source(in.sid, in.sentences, in.unit, c.expansion);
  if (source.group_count() == 0) fail(ErrorKind::kDegenerate, "finetune: no SID word has an embedding");
  if (ck.ae.input_dim() != source.dim()) fail(ErrorKind::kIo, "finetune: checkpoint input width does not match embeddings");
  const TrainConfig tc = c.train_config();
  FinetuneResult res = finetune(source, std::move(ck.ae), std::move(ck.space), tc);
  save_checkpoint(files::checkpoint(c, "finetune"), res.ae, res.space, tc);
  detail::write_loss_log(files::loss_log(c, "finetune"), res.history);
  detail::write_manifest(c, "finetune", {{"words", source.group_count()},
                                         {"batches", res.history.size()},
                                         {"epochs", res.epochs_run}});
  log << "finetune: " << res.epochs_run << " epochs, " << res.history.size() << " batches\n";
  return res;
}

struct PredictOptions {
  std::string word;
  std::size_t top_n = 6;
  std::vector<std::string> languages;  // empty -> the clustering language only
};

inline SememeReport cmd_predict(const PipelineConfig& c, const PredictOptions& opt, std::ostream& log) {
  c.validate();
  const auto ckpt_dir = files::checkpoint(c, "finetune");
  detail::require_file(ckpt_dir / "meta", "finetuned checkpoint (run `finetune` first)");
  const Checkpoint ck = load_checkpoint(ckpt_dir);
  const auto sentences = detail::load_sentences(c);
  const auto sid = detail::load_sid(c);
  if (!sid.contains(opt.word)) fail(ErrorKind::kNotFound, "word not found in SID: '" + opt.word + "'");

  const EmbeddingMatrix source = load_embeddings(detail::embedding_path(c, c.language).string(), {}, c.language).matrix;
  if (!source.contains(opt.word)) fail(ErrorKind::kNotFound, "word not found in embeddings: '" + opt.word + "'");
  const EmbeddingMatrix unit = source.normalized();
  const WordDistribution dist =
      word_sememe_distribution(opt.word, sid, sentences, unit, ck.ae, ck.space, c.report.sample_cap, c.expansion, c.seed);

  std::vector<std::string> langs = opt.languages.empty() ? std::vector<std::string>{c.language} : opt.languages;
  std::map<std::string, EmbeddingMatrix> spaces;
  for (const auto& lang : langs) {
    if (spaces.contains(lang)) continue;
    if (lang == c.language) {
      spaces.emplace(lang, source.as_reference_space());
      continue;
    }
    const auto map_path = files::alignment(c, lang, c.language);
    auto map_in = detail::open_in(map_path, "alignment " + lang + " -> " + c.language + " (run `align` first)");
    const AlignmentMap map = read_alignment(map_in);
    const auto emb = load_embeddings(detail::embedding_path(c, lang).string(), {}, lang).matrix;
    if (map.dim() != emb.dim() || emb.dim() != source.dim()) fail(ErrorKind::kIo, "predict: alignment dimension mismatch");
    spaces.emplace(lang, emb.mapped(map.w));
  }
  std::map<std::string, const EmbeddingMatrix*> views;
  for (const auto& [lang, m] : spaces) views[lang] = &m;
  SememeReport rep = build_report(opt.word, dist, ck.ae, ck.space, views, opt.top_n, c.report.words_per_sememe);
  log << "predict: '" << opt.word << "' from " << rep.samples << " sentences, " << rep.distribution.size()
      << " sememes hit\n";
  return rep;
}

}  // namespace sememe
