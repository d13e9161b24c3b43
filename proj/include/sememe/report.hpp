#pragma once

// Per-word sememe predictions: cluster frequency distribution over the word's
// contextual meanings, decoded centroids, and nearest-word descriptions per language.

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sememe/attention.hpp"
#include "sememe/autoencoder.hpp"
#include "sememe/embeddings.hpp"
#include "sememe/error.hpp"
#include "sememe/kmeans.hpp"
#include "sememe/sid.hpp"

namespace sememe {

struct ClusterProbability {
  std::size_t cluster = 0;
  double probability = 0.0;

  friend bool operator==(const ClusterProbability&, const ClusterProbability&) = default;
};

// Relative frequency of every cluster that received at least one assignment,
// by probability descending then cluster id ascending.
inline std::vector<ClusterProbability> distribution_from_assignments(const std::vector<std::size_t>& assignments,
                                                                     std::size_t clusters) {
  require(!assignments.empty(), "distribution: no samples");
  std::vector<std::size_t> counts(clusters, 0);
  for (auto k : assignments) {
    require(k < clusters, "distribution: assignment out of range");
    ++counts[k];
  }
  std::vector<ClusterProbability> out;
  for (std::size_t k = 0; k < clusters; ++k) {
    if (counts[k]) out.push_back({k, static_cast<double>(counts[k]) / static_cast<double>(assignments.size())});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.probability > b.probability; });
  return out;
}

struct WordDistribution {
  std::vector<ClusterProbability> clusters;
  std::vector<std::size_t> assignments;  // one per sampled sentence
  std::size_t samples = 0;
};

// Encodes up to `sample_cap` contextual meanings of `word` and assigns each to its
// nearest sememe.
inline WordDistribution word_sememe_distribution(const std::string& word, const SentenceIndex& sid,
                                                 const std::vector<SentenceRecord>& sentences,
                                                 const EmbeddingMatrix& emb, const Autoencoder& ae,
                                                 const SememeSpace& space, std::size_t sample_cap, double expansion,
                                                 std::uint64_t seed) {
  if (!sid.contains(word)) fail(ErrorKind::kNotFound, "word not found in SID: '" + word + "'");
  const MeaningBatch batch = batch_contextual_meanings(word, sid, sentences, emb, sample_cap, expansion, seed);
  WordDistribution out;
  out.assignments = assign_rows(ae.encode(batch.meanings), space);
  out.samples = out.assignments.size();
  out.clusters = distribution_from_assignments(out.assignments, space.clusters());
  return out;
}

// Decoder image g(M_k; Z) of one centroid, back in the embedding space.
inline Vector decode_sememe(const Eigen::Ref<const Vector>& centroid, const Autoencoder& ae) {
  const Matrix row = centroid.transpose();
  return ae.decode(row).row(0).transpose();
}

inline std::vector<Neighbor> describe_sememe(const Eigen::Ref<const Vector>& sememe, const EmbeddingMatrix& emb,
                                             std::size_t k = 3) {
  return nearest_neighbors(sememe, emb, k);
}

// Same search in another language's space; that space must already be mapped
// into the one the sememes were learned in.
inline std::vector<Neighbor> cross_lingual_describe(const Eigen::Ref<const Vector>& sememe,
                                                    const EmbeddingMatrix& target, std::size_t k = 3) {
  if (!target.is_aligned()) fail("target space not aligned");
  if (target.empty()) fail("cross_lingual_describe: empty target vocabulary");
  return nearest_neighbors(sememe, target, k);
}

struct DescriptionWord {
  std::string token;
  double cosine = 0.0;

  friend bool operator==(const DescriptionWord&, const DescriptionWord&) = default;
};

struct ReportEntry {
  std::size_t rank = 0;  // 1-based
  std::size_t cluster = 0;
  double probability = 0.0;
  std::map<std::string, std::vector<DescriptionWord>> descriptions;  // language -> nearest words

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct SememeReport {
  std::string word;
  std::size_t samples = 0;
  std::vector<ClusterProbability> distribution;  // every cluster with nonzero probability
  std::vector<ReportEntry> entries;              // ranked, described

  friend bool operator==(const SememeReport&, const SememeReport&) = default;
};

// Describes the `top_n` most probable clusters in every given language space.
// Spaces must share the sememes' embedding space (see cross_lingual_describe).
inline SememeReport build_report(const std::string& word, const WordDistribution& dist, const Autoencoder& ae,
                                 const SememeSpace& space, const std::map<std::string, const EmbeddingMatrix*>& languages,
                                 std::size_t top_n, std::size_t words_per_sememe = 3) {
  require(top_n >= 1, "build_report: top_n must be >= 1");
  SememeReport rep;
  rep.word = word;
  rep.samples = dist.samples;
  rep.distribution = dist.clusters;
  const std::size_t n = std::min(top_n, dist.clusters.size());
  for (std::size_t i = 0; i < n; ++i) {
    ReportEntry e;
    e.rank = i + 1;
    e.cluster = dist.clusters[i].cluster;
    e.probability = dist.clusters[i].probability;
    const Vector decoded = decode_sememe(space.centroid(e.cluster), ae);
    for (const auto& [lang, emb] : languages) {
      for (const auto& nb : cross_lingual_describe(decoded, *emb, words_per_sememe)) {
        e.descriptions[lang].push_back({nb.token, nb.cosine});
      }
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

inline std::string ordinal(std::size_t n) {
  const char* suffix = "th";
  if (n % 100 < 11 || n % 100 > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(n) + suffix;
}

inline std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "(%.5f)", p);
  return buf;
}

// Table layout: a header row of ordinals, a row of description words joined by
// "; ", and a row of probabilities in parentheses. One block per language.
inline std::string render_text(const SememeReport& rep, std::size_t top_n) {
  require(top_n >= 1, "render_text: top_n must be >= 1");
  const std::size_t n = std::min(top_n, rep.entries.size());
  std::vector<std::string> langs;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [lang, _] : rep.entries[i].descriptions) {
      if (std::find(langs.begin(), langs.end(), lang) == langs.end()) langs.push_back(lang);
    }
  }
  std::sort(langs.begin(), langs.end());
  if (langs.empty()) langs.push_back("");

  std::ostringstream out;
  for (const auto& lang : langs) {
    // cells[column][line]
    std::vector<std::vector<std::string>> cells(n + 1);
    cells[0].push_back(lang.empty() ? rep.word : rep.word + " [" + lang + "]");
    std::size_t depth = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto& col = cells[i + 1];
      col.push_back(ordinal(rep.entries[i].rank));
      auto it = rep.entries[i].descriptions.find(lang);
      if (it != rep.entries[i].descriptions.end()) {
        std::string joined;
        for (const auto& w : it->second) joined += (joined.empty() ? "" : "; ") + w.token;
        col.push_back(joined);
      }
      depth = std::max(depth, col.size());
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& col = cells[i + 1];
      col.resize(depth);
      col.push_back(format_probability(rep.entries[i].probability));
    }
    std::vector<std::size_t> width(n + 1, 0);
    for (std::size_t c = 0; c <= n; ++c) {
      for (const auto& s : cells[c]) width[c] = std::max(width[c], s.size());
    }
    const std::size_t lines = depth + 1;
    for (std::size_t line = 0; line < lines; ++line) {
      std::string row;
      for (std::size_t c = 0; c <= n; ++c) {
        const std::string s = line < cells[c].size() ? cells[c][line] : "";
        row += s;
        if (c < n) row += std::string(width[c] - s.size() + 2, ' ');
      }
      while (!row.empty() && row.back() == ' ') row.pop_back();
      out << row << '\n';
    }
  }
  return out.str();
}

inline nlohmann::ordered_json report_to_json(const SememeReport& rep, std::size_t top_n) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["word"] = rep.word;
  j["samples"] = rep.samples;
  ordered_json entries = ordered_json::array();
  for (std::size_t i = 0; i < std::min(top_n, rep.entries.size()); ++i) {
    const auto& e = rep.entries[i];
    ordered_json desc = ordered_json::object();
    for (const auto& [lang, words] : e.descriptions) {
      ordered_json list = ordered_json::array();
      for (const auto& w : words) list.push_back({{"token", w.token}, {"cosine", w.cosine}});
      desc[lang] = std::move(list);
    }
    entries.push_back({{"rank", e.rank}, {"cluster", e.cluster}, {"probability", e.probability}, {"descriptions", desc}});
  }
  j["entries"] = std::move(entries);
  ordered_json dist = ordered_json::array();
  for (const auto& c : rep.distribution) dist.push_back({{"cluster", c.cluster}, {"probability", c.probability}});
  j["distribution"] = std::move(dist);
  return j;
}

inline std::string render_json(const SememeReport& rep, std::size_t top_n) {
  require(top_n >= 1, "render_json: top_n must be >= 1");
  return report_to_json(rep, top_n).dump(2) + "\n";
}

// Inverse of render_json.
inline SememeReport parse_report_json(const std::string& text) {
  SememeReport rep;
  try {
    const auto j = nlohmann::json::parse(text);
    rep.word = j.at("word").get<std::string>();
    rep.samples = j.at("samples").get<std::size_t>();
    for (const auto& e : j.at("entries")) {
      ReportEntry re;
      re.rank = e.at("rank").get<std::size_t>();
      re.cluster = e.at("cluster").get<std::size_t>();
      re.probability = e.at("probability").get<double>();
      for (const auto& [lang, words] : e.at("descriptions").items()) {
        auto& list = re.descriptions[lang];
        for (const auto& w : words) list.push_back({w.at("token").get<std::string>(), w.at("cosine").get<double>()});
      }
      rep.entries.push_back(std::move(re));
    }
    if (j.contains("distribution")) {
      for (const auto& c : j.at("distribution")) {
        rep.distribution.push_back({c.at("cluster").get<std::size_t>(), c.at("probability").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, std::string("report JSON: ") + e.what());
  }
  return rep;
}

}  // namespace sememe
