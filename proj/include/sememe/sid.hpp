#pragma once

// Sentence Indices Dictionary: token -> ascending ids of the sentences that contain it.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sememe/corpus.hpp"
#include "sememe/error.hpp"
#include "sememe/rng.hpp"

namespace sememe {

class SentenceIndex {
 public:
  using IdList = std::vector<SentenceId>;

  SentenceIndex() = default;
  explicit SentenceIndex(std::size_t sentence_count) : sentence_count_(sentence_count) {}

  std::size_t sentence_count() const { return sentence_count_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const std::string& token) const { return entries_.contains(token); }

  const IdList& ids(const std::string& token) const {
    auto it = entries_.find(token);
    if (it == entries_.end()) fail(ErrorKind::kNotFound, "token not in SID: '" + token + "'");
    return it->second;
  }

  // Ordered by token so iteration and persistence are deterministic.
  const std::map<std::string, IdList>& entries() const { return entries_; }

  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [t, _] : entries_) out.push_back(t);
    return out;
  }

  // Ids are sorted and deduplicated; every id must be < sentence_count().
  void set(const std::string& token, IdList ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    require(ids.empty() || ids.back() < sentence_count_, "SID: sentence id out of range for '" + token + "'");
    entries_[token] = std::move(ids);
  }
  void erase(const std::string& token) { entries_.erase(token); }

  friend bool operator==(const SentenceIndex&, const SentenceIndex&) = default;

 private:
  std::size_t sentence_count_ = 0;
  std::map<std::string, IdList> entries_;
};

// Out-of-vocabulary tokens are skipped; repeated tokens within a sentence are listed once.
inline SentenceIndex build_sid(const std::vector<SentenceRecord>& sentences, const Vocabulary& vocab) {
  SentenceIndex sid(sentences.size());
  std::map<std::string, SentenceIndex::IdList> lists;
  for (const auto& s : sentences) {
    require(s.id < sentences.size(), "build_sid: sentence ids must be dense");
    for (const auto& t : s.tokens) {
      if (!vocab.contains(t)) continue;
      auto& ids = lists[t];
      if (ids.empty() || ids.back() != s.id) ids.push_back(s.id);
    }
  }
  for (auto& [t, ids] : lists) sid.set(t, std::move(ids));
  return sid;
}

inline SentenceIndex remove_stopwords(SentenceIndex sid, const std::set<std::string>& stopwords) {
  for (const auto& w : stopwords) sid.erase(w);
  return sid;
}

// k distinct ids drawn uniformly without replacement (partial Fisher-Yates), in draw order.
inline SentenceIndex::IdList sample_without_replacement(const SentenceIndex::IdList& ids, std::size_t k,
                                                        CounterRng& rng) {
  SentenceIndex::IdList pool = ids;
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

// Lists longer than `upper` are subsampled to exactly `upper`; lists shorter than
// `lower` are dropped. Each token draws from its own stream derived from `seed`.
inline SentenceIndex balance(SentenceIndex sid, std::size_t upper, std::size_t lower, std::uint64_t seed) {
  require(lower <= upper, "balance: lower must be <= upper");
  const CounterRng root(seed, hash_name("sid.balance"));
  SentenceIndex out(sid.sentence_count());
  for (const auto& [token, ids] : sid.entries()) {
    if (ids.size() < lower) continue;
    if (ids.size() > upper) {
      CounterRng rng = root.split(token);
      out.set(token, sample_without_replacement(ids, upper, rng));
    } else {
      out.set(token, ids);
    }
  }
  return out;
}

// min(n, available) distinct ids, uniformly without replacement, in random order.
inline SentenceIndex::IdList sample_sentences(const SentenceIndex& sid, const std::string& token, std::size_t n,
                                              std::uint64_t seed) {
  require(n >= 1, "sample_sentences: n must be >= 1");
  const auto& ids = sid.ids(token);
  CounterRng rng = CounterRng(seed, hash_name("sid.sample")).split(token);
  return sample_without_replacement(ids, n, rng);
}

// Header `#sid v1 sentences=<N>`, then `token<TAB>id,id,...` per line.
inline void write_sid(std::ostream& out, const SentenceIndex& sid) {
  out << "#sid v1 sentences=" << sid.sentence_count() << '\n';
  for (const auto& [token, ids] : sid.entries()) {
    out << token << '\t';
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
    out << '\n';
  }
}

inline SentenceIndex read_sid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#sid v1 sentences=", 0) != 0) fail(ErrorKind::kIo, "SID: bad header");
  std::size_t count = 0;
  try {
    count = std::stoull(line.substr(std::string("#sid v1 sentences=").size()));
  } catch (const std::exception&) {
    fail(ErrorKind::kIo, "SID: bad sentence count in header");
  }
  SentenceIndex sid(count);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) fail(ErrorKind::kIo, "SID: malformed line " + std::to_string(line_no));
    SentenceIndex::IdList ids;
    std::istringstream list(line.substr(tab + 1));
    for (std::string item; std::getline(list, item, ',');) {
      try {
        ids.push_back(static_cast<SentenceId>(std::stoul(item)));
      } catch (const std::exception&) {
        fail(ErrorKind::kIo, "SID: bad id on line " + std::to_string(line_no));
      }
    }
    try {
      sid.set(line.substr(0, tab), std::move(ids));
    } catch (const Error& e) {
      fail(ErrorKind::kIo, std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return sid;
}

}  // namespace sememe
