#pragma once

// Raw text -> sentence records -> frequency-capped vocabulary.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sememe/error.hpp"

namespace sememe {

using SentenceId = std::uint32_t;

struct SentenceRecord {
  SentenceId id = 0;
  std::vector<std::string> tokens;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

// A delimiter is one UTF-8 encoded code point.
using DelimiterSet = std::set<std::string, std::less<>>;

inline const DelimiterSet& default_delimiters() {
  static const DelimiterSet set = {
      ",", ".", "?", "!", "(", ")", ";", ":", "\"", "'", "[", "]", "{", "}", "<", ">",
      "—", "–", "…", "¡", "¿", "。", "，", "！", "？",
      "；", "：", "、", "「", "」", "『", "』", "（", "）",
      "·", "«", "»", "‹", "›", "※", "~", "|", "\n"};
  return set;
}

namespace detail {

// Byte length of the UTF-8 sequence starting with `lead`; invalid leads count as 1.
inline std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

inline bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace detail

// Splits at every delimiter code point; empty segments are dropped.
inline std::vector<std::string> split_sentences(std::string_view text, const DelimiterSet& delimiters) {
  require(!delimiters.empty(), "split_sentences: empty delimiter set");
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = std::min(detail::utf8_length(static_cast<unsigned char>(text[i])), text.size() - i);
    const std::string_view cp = text.substr(i, len);
    if (delimiters.contains(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(cp);
    }
    i += len;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

// Lowercases ASCII, splits on whitespace and strips ASCII punctuation from both
// ends of each token. Non-ASCII bytes are kept verbatim.
inline std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && detail::is_ascii_punct(sentence[b])) ++b;
    while (e > b && detail::is_ascii_punct(sentence[e - 1])) --e;
    if (b < e) {
      std::string tok(sentence.substr(b, e - b));
      for (char& c : tok) {
        if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t frequency = 0;
  };

  Vocabulary() = default;
  explicit Vocabulary(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const bool inserted = index_.emplace(entries_[i].token, i).second;
      require(inserted, "Vocabulary: duplicate token '" + entries_[i].token + "'");
    }
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }

  // Dense index, or npos when absent.
  std::size_t index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? npos : it->second;
  }
  std::uint64_t frequency(std::string_view token) const {
    const std::size_t i = index_of(token);
    return i == npos ? 0 : entries_[i].frequency;
  }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& operator[](std::size_t i) const { return entries_.at(i); }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps the `cap` most frequent tokens; equal counts keep first-occurrence order.
template <typename SentenceRange>
Vocabulary build_vocab(const SentenceRange& sentences, std::size_t cap) {
  require(cap >= 1, "build_vocab: cap must be >= 1");
  std::vector<Vocabulary::Entry> entries;  // in first-occurrence order
  std::unordered_map<std::string, std::size_t> seen;
  auto count = [&](const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
      auto [it, inserted] = seen.emplace(t, entries.size());
      if (inserted) entries.push_back({t, 0});
      ++entries[it->second].frequency;
    }
  };
  for (const auto& s : sentences) {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, SentenceRecord>) {
      count(s.tokens);
    } else {
      count(s);
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  if (entries.size() > cap) entries.resize(cap);
  return Vocabulary(std::move(entries));
}

// Keeps records with min_len <= length <= max_len and renumbers them 0..n-1.
inline std::vector<SentenceRecord> filter_by_length(std::vector<SentenceRecord> sentences, std::size_t min_len,
                                                    std::size_t max_len) {
  require(min_len >= 1 && min_len <= max_len, "filter_by_length: need 1 <= min <= max");
  std::vector<SentenceRecord> out;
  out.reserve(sentences.size());
  for (auto& s : sentences) {
    if (s.tokens.size() >= min_len && s.tokens.size() <= max_len) {
      s.id = static_cast<SentenceId>(out.size());
      out.push_back(std::move(s));
    }
  }
  return out;
}

// split -> tokenize -> number, one document at a time. Sentences never span documents.
inline std::vector<SentenceRecord> sentences_from_documents(const std::vector<std::string>& documents,
                                                            const DelimiterSet& delimiters) {
  std::vector<SentenceRecord> out;
  for (const auto& doc : documents) {
    for (const auto& raw : split_sentences(doc, delimiters)) {
      auto tokens = tokenize(raw);
      if (tokens.empty()) continue;
      out.push_back({static_cast<SentenceId>(out.size()), std::move(tokens)});
    }
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One record per line: id<TAB>token token token
inline void write_sentences(std::ostream& out, const std::vector<SentenceRecord>& sentences) {
  for (const auto& s : sentences) {
    out << s.id << '\t';
    for (std::size_t i = 0; i < s.tokens.size(); ++i) out << (i ? " " : "") << s.tokens[i];
    out << '\n';
  }
}

inline std::vector<SentenceRecord> read_sentences(std::istream& in) {
  std::vector<SentenceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorKind::kIo, "sentences: missing tab on line " + std::to_string(line_no));
    SentenceRecord rec;
    try {
      rec.id = static_cast<SentenceId>(std::stoul(line.substr(0, tab)));
    } catch (const std::exception&) {
      fail(ErrorKind::kIo, "sentences: bad id on line " + std::to_string(line_no));
    }
    if (rec.id != out.size()) fail(ErrorKind::kIo, "sentences: non-dense id on line " + std::to_string(line_no));
    std::istringstream toks(line.substr(tab + 1));
    for (std::string t; toks >> t;) rec.tokens.push_back(t);
    out.push_back(std::move(rec));
  }
  return out;
}

// token<TAB>frequency, in index order.
inline void write_vocab(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& e : vocab.entries()) out << e.token << '\t' << e.frequency << '\n';
}

inline std::set<std::string> read_token_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read '" + path + "'");
  std::set<std::string> out;
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    if (b < line.size() && line[b] != '#') out.insert(line.substr(b));
  }
  return out;
}

}  // namespace sememe
