#pragma once

// Contextual meaning vectors: for a word inside a sentence, the attention-weighted
// sum of the sentence's unit-normalized embeddings, with the target as the query.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sememe/corpus.hpp"
#include "sememe/embeddings.hpp"
#include "sememe/error.hpp"
#include "sememe/rng.hpp"
#include "sememe/sid.hpp"
#include "sememe/tensor.hpp"

namespace sememe {

struct Attention {
  Vector weights;  // one per context token, sums to 1
  Vector meaning;  // sum_j weights[j] * unit(x_j)
};

// `sentence` holds one embedding per row. Scores are cosines to the target row,
// multiplied by `expansion` before the softmax. The target attends to itself.
inline Attention attend(const Matrix& sentence, std::size_t target, double expansion) {
  require(sentence.rows() >= 1, "attend: empty sentence");
  if (target >= static_cast<std::size_t>(sentence.rows())) fail("attend: target index out of range");
  Matrix unit = sentence;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double n = unit.row(i).norm();
    if (!(n > 0.0)) fail("zero vector");
    unit.row(i) /= n;
  }
  Attention out;
  const Vector scores = unit * unit.row(static_cast<Eigen::Index>(target)).transpose();
  out.weights = softmax_scaled(scores, expansion);
  out.meaning = unit.transpose() * out.weights;
  return out;
}

inline Vector contextual_meaning(const Matrix& sentence, std::size_t target, double expansion) {
  return attend(sentence, target, expansion).meaning;
}

struct MeaningBatch {
  std::string token;
  std::vector<SentenceId> sentence_ids;
  Matrix meanings;  // one row per sentence id
  double expansion = 0.0;
};

// Called with the attention weights of every (word, sentence) pair processed.
using WeightObserver = std::function<void(const std::string& token, SentenceId id, const Vector& weights)>;

// Embedding rows of a sentence (tokens without a vector are left out of the
// context) and the position of the first occurrence of `token` among them.
inline std::pair<Matrix, std::size_t> sentence_context(const SentenceRecord& sentence, const std::string& token,
                                                       const EmbeddingMatrix& emb) {
  std::vector<std::size_t> rows;
  std::size_t target = static_cast<std::size_t>(-1);
  for (const auto& t : sentence.tokens) {
    auto idx = emb.index_of(t);
    if (!idx) continue;
    if (t == token && target == static_cast<std::size_t>(-1)) target = rows.size();
    rows.push_back(*idx);
  }
  if (target == static_cast<std::size_t>(-1)) {
    fail(ErrorKind::kNotFound, "occurrence not found: '" + token + "' in sentence " + std::to_string(sentence.id));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(emb.dim()));
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = emb.vectors().row(static_cast<Eigen::Index>(rows[i]));
  return {std::move(m), target};
}

// One meaning per sampled sentence (up to batch_size of them) for `token`.
inline MeaningBatch batch_contextual_meanings(const std::string& token, const SentenceIndex& sid,
                                              const std::vector<SentenceRecord>& sentences,
                                              const EmbeddingMatrix& emb, std::size_t batch_size, double expansion,
                                              std::uint64_t seed, const WeightObserver& observer = {}) {
  if (!sid.contains(token)) fail(ErrorKind::kNotFound, "token not in SID: '" + token + "'");
  if (!emb.contains(token)) fail(ErrorKind::kNotFound, "token not in embeddings: '" + token + "'");
  MeaningBatch batch;
  batch.token = token;
  batch.expansion = expansion;
  batch.sentence_ids = sample_sentences(sid, token, batch_size, seed);
  batch.meanings.resize(static_cast<Eigen::Index>(batch.sentence_ids.size()), static_cast<Eigen::Index>(emb.dim()));
  for (std::size_t i = 0; i < batch.sentence_ids.size(); ++i) {
    const SentenceId id = batch.sentence_ids[i];
    if (id >= sentences.size()) fail(ErrorKind::kNotFound, "token not in sentence store: id " + std::to_string(id));
    auto [context, target] = sentence_context(sentences[id], token, emb);
    Attention a = attend(context, target, expansion);
    if (observer) observer(token, id, a.weights);
    batch.meanings.row(static_cast<Eigen::Index>(i)) = a.meaning.transpose();
  }
  return batch;
}

// Walks `items` in consecutive windows of `window`, shuffling the members of each
// window with a generator derived from (seed, window number).
template <typename T>
std::vector<T> shuffled_word_stream(std::vector<T> items, std::size_t window, std::uint64_t seed) {
  require(window >= 1, "shuffled_word_stream: window must be >= 1");
  const CounterRng root(seed, hash_name("attention.window"));
  for (std::size_t start = 0, w = 0; start < items.size(); start += window, ++w) {
    const std::size_t end = std::min(items.size(), start + window);
    CounterRng rng = root.split(w);
    std::span<T> chunk(items.data() + start, end - start);
    rng.shuffle(chunk);
  }
  return items;
}

// Grouped source of input vectors for the clustering network. Each group is one
// vocabulary word; draws are deterministic in (group, n, seed).
class MeaningSource {
 public:
  virtual ~MeaningSource() = default;
  virtual std::size_t group_count() const = 0;
  virtual std::size_t dim() const = 0;
  virtual MeaningBatch draw(std::size_t group, std::size_t n, std::uint64_t seed) const = 0;
};

// Meanings computed on demand from a corpus, its SID and an embedding space.
class CorpusMeanings final : public MeaningSource {
 public:
  CorpusMeanings(const SentenceIndex& sid, const std::vector<SentenceRecord>& sentences, const EmbeddingMatrix& emb,
                 double expansion)
      : sid_(sid), sentences_(sentences), emb_(emb), expansion_(expansion) {
    for (const auto& t : sid.tokens()) {
      if (emb.contains(t)) words_.push_back(t);
      else skipped_.push_back(t);
    }
  }

  std::size_t group_count() const override { return words_.size(); }
  std::size_t dim() const override { return emb_.dim(); }
  MeaningBatch draw(std::size_t group, std::size_t n, std::uint64_t seed) const override {
    return batch_contextual_meanings(words_.at(group), sid_, sentences_, emb_, n, expansion_, seed, observer_);
  }

  const std::vector<std::string>& words() const { return words_; }
  // SID tokens that have no embedding and are therefore never drawn.
  const std::vector<std::string>& skipped() const { return skipped_; }
  void set_observer(WeightObserver observer) { observer_ = std::move(observer); }

 private:
  const SentenceIndex& sid_;
  const std::vector<SentenceRecord>& sentences_;
  const EmbeddingMatrix& emb_;
  double expansion_;
  std::vector<std::string> words_;
  std::vector<std::string> skipped_;
  WeightObserver observer_;
};

}  // namespace sememe
