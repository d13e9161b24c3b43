#pragma once

// Word-vector storage, linear alignment between two embedding spaces, and
// cosine nearest-neighbour search.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sememe/error.hpp"
#include "sememe/tensor.hpp"

namespace sememe {

class AlignmentMap;

class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::string> tokens, Matrix vectors, std::string language = {})
      : tokens_(std::move(tokens)), vectors_(std::move(vectors)), language_(std::move(language)) {
    require(static_cast<Eigen::Index>(tokens_.size()) == vectors_.rows(), "EmbeddingMatrix: row/token count mismatch");
    require(vectors_.allFinite(), "EmbeddingMatrix: non-finite entries");
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      require(index_.emplace(tokens_[i], i).second, "EmbeddingMatrix: duplicate token '" + tokens_[i] + "'");
    }
  }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors_.cols()); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const Matrix& vectors() const { return vectors_; }
  const std::string& language() const { return language_; }
  bool is_normalized() const { return normalized_; }
  bool is_aligned() const { return aligned_; }

  bool contains(std::string_view token) const { return index_.contains(std::string(token)); }
  std::optional<std::size_t> index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Vector row(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)).transpose(); }
  Vector row(std::string_view token) const {
    auto i = index_of(token);
    if (!i) fail(ErrorKind::kNotFound, "token not in embeddings: '" + std::string(token) + "'");
    return row(*i);
  }

  // Copy with unit-length rows.
  EmbeddingMatrix normalized() const {
    EmbeddingMatrix out = *this;
    for (Eigen::Index i = 0; i < out.vectors_.rows(); ++i) {
      const double n = out.vectors_.row(i).norm();
      if (!(n > 0.0)) fail("zero vector for token '" + tokens_[static_cast<std::size_t>(i)] + "'");
      out.vectors_.row(i) /= n;
    }
    out.normalized_ = true;
    return out;
  }

  // Copy with every row x replaced by W x; marks the result as living in the aligned space.
  EmbeddingMatrix mapped(const Matrix& w) const {
    require(w.rows() == vectors_.cols() && w.cols() == vectors_.cols(), "mapped: map dimension mismatch");
    EmbeddingMatrix out = *this;
    out.vectors_ = vectors_ * w.transpose();
    out.normalized_ = false;
    out.aligned_ = true;
    return out;
  }

  // A space that is already the shared reference space (the clustering language).
  EmbeddingMatrix as_reference_space() const {
    EmbeddingMatrix out = *this;
    out.aligned_ = true;
    return out;
  }

 private:
  std::vector<std::string> tokens_;
  Matrix vectors_;
  std::string language_;
  std::unordered_map<std::string, std::size_t> index_;
  bool normalized_ = false;
  bool aligned_ = false;
};

struct LoadedEmbeddings {
  EmbeddingMatrix matrix;
  std::vector<std::string> missing;  // filter tokens absent from the file, sorted
};

namespace detail {

inline double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(ErrorKind::kIo, "embeddings: bad number '" + std::string(s) + "' on line " + std::to_string(line_no));
  }
  return v;
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

// Text vector format: `<count> <dim>` header, then `<token> v1 ... vD` per line.
// With a filter, only listed tokens are kept (in file order). Later duplicates of
// a token are ignored.
inline LoadedEmbeddings load_embeddings(std::istream& in, const std::optional<std::set<std::string>>& filter = {},
                                        std::string language = {}) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kIo, "embeddings: missing header");
  const auto header = detail::split_spaces(line);
  if (header.size() != 2) fail(ErrorKind::kIo, "embeddings: header must be '<count> <dim>' (line 1)");
  std::size_t count = 0, dim = 0;
  for (auto [field, target] : {std::pair{header[0], &count}, std::pair{header[1], &dim}}) {
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), *target);
    if (ec != std::errc() || ptr != field.data() + field.size()) fail(ErrorKind::kIo, "embeddings: bad header (line 1)");
  }
  if (dim == 0) fail(ErrorKind::kIo, "embeddings: dimension must be positive");

  std::vector<std::string> tokens;
  std::vector<double> values;
  std::set<std::string> seen;
  std::size_t line_no = 1, rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_spaces(line);
    if (fields.empty()) continue;
    ++rows;
    if (fields.size() != dim + 1) {
      fail(ErrorKind::kIo, "embeddings: dimension mismatch on line " + std::to_string(line_no) + " (expected " +
                               std::to_string(dim) + " values, got " + std::to_string(fields.size() - 1) + ")");
    }
    std::string token(fields[0]);
    const bool wanted = !filter || filter->contains(token);
    std::vector<double> row(dim);
    for (std::size_t d = 0; d < dim; ++d) row[d] = detail::parse_double(fields[d + 1], line_no);
    if (!wanted || !seen.insert(token).second) continue;
    tokens.push_back(std::move(token));
    values.insert(values.end(), row.begin(), row.end());
  }
  if (rows != count) {
    fail(ErrorKind::kIo, "embeddings: header announces " + std::to_string(count) + " rows, file has " +
                             std::to_string(rows));
  }
  Matrix m = Eigen::Map<Matrix>(values.data(), static_cast<Eigen::Index>(tokens.size()), static_cast<Eigen::Index>(dim));
  LoadedEmbeddings out{EmbeddingMatrix(std::move(tokens), std::move(m), std::move(language)), {}};
  if (filter) {
    for (const auto& t : *filter) {
      if (!out.matrix.contains(t)) out.missing.push_back(t);
    }
  }
  return out;
}

inline LoadedEmbeddings load_embeddings(const std::string& path, const std::optional<std::set<std::string>>& filter = {},
                                        std::string language = {}) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read embeddings '" + path + "'");
  return load_embeddings(in, filter, std::move(language));
}

inline void write_embeddings(std::ostream& out, const EmbeddingMatrix& emb) {
  out << emb.size() << ' ' << emb.dim() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out << emb.tokens()[i];
    for (std::size_t d = 0; d < emb.dim(); ++d) {
      out << ' ' << emb.vectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Alignment

enum class AlignMode { kOrthogonal, kLeastSquares };

inline std::string to_string(AlignMode m) { return m == AlignMode::kOrthogonal ? "orthogonal" : "least-squares"; }
inline AlignMode parse_align_mode(std::string_view s) {
  if (s == "orthogonal") return AlignMode::kOrthogonal;
  if (s == "least-squares" || s == "lstsq") return AlignMode::kLeastSquares;
  fail("unknown alignment mode '" + std::string(s) + "'");
}

// y ~= W x for column vectors x in the source space, y in the target space.
class AlignmentMap {
 public:
  Matrix w;
  AlignMode mode = AlignMode::kOrthogonal;
  std::string source_language;
  std::string target_language;
  double residual = 0.0;  // ||W X - Y||_F on the dictionary used to fit

  std::size_t dim() const { return static_cast<std::size_t>(w.rows()); }
};

// X and Y hold one dictionary pair per row (n x D). Orthogonal mode solves the
// Procrustes problem, W = U V^T from the SVD of Y^T X; least-squares mode uses the
// pseudoinverse of X.
inline AlignmentMap align(const Matrix& x, const Matrix& y, AlignMode mode) {
  require(x.rows() == y.rows() && x.cols() == y.cols(), "align: X and Y must have the same shape");
  require(x.allFinite() && y.allFinite(), "align: non-finite input");
  const Eigen::Index d = x.cols();
  if (x.rows() < d) {
    fail(ErrorKind::kDegenerate, "degenerate dictionary: " + std::to_string(x.rows()) + " pairs for dimension " +
                                     std::to_string(d));
  }
  AlignmentMap out;
  out.mode = mode;
  if (mode == AlignMode::kOrthogonal) {
    const Svd dec = svd(Matrix(y.transpose() * x));
    out.w = dec.u * dec.v.transpose();
  } else {
    const Svd dec = svd(x);
    const double tol = static_cast<double>(std::max(x.rows(), d)) * std::numeric_limits<double>::epsilon() *
                       (dec.s.size() ? dec.s(0) : 0.0);
    if (dec.s.size() < d || !(dec.s(d - 1) > tol)) fail(ErrorKind::kDegenerate, "degenerate dictionary");
    // W^T = X^+ Y = V S^-1 U^T Y
    const Matrix wt = dec.v * dec.s.cwiseInverse().asDiagonal() * (dec.u.transpose() * y);
    out.w = wt.transpose();
  }
  out.residual = (x * out.w.transpose() - y).norm();
  return out;
}

// `#align v1 source=<s> target=<t> mode=<m> dim=<D> residual=<r>` then D rows of D values.
inline void write_alignment(std::ostream& out, const AlignmentMap& map) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "#align v1 source=" << map.source_language << " target=" << map.target_language
      << " mode=" << to_string(map.mode) << " dim=" << map.dim() << " residual=" << map.residual << '\n';
  for (Eigen::Index r = 0; r < map.w.rows(); ++r) {
    for (Eigen::Index c = 0; c < map.w.cols(); ++c) out << (c ? " " : "") << map.w(r, c);
    out << '\n';
  }
}

inline AlignmentMap read_alignment(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#align v1", 0) != 0) fail(ErrorKind::kIo, "alignment: bad header");
  AlignmentMap map;
  std::size_t dim = 0;
  for (auto field : detail::split_spaces(line)) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string key(field.substr(0, eq));
    const std::string value(field.substr(eq + 1));
    if (key == "source") map.source_language = value;
    else if (key == "target") map.target_language = value;
    else if (key == "mode") map.mode = parse_align_mode(value);
    else if (key == "dim") dim = std::stoull(value);
    else if (key == "residual") map.residual = detail::parse_double(value, 1);
  }
  if (dim == 0) fail(ErrorKind::kIo, "alignment: missing dim");
  map.w.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    if (!std::getline(in, line)) fail(ErrorKind::kIo, "alignment: truncated matrix");
    const auto fields = detail::split_spaces(line);
    if (fields.size() != dim) fail(ErrorKind::kIo, "alignment: bad row " + std::to_string(r + 2));
    for (std::size_t c = 0; c < dim; ++c) {
      map.w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = detail::parse_double(fields[c], r + 2);
    }
  }
  return map;
}

struct DictionaryPairs {
  Matrix source;  // one row per usable pair
  Matrix target;
  std::vector<std::pair<std::string, std::string>> pairs;
};

// Rows for each `source<TAB>target` pair whose tokens exist in both spaces.
inline DictionaryPairs dictionary_pairs(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                        const std::vector<std::pair<std::string, std::string>>& dictionary) {
  require(src.dim() == tgt.dim(), "dictionary_pairs: embedding dimensions differ");
  DictionaryPairs out;
  for (const auto& p : dictionary) {
    if (src.contains(p.first) && tgt.contains(p.second)) out.pairs.push_back(p);
  }
  const auto n = static_cast<Eigen::Index>(out.pairs.size());
  const auto d = static_cast<Eigen::Index>(src.dim());
  out.source.resize(n, d);
  out.target.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.source.row(i) = src.row(out.pairs[static_cast<std::size_t>(i)].first).transpose();
    out.target.row(i) = tgt.row(out.pairs[static_cast<std::size_t>(i)].second).transpose();
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> read_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read dictionary '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorKind::kIo, "dictionary: missing tab on line " + std::to_string(line_no));
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

// Fallback dictionary: every token spelled identically in both vocabularies.
inline std::vector<std::pair<std::string, std::string>> identical_pairs(const EmbeddingMatrix& src,
                                                                        const EmbeddingMatrix& tgt) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& t : src.tokens()) {
    if (tgt.contains(t)) out.emplace_back(t, t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nearest neighbours

struct Neighbor {
  std::string token;
  double cosine = 0.0;
  std::size_t index = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Top-k rows by cosine to `query`, descending; ties go to the lower vocabulary index.
// Zero rows score 0.
inline std::vector<Neighbor> nearest_neighbors(const Eigen::Ref<const Vector>& query, const EmbeddingMatrix& emb,
                                               std::size_t k, const std::set<std::string>& exclude = {}) {
  require(k >= 1, "nearest_neighbors: k must be >= 1");
  if (emb.empty()) fail("nearest_neighbors: empty embedding matrix");
  require(query.size() == static_cast<Eigen::Index>(emb.dim()), "nearest_neighbors: query dimension mismatch");
  const double qn = query.norm();
  if (!(qn > 0.0)) fail("zero vector");
  const Vector dots = emb.vectors() * query;
  std::vector<Neighbor> all;
  all.reserve(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const auto& tok = emb.tokens()[i];
    if (exclude.contains(tok)) continue;
    const double rn = emb.is_normalized() ? 1.0 : emb.vectors().row(static_cast<Eigen::Index>(i)).norm();
    const double c = rn > 0.0 ? std::clamp(dots(static_cast<Eigen::Index>(i)) / (rn * qn), -1.0, 1.0) : 0.0;
    all.push_back({tok, c, i});
  }
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      return a.cosine != b.cosine ? a.cosine > b.cosine : a.index < b.index;
                    });
  all.resize(take);
  return all;
}

}  // namespace sememe
