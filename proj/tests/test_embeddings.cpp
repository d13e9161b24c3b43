#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace testing_support;
using sememe::EmbeddingMatrix;
using sememe::Matrix;
using sememe::Vector;

namespace {

const char* kThreeWords =
    "3 4\n"
    "cat 1 0 0 0\n"
    "dog 0.5 0.5 0 0\n"
    "car 0 0 1 -2.5e-1\n";

EmbeddingMatrix toy(const std::vector<std::string>& tokens, const Matrix& m) { return EmbeddingMatrix(tokens, m, "xx"); }

}  // namespace

TEST(LoadEmbeddings, Examples) {
  std::istringstream in(kThreeWords);
  const auto all = sememe::load_embeddings(in, {}, "en");
  EXPECT_EQ(all.matrix.size(), 3u);
  EXPECT_EQ(all.matrix.dim(), 4u);
  EXPECT_EQ(all.matrix.language(), "en");
  EXPECT_EQ(all.matrix.row("car")(3), -0.25);

  std::istringstream in2(kThreeWords);
  const auto one = sememe::load_embeddings(in2, std::set<std::string>{"dog"});
  EXPECT_EQ(one.matrix.tokens(), std::vector<std::string>{"dog"});
  EXPECT_TRUE(one.missing.empty());

  std::istringstream in3(kThreeWords);
  const auto partial = sememe::load_embeddings(in3, std::set<std::string>{"dog", "zebra"});
  EXPECT_EQ(partial.matrix.size(), 1u);
  EXPECT_EQ(partial.missing, std::vector<std::string>{"zebra"});
}

TEST(LoadEmbeddings, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      sememe::load_embeddings(in);
    } catch (const sememe::Error& e) {
      EXPECT_EQ(e.kind(), sememe::ErrorKind::kIo);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("2 3\na 1 2 3\nb 1 x 3\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("2 3\na 1 2 3\nb 1 2\n").find("dimension mismatch on line 3"), std::string::npos);
  EXPECT_NE(message("3 3\na 1 2 3\n").find("header"), std::string::npos);
  EXPECT_NE(message("junk\n").find("line 1"), std::string::npos);
}

TEST(LoadEmbeddings, WriteReadRoundTrip) {
  CounterRng rng(1);
  const auto emb = toy({"a", "b", "c"}, random_normal(3, 5, rng));
  std::stringstream ss;
  sememe::write_embeddings(ss, emb);
  const auto back = sememe::load_embeddings(ss).matrix;
  EXPECT_EQ(back.tokens(), emb.tokens());
  EXPECT_EQ(back.vectors(), emb.vectors());
}

TEST(EmbeddingMatrix, NormalizedAndMapped) {
  CounterRng rng(2);
  const auto emb = toy({"a", "b"}, random_normal(2, 4, rng));
  const auto unit = emb.normalized();
  EXPECT_TRUE(unit.is_normalized());
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(unit.row(i).norm(), 1.0, 1e-15);
  EXPECT_FALSE(emb.is_aligned());
  const Matrix q = random_rotation(4, rng);
  const auto mapped = emb.mapped(q);
  EXPECT_TRUE(mapped.is_aligned());
  EXPECT_LE((mapped.row("a") - q * emb.row("a")).norm(), 1e-14);
  EXPECT_THROW(toy({"z"}, Matrix::Zero(1, 3)).normalized(), sememe::Error);
  EXPECT_THROW(toy({"a", "a"}, Matrix::Ones(2, 2)), sememe::Error);
}

TEST(Align, IdentityBothModes) {
  CounterRng rng(3);
  const Matrix x = random_normal(40, 6, rng);
  for (auto mode : {sememe::AlignMode::kOrthogonal, sememe::AlignMode::kLeastSquares}) {
    const auto map = sememe::align(x, x, mode);
    EXPECT_LE((map.w - Matrix::Identity(6, 6)).norm(), 1e-8);
    EXPECT_LE(map.residual, 1e-8);
  }
}

TEST(Align, RecoversRotation) {
  CounterRng rng(4);
  for (int t = 0; t < 5; ++t) {
    const Matrix q = random_rotation(50, rng);
    const Matrix x = random_normal(1000, 50, rng);
    const auto clean = sememe::align(x, x * q.transpose(), sememe::AlignMode::kOrthogonal);
    EXPECT_LE((clean.w - q).norm(), 1e-6);
    const Matrix y = x * q.transpose() + random_matrix(1000, 50, rng, -0.01, 0.01);
    const auto noisy = sememe::align(x, y, sememe::AlignMode::kOrthogonal);
    EXPECT_LE((noisy.w - q).norm(), 0.05);
    EXPECT_LE((noisy.w.transpose() * noisy.w - Matrix::Identity(50, 50)).norm(), 1e-8);
  }
}

TEST(Align, LeastSquaresMatchesNormalEquations) {
  CounterRng rng(5);
  const Matrix x = random_normal(30, 4, rng), y = random_normal(30, 4, rng);
  const auto map = sememe::align(x, y, sememe::AlignMode::kLeastSquares);
  // W^T solves (X^T X) W^T = X^T Y.
  const Matrix wt = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  EXPECT_LE((map.w - wt.transpose()).norm(), 1e-10);
  EXPECT_NEAR(map.residual, (x * wt - y).norm(), 1e-10);
}

TEST(Align, LeastSquaresResidualNeverAboveOrthogonal) {
  CounterRng rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto d = static_cast<Eigen::Index>(1 + rng.below(12));
    const auto n = d + static_cast<Eigen::Index>(rng.below(60));
    const Matrix x = random_normal(n, d, rng);
    const Matrix y = x * random_normal(d, d, rng) + 0.1 * random_normal(n, d, rng);
    const double orth = sememe::align(x, y, sememe::AlignMode::kOrthogonal).residual;
    EXPECT_LE(sememe::align(x, y, sememe::AlignMode::kLeastSquares).residual, orth * (1.0 + 1e-12));
  }
}

TEST(Align, DegenerateDictionary) {
  CounterRng rng(7);
  const Matrix x = random_normal(20, 3, rng) * random_normal(3, 5, rng);
  try {
    sememe::align(x, x, sememe::AlignMode::kLeastSquares);
    FAIL();
  } catch (const sememe::Error& e) {
    EXPECT_EQ(e.kind(), sememe::ErrorKind::kDegenerate);
    EXPECT_NE(std::string(e.what()).find("degenerate dictionary"), std::string::npos);
  }
  EXPECT_THROW(sememe::align(random_normal(3, 5, rng), random_normal(3, 5, rng), sememe::AlignMode::kOrthogonal),
               sememe::Error);
}

TEST(AlignmentFile, RoundTrip) {
  CounterRng rng(8);
  sememe::AlignmentMap map = sememe::align(random_normal(20, 5, rng), random_normal(20, 5, rng), sememe::AlignMode::kOrthogonal);
  map.source_language = "fr";
  map.target_language = "en";
  std::stringstream ss;
  sememe::write_alignment(ss, map);
  const auto back = sememe::read_alignment(ss);
  EXPECT_EQ(back.w, map.w);
  EXPECT_EQ(back.residual, map.residual);
  EXPECT_EQ(back.source_language, "fr");
  EXPECT_EQ(back.target_language, "en");
  EXPECT_EQ(back.mode, sememe::AlignMode::kOrthogonal);
}

TEST(NearestNeighbors, Examples) {
  Matrix m(5, 2);
  m << 1, 0, 0.9, 0.1, 0, 1, -1, 0, 0.7, 0.7;
  const auto emb = toy({"east", "east2", "north", "west", "ne"}, m);
  const auto one = sememe::nearest_neighbors(emb.row("east"), emb, 1, {"east"});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].token, "east2");
  const auto all = sememe::nearest_neighbors(emb.row("east"), emb, 10);
  ASSERT_EQ(all.size(), 5u);
  std::vector<std::string> order;
  for (const auto& n : all) order.push_back(n.token);
  EXPECT_EQ(order, (std::vector<std::string>{"east", "east2", "ne", "north", "west"}));
  EXPECT_NEAR(all[4].cosine, -1.0, 1e-15);
  EXPECT_THROW(sememe::nearest_neighbors(Vector::Zero(2), emb, 1), sememe::Error);
}

TEST(NearestNeighbors, TiesGoToLowerIndex) {
  Matrix m(3, 2);
  m << 0, 1, 1, 0, 2, 0;
  const auto emb = toy({"up", "right", "far-right"}, m);
  const auto nn = sememe::nearest_neighbors(Vector::Unit(2, 0), emb, 2);
  EXPECT_EQ(nn[0].token, "right");
  EXPECT_EQ(nn[1].token, "far-right");
}

TEST(NearestNeighbors, MatchesBruteForce) {
  CounterRng rng(9);
  for (std::size_t v : {1u, 7u, 100u, 2500u, 10000u}) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < v; ++i) tokens.push_back("t" + std::to_string(i));
    const auto emb = toy(tokens, random_normal(static_cast<Eigen::Index>(v), 16, rng));
    const Vector q = random_normal(16, 1, rng).col(0);
    std::vector<std::pair<double, std::size_t>> oracle;
    for (std::size_t i = 0; i < v; ++i) oracle.push_back({-sememe::cosine_similarity(q, emb.row(i)), i});
    std::sort(oracle.begin(), oracle.end());
    const std::size_t k = std::min<std::size_t>(v, 25);
    const auto got = sememe::nearest_neighbors(q, emb, k);
    ASSERT_EQ(got.size(), k);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(got[i].index, oracle[i].second);
      EXPECT_NEAR(got[i].cosine, -oracle[i].first, 1e-12);
    }
  }
}

TEST(Dictionary, PairsAndIdenticalFallback) {
  const auto src = toy({"chat", "chien", "voiture"}, Matrix::Identity(3, 3));
  const auto tgt = toy({"cat", "dog", "chat"}, Matrix::Identity(3, 3));
  const auto p = sememe::dictionary_pairs(src, tgt, {{"chat", "cat"}, {"chien", "dog"}, {"velo", "bike"}});
  EXPECT_EQ(p.pairs.size(), 2u);
  EXPECT_EQ(p.source.rows(), 2);
  EXPECT_EQ(sememe::identical_pairs(src, tgt), (std::vector<std::pair<std::string, std::string>>{{"chat", "chat"}}));
}
