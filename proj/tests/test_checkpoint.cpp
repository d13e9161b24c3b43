#include <gtest/gtest.h>

#include "support.hpp"

using namespace testing_support;

TEST(Checkpoint, RoundTripIsExact) {
  CounterRng rng(1);
  TempDir dir("ckpt");
  const std::vector<std::size_t> hidden{6, 3, 6};
  const auto ae = sememe::Autoencoder::create(8, hidden, 4);
  const sememe::SememeSpace space{random_normal(3, 5, rng)};
  sememe::TrainConfig cfg;
  cfg.layers = hidden;
  cfg.clusters = 5;
  cfg.lambda = 0.25;
  cfg.seed = 77;
  sememe::save_checkpoint(dir.path(), ae, space, cfg);
  const auto ck = sememe::load_checkpoint(dir.path());
  EXPECT_EQ(ck.ae, ae);
  EXPECT_EQ(ck.space, space);
  EXPECT_EQ(ck.config.seed, 77u);
  EXPECT_EQ(ck.config.lambda, 0.25);
  EXPECT_EQ(ck.config.layers, hidden);
  EXPECT_EQ(std::filesystem::file_size(dir.path() / "weights"), 8 * (ae.parameter_count() + 15));
}

TEST(Checkpoint, RejectsTruncatedWeights) {
  TempDir dir("ckpt-bad");
  const std::vector<std::size_t> hidden{4, 2, 4};
  sememe::save_checkpoint(dir.path(), sememe::Autoencoder::create(5, hidden, 1), sememe::SememeSpace{sememe::Matrix::Zero(2, 3)}, {});
  const std::string bytes = slurp(dir.path() / "weights");
  write_file(dir.path() / "weights", bytes.substr(0, bytes.size() - 8));
  try {
    sememe::load_checkpoint(dir.path());
    FAIL();
  } catch (const sememe::Error& e) {
    EXPECT_EQ(e.kind(), sememe::ErrorKind::kIo);
    EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
  }
}

TEST(Checkpoint, RejectsBadMeta) {
  TempDir dir("ckpt-meta");
  EXPECT_THROW(sememe::load_checkpoint(dir.path()), sememe::Error);
  write_file(dir.path() / "meta", "something else\n");
  EXPECT_THROW(sememe::load_checkpoint(dir.path()), sememe::Error);
  EXPECT_THROW(sememe::save_checkpoint(dir.path(), sememe::Autoencoder::create(5, std::vector<std::size_t>{4, 2, 4}, 1),
                                       sememe::SememeSpace{sememe::Matrix::Zero(3, 3)}, {}),
               sememe::Error);
}
