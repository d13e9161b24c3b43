#pragma once

// Checkpoint directory:
//   meta     text, `key value...` per line (format tag, layer widths, activations,
//            bottleneck, latent, clusters, seed, parameter count, config echo)
//   weights  little-endian float64; per layer the weight matrix (out x in,
//            row-major) then its bias; finally M (R x K, row-major)

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sememe/autoencoder.hpp"
#include "sememe/dcn.hpp"
#include "sememe/error.hpp"
#include "sememe/kmeans.hpp"

namespace sememe {

struct Checkpoint {
  Autoencoder ae;
  SememeSpace space;
  TrainConfig config;
};

namespace detail {

inline void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), 8);
}

inline double get_f64(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<double>(bits);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
  return s.str();
}

}  // namespace detail

inline void write_config_echo(std::ostream& out, const TrainConfig& c) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "config.layers " << detail::join(c.layers) << '\n'
      << "config.lambda " << c.lambda << '\n'
      << "config.learning_rate " << c.learning_rate << '\n'
      << "config.batch_size " << c.batch_size << '\n'
      << "config.epochs " << c.epochs << '\n'
      << "config.finetune_epochs " << c.finetune_epochs << '\n'
      << "config.patience " << c.patience << '\n'
      << "config.clusters " << c.clusters << '\n'
      << "config.loops " << c.loops << '\n'
      << "config.per_word_batches " << c.per_word_batches << '\n'
      << "config.shuffle_window " << c.shuffle_window << '\n'
      << "config.kmeans_max_iters " << c.kmeans_max_iters << '\n'
      << "config.initial_count " << c.initial_count << '\n';
}

inline void save_checkpoint(const std::filesystem::path& dir, const Autoencoder& ae, const SememeSpace& space,
                            const TrainConfig& cfg) {
  require(space.latent_dim() == ae.latent_dim(), "save_checkpoint: sememe space does not match the latent width");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create checkpoint directory '" + dir.string() + "'");

  std::ofstream meta(dir / "meta", std::ios::binary);
  if (!meta) fail(ErrorKind::kIo, "cannot write '" + (dir / "meta").string() + "'");
  std::vector<std::string> acts;
  for (const auto& L : ae.layers()) acts.push_back(to_string(L.activation));
  meta << "sememe-checkpoint v1\n"
       << "layers " << detail::join(ae.layer_sizes()) << '\n'
       << "activations " << detail::join(acts) << '\n'
       << "bottleneck " << ae.bottleneck() << '\n'
       << "latent " << ae.latent_dim() << '\n'
       << "clusters " << space.clusters() << '\n'
       << "seed " << cfg.seed << '\n'
       << "parameters " << ae.parameter_count() << '\n';
  write_config_echo(meta, cfg);
  if (!meta) fail(ErrorKind::kIo, "failed writing checkpoint meta");

  std::ofstream w(dir / "weights", std::ios::binary);
  if (!w) fail(ErrorKind::kIo, "cannot write '" + (dir / "weights").string() + "'");
  for (const auto& L : ae.layers()) {
    for (Eigen::Index i = 0; i < L.weight.size(); ++i) detail::put_f64(w, L.weight.data()[i]);
    for (Eigen::Index i = 0; i < L.bias.size(); ++i) detail::put_f64(w, L.bias(i));
  }
  for (Eigen::Index i = 0; i < space.m.size(); ++i) detail::put_f64(w, space.m.data()[i]);
  if (!w) fail(ErrorKind::kIo, "failed writing checkpoint weights");
}

inline Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream meta(dir / "meta");
  if (!meta) fail(ErrorKind::kIo, "cannot read checkpoint '" + (dir / "meta").string() + "'");
  std::string line;
  if (!std::getline(meta, line) || line != "sememe-checkpoint v1") fail(ErrorKind::kIo, "checkpoint: bad meta header");
  std::map<std::string, std::vector<std::string>> kv;
  while (std::getline(meta, line)) {
    std::istringstream s(line);
    std::string key;
    if (!(s >> key)) continue;
    auto& vals = kv[key];
    for (std::string v; s >> v;) vals.push_back(v);
  }
  auto need = [&](const std::string& key) -> const std::vector<std::string>& {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) fail(ErrorKind::kIo, "checkpoint meta: missing '" + key + "'");
    return it->second;
  };
  auto num = [&](const std::string& key) { return static_cast<std::size_t>(std::stoull(need(key).front())); };

  Checkpoint ck;
  std::vector<std::size_t> sizes;
  std::vector<Activation> acts;
  std::size_t bottleneck = 0, latent = 0, clusters = 0, params = 0;
  try {
    for (const auto& v : need("layers")) sizes.push_back(std::stoull(v));
    for (const auto& v : need("activations")) acts.push_back(parse_activation(v));
    bottleneck = num("bottleneck");
    latent = num("latent");
    clusters = num("clusters");
    params = num("parameters");
    ck.config.seed = std::stoull(need("seed").front());
    if (kv.contains("config.layers")) {
      ck.config.layers.clear();
      for (const auto& v : kv["config.layers"]) ck.config.layers.push_back(std::stoull(v));
    }
    auto opt_d = [&](const std::string& k, double& out) { if (kv.contains(k) && !kv[k].empty()) out = std::stod(kv[k].front()); };
    auto opt_u = [&](const std::string& k, std::size_t& out) { if (kv.contains(k) && !kv[k].empty()) out = std::stoull(kv[k].front()); };
    opt_d("config.lambda", ck.config.lambda);
    opt_d("config.learning_rate", ck.config.learning_rate);
    opt_d("config.initial_count", ck.config.initial_count);
    opt_u("config.batch_size", ck.config.batch_size);
    opt_u("config.epochs", ck.config.epochs);
    opt_u("config.finetune_epochs", ck.config.finetune_epochs);
    opt_u("config.patience", ck.config.patience);
    opt_u("config.clusters", ck.config.clusters);
    opt_u("config.loops", ck.config.loops);
    opt_u("config.per_word_batches", ck.config.per_word_batches);
    opt_u("config.shuffle_window", ck.config.shuffle_window);
    opt_u("config.kmeans_max_iters", ck.config.kmeans_max_iters);
  } catch (const Error& e) {
    fail(ErrorKind::kIo, std::string("checkpoint meta: ") + e.what());
  } catch (const std::exception&) {
    fail(ErrorKind::kIo, "checkpoint meta: malformed number");
  }
  if (sizes.size() < 3 || acts.size() + 1 != sizes.size() || bottleneck + 1 >= acts.size() ||
      sizes[bottleneck + 1] != latent) {
    fail(ErrorKind::kIo, "checkpoint meta: inconsistent layer description");
  }
  std::size_t expected_params = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) expected_params += sizes[l] * sizes[l + 1] + sizes[l + 1];
  if (expected_params != params) fail(ErrorKind::kIo, "checkpoint meta: parameter count does not match layer sizes");

  std::ifstream w(dir / "weights", std::ios::binary);
  if (!w) fail(ErrorKind::kIo, "cannot read checkpoint '" + (dir / "weights").string() + "'");
  std::ostringstream buf;
  buf << w.rdbuf();
  const std::string bytes = buf.str();
  const std::size_t total = params + latent * clusters;
  if (bytes.size() != 8 * total) {
    fail(ErrorKind::kIo, "checkpoint weights: expected " + std::to_string(8 * total) + " bytes, found " +
                             std::to_string(bytes.size()));
  }
  const char* p = bytes.data();
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer L;
    L.activation = acts[l];
    L.weight.resize(static_cast<Eigen::Index>(sizes[l + 1]), static_cast<Eigen::Index>(sizes[l]));
    for (Eigen::Index i = 0; i < L.weight.size(); ++i, p += 8) L.weight.data()[i] = detail::get_f64(p);
    L.bias.resize(static_cast<Eigen::Index>(sizes[l + 1]));
    for (Eigen::Index i = 0; i < L.bias.size(); ++i, p += 8) L.bias(i) = detail::get_f64(p);
    layers.push_back(std::move(L));
  }
  ck.ae = Autoencoder(std::move(layers), bottleneck);
  ck.space.m.resize(static_cast<Eigen::Index>(latent), static_cast<Eigen::Index>(clusters));
  for (Eigen::Index i = 0; i < ck.space.m.size(); ++i, p += 8) ck.space.m.data()[i] = detail::get_f64(p);
  return ck;
}

}  // namespace sememe
