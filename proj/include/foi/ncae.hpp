#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "foi/audio.hpp"
#include "foi/rng.hpp"

namespace foi {

struct TrainConfig {
  int hidden_layers = 3;
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
};

// Dense autoencoder with every hidden width equal to the input width
// (non-compressed), tanh hidden activations and a linear output.
struct NcaeNet {
  std::vector<Eigen::MatrixXd> weights;  // hidden_layers + 1 square matrices
  std::vector<Eigen::VectorXd> biases;

  int dim() const { return weights.empty() ? 0 : int(weights[0].cols()); }

  // Columns of x are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l < weights.size(); ++l) {
      h = (weights[l] * h).colwise() + biases[l];
      if (l + 1 < weights.size()) h = h.array().tanh();
    }
    return h;
  }

  // Mean squared reconstruction error over dimensions and samples.
  double loss(const Eigen::MatrixXd& x) const {
    const Eigen::MatrixXd r = forward(x) - x;
    return r.squaredNorm() / double(r.size());
  }

  // Backprop for the loss above. Gradient containers are resized to match.
  double loss_and_gradients(const Eigen::MatrixXd& x,
                            std::vector<Eigen::MatrixXd>& grad_w,
                            std::vector<Eigen::VectorXd>& grad_b) const {
    const std::size_t n_layers = weights.size();
    std::vector<Eigen::MatrixXd> acts(n_layers);  // post-activation per layer
    Eigen::MatrixXd h = x;
    for (std::size_t l = 0; l < n_layers; ++l) {
      h = (weights[l] * h).colwise() + biases[l];
      if (l + 1 < n_layers) h = h.array().tanh();
      acts[l] = h;
    }
    const Eigen::MatrixXd residual = acts[n_layers - 1] - x;
    const double loss = residual.squaredNorm() / double(residual.size());

    grad_w.resize(n_layers);
    grad_b.resize(n_layers);
    Eigen::MatrixXd delta = 2.0 * residual / double(residual.size());
    for (std::size_t l = n_layers; l-- > 0;) {
      const Eigen::MatrixXd& input = l == 0 ? x : acts[l - 1];
      grad_w[l] = delta * input.transpose();
      grad_b[l] = delta.rowwise().sum();
      if (l > 0) {
        delta = weights[l].transpose() * delta;
        delta.array() *= 1.0 - acts[l - 1].array().square();
      }
    }
    return loss;
  }
};

inline NcaeNet init_net(int dim, int hidden_layers, Rng& rng) {
  NcaeNet net;
  const double bound = std::sqrt(6.0 / double(2 * dim));  // Xavier uniform
  for (int l = 0; l < hidden_layers + 1; ++l) {
    Eigen::MatrixXd w(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) w(i, j) = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(Eigen::VectorXd::Zero(dim));
  }
  return net;
}

// Trained model: network plus the z-score statistics fitted on the normal
// training set. Anomaly score is reconstruction MSE in normalized space.
struct NcaeModel {
  NcaeNet net;
  Eigen::VectorXd mean;
  Eigen::VectorXd std_dev;  // floored at 1e-6
  TrainConfig config;
  double final_loss = 0.0;
};

struct TrainResult {
  NcaeModel model;
  std::vector<double> epoch_losses;  // full-set loss after each epoch
};

namespace ncae_detail {

class Adam {
 public:
  Adam(const NcaeNet& net, double lr) : lr_(lr) {
    for (const auto& w : net.weights) {
      mw_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
      vw_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : net.biases) {
      mb_.push_back(Eigen::VectorXd::Zero(b.size()));
      vb_.push_back(Eigen::VectorXd::Zero(b.size()));
    }
  }

  void step(NcaeNet& net, const std::vector<Eigen::MatrixXd>& gw,
            const std::vector<Eigen::VectorXd>& gb) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * gw[l];
      vw_[l] = (beta2_ * vw_[l].array() + (1.0 - beta2_) * gw[l].array().square()).matrix();
      net.weights[l].array() -=
          lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps_);
      mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * gb[l];
      vb_[l] = (beta2_ * vb_[l].array() + (1.0 - beta2_) * gb[l].array().square()).matrix();
      net.biases[l].array() -=
          lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps_);
    }
  }

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

}  // namespace ncae_detail

// Mini-batch training on normal features only. Deterministic for a fixed
// seed: init and per-epoch shuffles come from the same seeded stream.
inline TrainResult train(const std::vector<std::vector<double>>& features,
                         const TrainConfig& config) {
  if (features.size() < 10)
    throw Error("train: need at least 10 training vectors, got " +
                std::to_string(features.size()));
  const std::size_t dim = features[0].size();
  if (dim == 0) throw Error("train: empty feature vectors");
  for (const auto& f : features) {
    if (f.size() != dim) throw Error("train: feature dimensionality mismatch");
    if (!all_finite(f)) throw Error("train: non-finite feature value");
  }
  if (config.hidden_layers < 1) throw Error("train: need at least one hidden layer");
  if (config.epochs < 1 || config.batch_size < 1 || config.learning_rate <= 0.0)
    throw Error("train: invalid training config");

  const std::size_t n = features.size();
  Eigen::MatrixXd raw(dim, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < dim; ++i) raw(Eigen::Index(i), Eigen::Index(j)) = features[j][i];

  NcaeModel model;
  model.config = config;
  model.mean = raw.rowwise().mean();
  Eigen::MatrixXd centered = raw.colwise() - model.mean;
  model.std_dev = (centered.array().square().rowwise().mean()).sqrt();
  model.std_dev = model.std_dev.cwiseMax(1e-6);
  const Eigen::MatrixXd x = centered.array().colwise() / model.std_dev.array();

  Rng rng(config.seed);
  model.net = init_net(int(dim), config.hidden_layers, rng);
  ncae_detail::Adam adam(model.net, config.learning_rate);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<Eigen::MatrixXd> gw;
  std::vector<Eigen::VectorXd> gb;

  TrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += std::size_t(config.batch_size)) {
      const std::size_t count = std::min(std::size_t(config.batch_size), n - start);
      Eigen::MatrixXd batch(dim, count);
      for (std::size_t j = 0; j < count; ++j)
        batch.col(Eigen::Index(j)) = x.col(Eigen::Index(order[start + j]));
      model.net.loss_and_gradients(batch, gw, gb);
      adam.step(model.net, gw, gb);
    }
    const double epoch_loss = model.net.loss(x);
    if (!std::isfinite(epoch_loss))
      throw Error("train: diverged at epoch " + std::to_string(epoch) +
                  " (non-finite loss); lower the learning rate");
    result.epoch_losses.push_back(epoch_loss);
  }
  model.final_loss = result.epoch_losses.back();
  result.model = std::move(model);
  return result;
}

inline double score(const NcaeModel& model, const std::vector<double>& feature) {
  if (Eigen::Index(feature.size()) != model.mean.size())
    throw Error("score: feature dimension " + std::to_string(feature.size()) +
                " does not match model dimension " + std::to_string(model.mean.size()));
  Eigen::VectorXd x(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) x(Eigen::Index(i)) = feature[i];
  x = (x - model.mean).array() / model.std_dev.array();
  const Eigen::VectorXd r = model.net.forward(x) - x;
  return r.squaredNorm() / double(r.size());
}

// ---- model file format ----
// "NCAE" magic, u32 version, u32 dim, u32 hidden layers, u32 epochs,
// u32 batch, f64 learning rate, u64 seed, f64 final loss, then per layer
// weights (row-major f64) and biases, then mean and std vectors.
// All integers and doubles little-endian; this implementation assumes a
// little-endian host.

namespace ncae_detail {

constexpr char kMagic[4] = {'N', 'C', 'A', 'E'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::istream& is, T& v, const std::string& path) {
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw Error("load_model: '" + path + "' is truncated or corrupt");
}

}  // namespace ncae_detail

inline void save_model(const NcaeModel& model, const std::string& path) {
  using namespace ncae_detail;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("save_model: cannot open '" + path + "'");
  f.write(kMagic, 4);
  write_pod(f, kVersion);
  write_pod(f, std::uint32_t(model.net.dim()));
  write_pod(f, std::uint32_t(model.net.weights.size() - 1));
  write_pod(f, std::uint32_t(model.config.epochs));
  write_pod(f, std::uint32_t(model.config.batch_size));
  write_pod(f, model.config.learning_rate);
  write_pod(f, std::uint64_t(model.config.seed));
  write_pod(f, model.final_loss);
  for (std::size_t l = 0; l < model.net.weights.size(); ++l) {
    const Eigen::MatrixXd& w = model.net.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) write_pod(f, w(i, j));
    const Eigen::VectorXd& b = model.net.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) write_pod(f, b(i));
  }
  for (Eigen::Index i = 0; i < model.mean.size(); ++i) write_pod(f, model.mean(i));
  for (Eigen::Index i = 0; i < model.std_dev.size(); ++i) write_pod(f, model.std_dev(i));
  if (!f) throw Error("save_model: write failed for '" + path + "'");
}

inline NcaeModel load_model(const std::string& path) {
  using namespace ncae_detail;
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("load_model: cannot open '" + path + "'");
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("load_model: '" + path + "' has wrong magic header");
  std::uint32_t version, dim, hidden, epochs, batch;
  read_pod(f, version, path);
  if (version != kVersion)
    throw Error("load_model: '" + path + "' has unsupported version " +
                std::to_string(version));
  read_pod(f, dim, path);
  read_pod(f, hidden, path);
  read_pod(f, epochs, path);
  read_pod(f, batch, path);
  if (dim == 0 || dim > (1u << 24) || hidden == 0 || hidden > 1024)
    throw Error("load_model: '" + path + "' has implausible dimensions");

  NcaeModel model;
  model.config.epochs = int(epochs);
  model.config.batch_size = int(batch);
  model.config.hidden_layers = int(hidden);
  read_pod(f, model.config.learning_rate, path);
  std::uint64_t seed;
  read_pod(f, seed, path);
  model.config.seed = seed;
  read_pod(f, model.final_loss, path);
  for (std::uint32_t l = 0; l < hidden + 1; ++l) {
    Eigen::MatrixXd w(dim, dim);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) read_pod(f, w(i, j), path);
    model.net.weights.push_back(std::move(w));
    Eigen::VectorXd b(dim);
    for (Eigen::Index i = 0; i < b.size(); ++i) read_pod(f, b(i), path);
    model.net.biases.push_back(std::move(b));
  }
  model.mean.resize(dim);
  model.std_dev.resize(dim);
  for (Eigen::Index i = 0; i < model.mean.size(); ++i) read_pod(f, model.mean(i), path);
  for (Eigen::Index i = 0; i < model.std_dev.size(); ++i) read_pod(f, model.std_dev(i), path);
  return model;
}

}  // namespace foi
