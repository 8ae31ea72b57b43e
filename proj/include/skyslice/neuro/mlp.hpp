#pragma once

#include "skyslice/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace skyslice::neuro {

enum class OutputActivation { Identity, Tanh };

inline std::string_view to_string(OutputActivation a) {
  return a == OutputActivation::Tanh ? "tanh" : "identity";
}

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Parameter gradients of an Mlp, laid out like the network itself, plus
/// the gradient with respect to the network input.
template <typename Scalar>
struct MlpGradients {
  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
  Matrix<Scalar> input;

  bool all_finite() const {
    for (const auto& w : weights)
      if (!w.allFinite()) return false;
    for (const auto& b : biases)
      if (!b.allFinite()) return false;
    return true;
  }
};

/// Fully connected network: rectifier hidden layers and an identity or tanh
/// output. Inputs and outputs are column-major batches, one sample per
/// column.
template <typename Scalar>
class Mlp {
 public:
  using MatrixT = Matrix<Scalar>;
  using VectorT = Vector<Scalar>;

  /// Activations of one forward pass, tagged with the parameter generation
  /// they were computed under.
  struct Cache {
    std::vector<MatrixT> activations;  // [0] is the input
    std::uint64_t generation = 0;
  };

  Mlp() = default;

  /// Uniform initialization in +-1/sqrt(fan_in).
  template <typename Rng>
  Mlp(std::vector<int> widths, OutputActivation output, Rng& rng)
      : widths_(std::move(widths)), output_(output) {
    if (widths_.size() < 2) throw ContractViolation("Mlp needs at least an input and an output width");
    for (int w : widths_)
      if (w <= 0) throw ContractViolation("Mlp layer widths must be positive");
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      const int fan_in = widths_[l];
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(fan_in));
      std::uniform_real_distribution<Scalar> init(-bound, bound);
      MatrixT w(widths_[l + 1], fan_in);
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = init(rng);
      VectorT b(widths_[l + 1]);
      for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = init(rng);
      weights_.push_back(std::move(w));
      biases_.push_back(std::move(b));
    }
  }

  /// Builds a network from explicit parameters.
  Mlp(std::vector<MatrixT> weights, std::vector<VectorT> biases, OutputActivation output)
      : output_(output), weights_(std::move(weights)), biases_(std::move(biases)) {
    if (weights_.empty() || weights_.size() != biases_.size())
      throw ContractViolation("Mlp: weights and biases must be non-empty and paired");
    widths_.push_back(static_cast<int>(weights_.front().cols()));
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      if (weights_[l].cols() != widths_.back() || biases_[l].size() != weights_[l].rows())
        throw ContractViolation("Mlp: inconsistent layer shapes");
      widths_.push_back(static_cast<int>(weights_[l].rows()));
    }
  }

  const std::vector<int>& widths() const { return widths_; }
  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  std::size_t layer_count() const { return weights_.size(); }
  OutputActivation output_activation() const { return output_; }

  const MatrixT& weight(std::size_t l) const { return weights_[l]; }
  const VectorT& bias(std::size_t l) const { return biases_[l]; }
  MatrixT& weight(std::size_t l) {
    ++generation_;
    return weights_[l];
  }
  VectorT& bias(std::size_t l) {
    ++generation_;
    return biases_[l];
  }
  std::uint64_t generation() const { return generation_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l)
      n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    return n;
  }

  MatrixT forward(const MatrixT& input) const {
    Cache scratch;
    return forward(input, scratch);
  }

  VectorT forward(const VectorT& input) const {
    return forward(MatrixT(input)).col(0);
  }

  MatrixT forward(const MatrixT& input, Cache& cache) const {
    if (input.rows() != input_dim())
      throw ContractViolation("Mlp::forward: expected input of dimension " +
                              std::to_string(input_dim()) + ", got " + std::to_string(input.rows()));
    cache.generation = generation_;
    cache.activations.resize(weights_.size() + 1);
    cache.activations[0] = input;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      MatrixT z = weights_[l] * cache.activations[l];
      z.colwise() += biases_[l];
      if (l + 1 < weights_.size()) {
        z = z.cwiseMax(Scalar(0));
      } else if (output_ == OutputActivation::Tanh) {
        z = z.array().tanh().matrix();
      }
      cache.activations[l + 1] = std::move(z);
    }
    return cache.activations.back();
  }

  /// Reverse-mode gradients of sum(output .* upstream) with respect to every
  /// parameter and the input. Throws ContractViolation if the cache predates
  /// a parameter change.
  MlpGradients<Scalar> backward(const Cache& cache, const MatrixT& upstream) const {
    if (cache.generation != generation_ || cache.activations.size() != weights_.size() + 1)
      throw ContractViolation("Mlp::backward: stale forward cache");
    const MatrixT& out = cache.activations.back();
    if (upstream.rows() != out.rows() || upstream.cols() != out.cols())
      throw ContractViolation("Mlp::backward: upstream gradient shape mismatch");

    MlpGradients<Scalar> g;
    g.weights.resize(weights_.size());
    g.biases.resize(weights_.size());

    MatrixT delta = upstream;
    if (output_ == OutputActivation::Tanh)
      delta.array() *= (Scalar(1) - out.array().square());

    for (std::size_t l = weights_.size(); l-- > 0;) {
      const MatrixT& x = cache.activations[l];
      g.weights[l].noalias() = delta * x.transpose();
      g.biases[l] = delta.rowwise().sum();
      MatrixT back = weights_[l].transpose() * delta;
      if (l > 0) back.array() *= (x.array() > Scalar(0)).template cast<Scalar>();
      delta = std::move(back);
    }
    g.input = std::move(delta);
    return g;
  }

 private:
  std::vector<int> widths_;
  OutputActivation output_ = OutputActivation::Identity;
  std::vector<MatrixT> weights_;
  std::vector<VectorT> biases_;
  std::uint64_t generation_ = 0;
};

/// target <- tau * source + (1 - tau) * target.
template <typename Scalar>
void soft_update(Mlp<Scalar>& target, const Mlp<Scalar>& source, Scalar tau) {
  if (target.widths() != source.widths())
    throw ContractViolation("soft_update: network shapes differ");
  if (!(tau >= Scalar(0) && tau <= Scalar(1)))
    throw ContractViolation("soft_update: tau must lie in [0, 1]");
  for (std::size_t l = 0; l < target.layer_count(); ++l) {
    target.weight(l) = tau * source.weight(l) + (Scalar(1) - tau) * target.weight(l);
    target.bias(l) = tau * source.bias(l) + (Scalar(1) - tau) * target.bias(l);
  }
}

}  // namespace skyslice::neuro
