#pragma once

#include "skyslice/neuro/mlp.hpp"

#include <cmath>
#include <vector>

namespace skyslice::neuro {

/// Adaptive-moment optimizer with bias correction, one instance per network.
template <typename Scalar>
class Adam {
 public:
  struct Options {
    Scalar beta1 = Scalar(0.9);
    Scalar beta2 = Scalar(0.999);
    Scalar epsilon = Scalar(1e-8);
  };

  Adam() = default;
  explicit Adam(const Mlp<Scalar>& net, Options options = {}) : options_(options) {
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      m_w_.push_back(Matrix<Scalar>::Zero(net.weight(l).rows(), net.weight(l).cols()));
      v_w_.push_back(m_w_.back());
      m_b_.push_back(Vector<Scalar>::Zero(net.bias(l).size()));
      v_b_.push_back(m_b_.back());
    }
  }

  /// Applies one descent step. Non-finite gradients leave both the network
  /// and the moments untouched and are counted in skipped().
  bool step(Mlp<Scalar>& net, const MlpGradients<Scalar>& grads, Scalar learning_rate) {
    if (grads.weights.size() != m_w_.size())
      throw ContractViolation("Adam::step: gradient layout does not match the network");
    if (!grads.all_finite()) {
      ++skipped_;
      return false;
    }
    ++t_;
    const Scalar c1 = Scalar(1) - std::pow(options_.beta1, static_cast<Scalar>(t_));
    const Scalar c2 = Scalar(1) - std::pow(options_.beta2, static_cast<Scalar>(t_));
    const Scalar step_size = learning_rate * std::sqrt(c2) / c1;
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
      m = options_.beta1 * m + (Scalar(1) - options_.beta1) * g;
      v = options_.beta2 * v + (Scalar(1) - options_.beta2) * g.cwiseProduct(g);
      param.array() -= step_size * m.array() / (v.array().sqrt() + options_.epsilon * std::sqrt(c2));
    };
    for (std::size_t l = 0; l < m_w_.size(); ++l) {
      update(net.weight(l), m_w_[l], v_w_[l], grads.weights[l]);
      update(net.bias(l), m_b_[l], v_b_[l], grads.biases[l]);
    }
    return true;
  }

  long skipped() const { return skipped_; }
  long steps() const { return t_; }

 private:
  Options options_;
  std::vector<Matrix<Scalar>> m_w_, v_w_;
  std::vector<Vector<Scalar>> m_b_, v_b_;
  long t_ = 0;
  long skipped_ = 0;
};

}  // namespace skyslice::neuro
