#pragma once

#include "skyslice/neuro/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace gradcheck {

using Net = skyslice::neuro::Mlp<double>;

struct Report {
  double worst = 0.0;  // largest relative error seen
  long checked = 0;
};

inline double relative(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1e-6, std::abs(analytic), std::abs(numeric)});
}

/// Compares backward() against central differences of sum(forward(x) .* u)
/// for every weight, bias and input entry.
inline Report check(Net net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& u, double h = 1e-5) {
  auto loss = [&](const Net& n, const Eigen::MatrixXd& in) { return n.forward(in).cwiseProduct(u).sum(); };
  Net::Cache cache;
  net.forward(x, cache);
  const auto g = net.backward(cache, u);
  Report r;
  auto probe = [&](double& slot, double analytic) {
    const double keep = slot;
    slot = keep + h;
    const double up = loss(net, x);
    slot = keep - h;
    const double down = loss(net, x);
    slot = keep;
    r.worst = std::max(r.worst, relative(analytic, (up - down) / (2.0 * h)));
    ++r.checked;
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (Eigen::Index k = 0; k < net.weight(l).size(); ++k) probe(net.weight(l).data()[k], g.weights[l].data()[k]);
    for (Eigen::Index k = 0; k < net.bias(l).size(); ++k) probe(net.bias(l).data()[k], g.biases[l].data()[k]);
  }
  Eigen::MatrixXd xin = x;
  for (Eigen::Index k = 0; k < xin.size(); ++k) {
    const double keep = xin.data()[k];
    xin.data()[k] = keep + h;
    const double up = loss(net, xin);
    xin.data()[k] = keep - h;
    const double down = loss(net, xin);
    xin.data()[k] = keep;
    r.worst = std::max(r.worst, relative(g.input.data()[k], (up - down) / (2.0 * h)));
    ++r.checked;
  }
  return r;
}

/// Random network with `hidden` layers of `width` units between the given
/// input and output sizes.
inline Net random_net(int in, int hidden, int width, int out, skyslice::neuro::OutputActivation act,
                      std::mt19937_64& rng) {
  std::vector<int> widths{in};
  for (int k = 0; k < hidden; ++k) widths.push_back(width);
  widths.push_back(out);
  return Net(widths, act, rng);
}

}  // namespace gradcheck
