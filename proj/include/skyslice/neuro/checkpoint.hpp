#pragma once

#include "skyslice/neuro/mlp.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace skyslice::neuro {

// Flat text checkpoint:
//
//   skyslice-mlp 1
//   output tanh|identity
//   widths <n> w0 w1 ...
//   then per layer: "weight <rows> <cols>" followed by row-major values and
//   "bias <n>" followed by values, all as hexadecimal floats so that a
//   save/load cycle is exact.

inline constexpr int kCheckpointVersion = 1;

template <typename Scalar>
void save(std::ostream& os, const Mlp<Scalar>& net) {
  os << "skyslice-mlp " << kCheckpointVersion << '\n';
  os << "output " << to_string(net.output_activation()) << '\n';
  os << "widths " << net.widths().size();
  for (int w : net.widths()) os << ' ' << w;
  os << '\n' << std::hexfloat;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto& w = net.weight(l);
    os << "weight " << std::dec << w.rows() << ' ' << w.cols() << std::hexfloat << '\n';
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) os << (c ? " " : "") << static_cast<double>(w(r, c));
      os << '\n';
    }
    const auto& b = net.bias(l);
    os << "bias " << std::dec << b.size() << std::hexfloat << '\n';
    for (Eigen::Index r = 0; r < b.size(); ++r) os << (r ? " " : "") << static_cast<double>(b(r));
    os << '\n';
  }
  os << std::defaultfloat;
}

namespace detail {

inline void expect(std::istream& is, const std::string& word) {
  std::string got;
  if (!(is >> got) || got != word)
    throw ConfigError("checkpoint: expected '" + word + "', found '" + got + "'");
}

inline double read_hex(std::istream& is) {
  std::string token;
  if (!(is >> token)) throw ConfigError("checkpoint: truncated parameter block");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) throw ConfigError("checkpoint: bad number '" + token + "'");
  return v;
}

}  // namespace detail

template <typename Scalar>
Mlp<Scalar> load(std::istream& is) {
  detail::expect(is, "skyslice-mlp");
  int version = 0;
  if (!(is >> version) || version != kCheckpointVersion)
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  detail::expect(is, "output");
  std::string act;
  is >> act;
  OutputActivation output;
  if (act == "tanh") output = OutputActivation::Tanh;
  else if (act == "identity") output = OutputActivation::Identity;
  else throw ConfigError("checkpoint: unknown output activation '" + act + "'");
  detail::expect(is, "widths");
  std::size_t n = 0;
  is >> n;
  std::vector<int> widths(n);
  for (int& w : widths) is >> w;
  if (!is || n < 2) throw ConfigError("checkpoint: bad widths line");

  std::vector<Matrix<Scalar>> weights;
  std::vector<Vector<Scalar>> biases;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    detail::expect(is, "weight");
    Eigen::Index rows = 0, cols = 0;
    is >> rows >> cols;
    if (rows != widths[l + 1] || cols != widths[l]) throw ConfigError("checkpoint: weight shape mismatch");
    Matrix<Scalar> w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = static_cast<Scalar>(detail::read_hex(is));
    detail::expect(is, "bias");
    Eigen::Index len = 0;
    is >> len;
    if (len != rows) throw ConfigError("checkpoint: bias length mismatch");
    Vector<Scalar> b(len);
    for (Eigen::Index r = 0; r < len; ++r) b(r) = static_cast<Scalar>(detail::read_hex(is));
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  return Mlp<Scalar>(std::move(weights), std::move(biases), output);
}

template <typename Scalar>
void save_file(const std::filesystem::path& path, const Mlp<Scalar>& net) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  save(os, net);
}

template <typename Scalar>
Mlp<Scalar> load_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read checkpoint " + path.string());
  return load<Scalar>(is);
}

}  // namespace skyslice::neuro
