#pragma once

#include "skyslice/errors.hpp"
#include "skyslice/neuro/mlp.hpp"

#include <optional>
#include <random>
#include <vector>

namespace skyslice::neuro {

/// One environment transition: global state, joint action, per-agent
/// rewards, next global state.
template <typename Scalar>
struct Transition {
  Vector<Scalar> state;
  Vector<Scalar> action;
  Vector<Scalar> rewards;
  Vector<Scalar> next_state;
};

/// Fixed-capacity ring; the oldest record is overwritten once full.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ContractViolation("ReplayBuffer: capacity must be positive");
    items_.reserve(capacity_);
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[cursor_] = std::move(item);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool ready(std::size_t min_size) const { return items_.size() >= min_size; }

  /// Record `k` in insertion order, 0 being the oldest retained.
  const T& at(std::size_t k) const {
    if (items_.size() < capacity_) return items_.at(k);
    return items_.at((cursor_ + k) % capacity_);
  }

  /// Storage slots of `batch` uniform draws with replacement, or nothing
  /// while fewer than `batch` records are held.
  template <typename Rng>
  std::optional<std::vector<std::size_t>> sample_indices(Rng& rng, std::size_t batch) const {
    if (batch == 0 || items_.size() < batch) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx) i = pick(rng);
    return idx;
  }

  template <typename Rng>
  std::optional<std::vector<const T*>> sample(Rng& rng, std::size_t batch) const {
    auto idx = sample_indices(rng, batch);
    if (!idx) return std::nullopt;
    std::vector<const T*> out;
    out.reserve(batch);
    for (std::size_t i : *idx) out.push_back(&items_[i]);
    return out;
  }

  const T& slot(std::size_t i) const { return items_.at(i); }

 private:
  std::size_t capacity_;
  std::vector<T> items_;
  std::size_t cursor_ = 0;
};

}  // namespace skyslice::neuro
