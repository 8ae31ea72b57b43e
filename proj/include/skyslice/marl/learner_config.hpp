#pragma once

#include <vector>

namespace skyslice::marl {

struct LearnerConfig {
  int episodes = 800;
  int steps = 300;

  // Actor-critic
  double critic_lr = 1e-5;
  double actor_lr = 2e-5;
  double tau = 0.01;
  double gamma = 0.95;
  int buffer_capacity = 15000;
  int batch_size = 64;
  int warmup_batches = 10;  // updates start once the buffer holds this many batches
  int update_every = 1;     // environment steps per gradient update
  std::vector<int> hidden = {64, 64};
  double noise_start = 0.3;
  double noise_end = 0.02;

  // Deep Q baseline
  double dqn_lr = 1e-4;
  std::vector<double> dqn_levels = {-1.0, -0.5, 0.0, 0.5, 1.0};
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 1.0;  // of all training steps

  // Traversal baseline
  std::vector<double> greedy_grid = {-1.0, 0.0, 1.0};
  double greedy_epsilon = 0.1;

  bool operator==(const LearnerConfig&) const = default;
};

/// Linear interpolation from `start` to `end` over `fraction` of training,
/// constant afterwards.
inline double linear_schedule(double start, double end, double progress, double fraction = 1.0) {
  if (fraction <= 0.0 || progress >= fraction) return end;
  return start + (end - start) * (progress / fraction);
}

}  // namespace skyslice::marl
