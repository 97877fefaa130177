#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "smienum/lstm.hpp"

namespace smienum {

// Random-search ranges.
struct SearchSpace {
  static constexpr int kLayers[] = { 1, 2 };
  static constexpr int kUnits[] = { 32, 64, 128, 256 };
  static constexpr double kDropoutWMax = 0.2;
  static constexpr double kDropoutUMax = 0.5;
  static constexpr int kDenseLayers[] = { 0, 1 };
  static constexpr int kDenseSizes[] = { 4, 8, 16, 32, 64, 128 };
  static constexpr double kL1Max = 0.2;
  static constexpr double kL2Max = 0.2;
  static constexpr double kLearningRateMin = 0.0001;
  static constexpr double kLearningRateMax = 0.05;
};

// Draws the searched fields; batch_size, epochs and seed come from `base`.
// The learning rate is drawn log-uniformly.
Hyperparams sample_hyperparams(Rng &rng, const Hyperparams &base);

struct TrialResult {
  int trial;
  Hyperparams hp;
  double best_test_mse;
  int best_epoch;
};

struct SearchResult {
  std::vector<TrialResult> trials;
  std::size_t best = 0;  // index into trials
};

using TrialCallback = std::function<void(const TrialResult &)>;

// Trial i samples with Rng(seed + i) and trains with hp.seed = seed + i, so
// trials are independent of each other and of execution order.
SearchResult random_search(const EncodedSet &train_set,
                           const EncodedSet &test_set, int trials,
                           std::uint64_t seed, const Hyperparams &base,
                           const TrialCallback &on_trial = {});

}  // namespace smienum
