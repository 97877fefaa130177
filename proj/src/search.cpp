#include "smienum/search.hpp"

#include <cmath>
#include <iterator>

#include "smienum/error.hpp"

namespace smienum {

namespace {

template <class T, std::size_t N>
T pick(Rng &rng, const T (&options)[N]) {
  return options[rng.below(N)];
}

}  // namespace

Hyperparams sample_hyperparams(Rng &rng, const Hyperparams &base) {
  Hyperparams hp = base;
  hp.num_lstm_layers = pick(rng, SearchSpace::kLayers);
  hp.units = pick(rng, SearchSpace::kUnits);
  hp.dropout_w = rng.uniform(0.0, SearchSpace::kDropoutWMax);
  hp.dropout_u = rng.uniform(0.0, SearchSpace::kDropoutUMax);
  hp.num_dense_hidden = pick(rng, SearchSpace::kDenseLayers);
  hp.dense_size = pick(rng, SearchSpace::kDenseSizes);
  hp.l1 = rng.uniform(0.0, SearchSpace::kL1Max);
  hp.l2 = rng.uniform(0.0, SearchSpace::kL2Max);
  hp.learning_rate =
      std::exp(rng.uniform(std::log(SearchSpace::kLearningRateMin),
                           std::log(SearchSpace::kLearningRateMax)));
  return hp;
}

SearchResult random_search(const EncodedSet &train_set,
                           const EncodedSet &test_set, int trials,
                           std::uint64_t seed, const Hyperparams &base,
                           const TrialCallback &on_trial) {
  if (trials < 1)
    throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  if (test_set.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "search needs a test set");
  SearchResult result;
  for (int i = 0; i < trials; ++i) {
    Rng rng(seed + static_cast<std::uint64_t>(i));
    Hyperparams hp = sample_hyperparams(rng, base);
    hp.seed = seed + static_cast<std::uint64_t>(i);
    const TrainResult trained =
        train(init_params(hp, train_set.vocab_size), hp, train_set, &test_set);
    const TraceEntry &best = trained.trace.epochs[trained.trace.best_epoch - 1];
    result.trials.push_back({ i, hp, best.test_mse, best.epoch });
    if (result.trials[i].best_test_mse < result.trials[result.best].best_test_mse)
      result.best = static_cast<std::size_t>(i);
    if (on_trial) on_trial(result.trials.back());
  }
  return result;
}

}  // namespace smienum
