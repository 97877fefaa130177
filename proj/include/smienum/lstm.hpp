#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smienum/encode.hpp"
#include "smienum/random.hpp"

namespace smienum {

struct Hyperparams {
  int num_lstm_layers = 1;
  int units = 64;
  double dropout_w = 0.19;
  double dropout_u = 0.0;
  int num_dense_hidden = 0;
  int dense_size = 16;
  double l1 = 0.005;
  double l2 = 0.01;
  double learning_rate = 0.005;
  int batch_size = 200;
  int epochs = 100;
  std::uint64_t seed = 0;

  // Throws Error(kInvalidArgument) when a field is out of range.
  void validate() const;

  // Tuned configurations for enumerated and canonical training data.
  static Hyperparams enumerated_preset();
  static Hyperparams canonical_preset();

  friend bool operator==(const Hyperparams &, const Hyperparams &) = default;
};

// Fixed sequence length token matrix: tokens[s][t] is the hot column of
// row t of sequence s.
struct EncodedSet {
  int steps = 0;
  int vocab_size = 0;
  std::vector<std::vector<int>> tokens;
  std::vector<double> targets;

  std::size_t size() const { return tokens.size(); }

  void add(const OneHotSequence &seq, double target);
  // encode() + add() for every string.
  static EncodedSet from_strings(const TokenVocabulary &vocab,
                                 std::span<const std::string> smiles,
                                 std::span<const double> targets);
};

// Gate rows are stacked input, forget, cell, output; each block is H rows.
struct LstmLayer {
  Eigen::MatrixXd w_input;      // 4H x input
  Eigen::MatrixXd w_recurrent;  // 4H x H
  Eigen::VectorXd bias;         // 4H
};

struct LstmParams {
  int input_size = 0;
  std::vector<LstmLayer> layers;
  Eigen::MatrixXd dense_w;  // D x H, empty without a hidden dense layer
  Eigen::VectorXd dense_b;  // D
  Eigen::VectorXd out_w;    // head input width
  Eigen::VectorXd out_b;    // 1

  struct TensorRef {
    std::string name;
    std::vector<std::int64_t> shape;
    Eigen::Map<Eigen::VectorXd> values;
  };

  // Every tensor in declaration order; gradients share this layout.
  std::vector<TensorRef> tensors();
  std::size_t parameter_count() const;

  // Same shapes, all zeros.
  LstmParams zeros_like() const;

  bool all_finite() const;
};

// Uniform Glorot init from hp.seed; biases zero except forget gate = 1.
LstmParams init_params(const Hyperparams &hp, int vocab_size);

// Inverted-dropout multipliers (0 or 1/(1-rate)), one draw per timestep.
// Layer 0's input is one-hot so only the hot entry's mask is kept.
struct DropoutMasks {
  // [t] -> 1 x B (layer 0) or H x B (deeper layers), per layer.
  std::vector<std::vector<Eigen::MatrixXd>> input;
  // [layer][t] -> H x B, applied to h_{t-1}.
  std::vector<std::vector<Eigen::MatrixXd>> recurrent;
};

DropoutMasks draw_masks(const Hyperparams &hp, int steps, int batch,
                        Rng &rng);

// Masks of all ones: train-mode forward equal to inference.
DropoutMasks unit_masks(const Hyperparams &hp, int steps, int batch);

struct ForwardCache {
  struct LayerCache {
    std::vector<Eigen::MatrixXd> input;      // masked input, deeper layers
    std::vector<Eigen::MatrixXd> h_masked;   // masked h_{t-1}, H x B
    std::vector<Eigen::MatrixXd> gates;      // activated gates, 4H x B
    std::vector<Eigen::MatrixXd> cell;       // c_t, H x B
    std::vector<Eigen::MatrixXd> cell_tanh;  // tanh(c_t)
    std::vector<Eigen::MatrixXd> hidden;     // h_t
  };
  std::vector<int> rows;  // indices into the EncodedSet
  DropoutMasks masks;
  std::vector<LayerCache> layers;
  Eigen::MatrixXd head_hidden;  // tanh(dense), D x B
  Eigen::VectorXd predictions;
};

// Runs the network on `rows` of `data`. With masks, dropout is applied and
// the cache (if given) holds everything backward() needs.
Eigen::VectorXd forward(const LstmParams &params, const Hyperparams &hp,
                        const EncodedSet &data, std::span<const int> rows,
                        const DropoutMasks *masks, ForwardCache *cache);

enum class Mode {
  kTrain,
  kInfer,
};

// Convenience wrapper: draws fresh masks from `rng` in train mode.
Eigen::VectorXd forward(const LstmParams &params, const Hyperparams &hp,
                        const EncodedSet &data, std::span<const int> rows,
                        Mode mode, Rng &rng, ForwardCache *cache = nullptr);

struct LossValue {
  double total;
  double mse;
};

// mse + l1 * |out_w|_1 + l2 * |out_w|_2^2.
LossValue loss(const Eigen::VectorXd &predictions,
               std::span<const double> targets, const LstmParams &params,
               const Hyperparams &hp);

// Exact gradients of loss() by backpropagation through time.
LstmParams backward(const LstmParams &params, const Hyperparams &hp,
                    const EncodedSet &data, const ForwardCache &cache);

// Inference with dropout disabled, processed in chunks.
std::vector<double> predict(const LstmParams &params, const Hyperparams &hp,
                            const EncodedSet &data);

struct TraceEntry {
  int epoch;
  double train_mse;
  double train_loss;
  double test_mse;
};

struct TrainingTrace {
  std::vector<TraceEntry> epochs;
  int best_epoch = -1;
  long updates = 0;
};

struct TrainResult {
  LstmParams params;
  TrainingTrace trace;
};

using EpochCallback = std::function<void(const TraceEntry &)>;

// Adam (beta1 0.9, beta2 0.999, eps 1e-8), seeded shuffles and masks.
// Returns the parameters with the lowest test MSE (train loss when no test
// set is given).
TrainResult train(LstmParams params, const Hyperparams &hp,
                  const EncodedSet &train_set, const EncodedSet *test_set,
                  const EpochCallback &on_epoch = {});

double mean_squared_error(std::span<const double> targets,
                          std::span<const double> predictions);

}  // namespace smienum
