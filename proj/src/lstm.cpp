#include "smienum/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smienum/error.hpp"

namespace smienum {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::uint64_t kTrainStream = 0x9e3779b97f4a7c15ULL;
constexpr int kPredictChunk = 256;

MatrixXd sigmoid(const MatrixXd &x) {
  return (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

void fill_uniform(Eigen::Ref<MatrixXd> m, double limit, Rng &rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform(-limit, limit);
}

int head_width(const Hyperparams &hp) {
  return hp.num_dense_hidden == 1 ? hp.dense_size : hp.units;
}

void check_shapes(const LstmParams &params, const Hyperparams &hp,
                  const EncodedSet &data) {
  if (params.input_size != data.vocab_size)
    throw Error(ErrorCode::kVocabMismatch,
                "model expects vocabulary size "
                    + std::to_string(params.input_size) + ", data has "
                    + std::to_string(data.vocab_size));
  if (static_cast<int>(params.layers.size()) != hp.num_lstm_layers
      || params.layers.front().w_recurrent.cols() != hp.units
      || params.out_w.size() != head_width(hp))
    throw Error(ErrorCode::kInvalidArgument,
                "parameters do not match hyperparameters");
}

}  // namespace

void Hyperparams::validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok)
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("hyperparameter out of range: ") + what);
  };
  require(num_lstm_layers == 1 || num_lstm_layers == 2, "num_lstm_layers");
  require(units > 0, "units");
  require(dropout_w >= 0.0 && dropout_w < 1.0, "dropout_w");
  require(dropout_u >= 0.0 && dropout_u < 1.0, "dropout_u");
  require(num_dense_hidden == 0 || num_dense_hidden == 1, "num_dense_hidden");
  require(dense_size > 0, "dense_size");
  require(l1 >= 0.0, "l1");
  require(l2 >= 0.0, "l2");
  require(learning_rate > 0.0, "learning_rate");
  require(batch_size > 0, "batch_size");
  require(epochs > 0, "epochs");
}

Hyperparams Hyperparams::enumerated_preset() {
  Hyperparams hp;
  hp.num_lstm_layers = 1;
  hp.units = 64;
  hp.dropout_w = 0.19;
  hp.dropout_u = 0.0;
  hp.num_dense_hidden = 0;
  hp.l1 = 0.005;
  hp.l2 = 0.01;
  hp.learning_rate = 0.005;
  return hp;
}

Hyperparams Hyperparams::canonical_preset() {
  Hyperparams hp;
  hp.num_lstm_layers = 1;
  hp.units = 128;
  hp.dropout_w = 0.0;
  hp.dropout_u = 0.0;
  hp.num_dense_hidden = 0;
  hp.l1 = 0.2;
  hp.l2 = 0.2;
  hp.learning_rate = 0.0001;
  return hp;
}

void EncodedSet::add(const OneHotSequence &seq, double target) {
  if (tokens.empty() && steps == 0) {
    steps = seq.rows;
    vocab_size = seq.cols;
  }
  if (seq.rows != steps || seq.cols != vocab_size)
    throw Error(ErrorCode::kInvalidArgument,
                "sequence shape differs from the rest of the set");
  tokens.push_back(seq.hot_indices());
  targets.push_back(target);
}

EncodedSet EncodedSet::from_strings(const TokenVocabulary &vocab,
                                    std::span<const std::string> smiles,
                                    std::span<const double> targets) {
  if (smiles.size() != targets.size())
    throw Error(ErrorCode::kInvalidArgument,
                "smiles and targets differ in length");
  EncodedSet set;
  set.steps = vocab.max_len();
  set.vocab_size = vocab.size();
  set.tokens.reserve(smiles.size());
  for (std::size_t i = 0; i < smiles.size(); ++i)
    set.add(encode(vocab, smiles[i]), targets[i]);
  return set;
}

std::vector<LstmParams::TensorRef> LstmParams::tensors() {
  std::vector<TensorRef> out;
  auto add = [&](std::string name, auto &m, std::vector<std::int64_t> shape) {
    out.push_back({ std::move(name), std::move(shape),
                    Eigen::Map<VectorXd>(m.data(), m.size()) });
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "lstm" + std::to_string(l + 1) + ".";
    LstmLayer &layer = layers[l];
    add(prefix + "w_input", layer.w_input,
        { layer.w_input.rows(), layer.w_input.cols() });
    add(prefix + "w_recurrent", layer.w_recurrent,
        { layer.w_recurrent.rows(), layer.w_recurrent.cols() });
    add(prefix + "bias", layer.bias, { layer.bias.size() });
  }
  if (dense_w.size() > 0) {
    add("dense.w", dense_w, { dense_w.rows(), dense_w.cols() });
    add("dense.b", dense_b, { dense_b.size() });
  }
  add("out.w", out_w, { out_w.size() });
  add("out.b", out_b, { out_b.size() });
  return out;
}

std::size_t LstmParams::parameter_count() const {
  std::size_t n = dense_w.size() + dense_b.size() + out_w.size() + out_b.size();
  for (const LstmLayer &l: layers)
    n += l.w_input.size() + l.w_recurrent.size() + l.bias.size();
  return n;
}

LstmParams LstmParams::zeros_like() const {
  LstmParams z;
  z.input_size = input_size;
  for (const LstmLayer &l: layers) {
    z.layers.push_back({ MatrixXd::Zero(l.w_input.rows(), l.w_input.cols()),
                         MatrixXd::Zero(l.w_recurrent.rows(),
                                        l.w_recurrent.cols()),
                         VectorXd::Zero(l.bias.size()) });
  }
  z.dense_w = MatrixXd::Zero(dense_w.rows(), dense_w.cols());
  z.dense_b = VectorXd::Zero(dense_b.size());
  z.out_w = VectorXd::Zero(out_w.size());
  z.out_b = VectorXd::Zero(out_b.size());
  return z;
}

bool LstmParams::all_finite() const {
  for (const LstmLayer &l: layers) {
    if (!l.w_input.allFinite() || !l.w_recurrent.allFinite()
        || !l.bias.allFinite())
      return false;
  }
  return dense_w.allFinite() && dense_b.allFinite() && out_w.allFinite()
         && out_b.allFinite();
}

LstmParams init_params(const Hyperparams &hp, int vocab_size) {
  hp.validate();
  if (vocab_size <= 0)
    throw Error(ErrorCode::kInvalidArgument, "vocabulary size must be positive");
  Rng rng(hp.seed);
  const int h = hp.units;
  LstmParams p;
  p.input_size = vocab_size;
  for (int l = 0; l < hp.num_lstm_layers; ++l) {
    const int in = l == 0 ? vocab_size : h;
    LstmLayer layer { MatrixXd(4 * h, in), MatrixXd(4 * h, h),
                      VectorXd::Zero(4 * h) };
    fill_uniform(layer.w_input, std::sqrt(6.0 / (in + h)), rng);
    fill_uniform(layer.w_recurrent, std::sqrt(6.0 / (h + h)), rng);
    layer.bias.segment(h, h).setOnes();
    p.layers.push_back(std::move(layer));
  }
  if (hp.num_dense_hidden == 1) {
    p.dense_w.resize(hp.dense_size, h);
    fill_uniform(p.dense_w, std::sqrt(6.0 / (h + hp.dense_size)), rng);
    p.dense_b = VectorXd::Zero(hp.dense_size);
  }
  const int width = head_width(hp);
  p.out_w.resize(width);
  fill_uniform(p.out_w, std::sqrt(6.0 / (width + 1)), rng);
  p.out_b = VectorXd::Zero(1);
  return p;
}

DropoutMasks draw_masks(const Hyperparams &hp, int steps, int batch,
                        Rng &rng) {
  const int h = hp.units;
  auto draw = [&](int rows, double rate) {
    MatrixXd m(rows, batch);
    const double keep = 1.0 / (1.0 - rate);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = rate > 0.0 && rng.bernoulli(rate) ? 0.0 : keep;
    return m;
  };
  DropoutMasks masks;
  masks.input.resize(hp.num_lstm_layers);
  masks.recurrent.resize(hp.num_lstm_layers);
  for (int l = 0; l < hp.num_lstm_layers; ++l) {
    for (int t = 0; t < steps; ++t) {
      masks.input[l].push_back(draw(l == 0 ? 1 : h, hp.dropout_w));
      masks.recurrent[l].push_back(draw(h, hp.dropout_u));
    }
  }
  return masks;
}

DropoutMasks unit_masks(const Hyperparams &hp, int steps, int batch) {
  DropoutMasks masks;
  masks.input.resize(hp.num_lstm_layers);
  masks.recurrent.resize(hp.num_lstm_layers);
  for (int l = 0; l < hp.num_lstm_layers; ++l) {
    for (int t = 0; t < steps; ++t) {
      masks.input[l].push_back(MatrixXd::Ones(l == 0 ? 1 : hp.units, batch));
      masks.recurrent[l].push_back(MatrixXd::Ones(hp.units, batch));
    }
  }
  return masks;
}

Eigen::VectorXd forward(const LstmParams &params, const Hyperparams &hp,
                        const EncodedSet &data, std::span<const int> rows,
                        const DropoutMasks *masks, ForwardCache *cache) {
  check_shapes(params, hp, data);
  const int batch = static_cast<int>(rows.size());
  const int steps = data.steps;
  const int h = hp.units;
  if (batch == 0) return VectorXd();

  if (cache) {
    cache->rows.assign(rows.begin(), rows.end());
    cache->masks = masks ? *masks : DropoutMasks {};
    cache->layers.assign(params.layers.size(), {});
  }

  std::vector<MatrixXd> below;  // hidden sequence of the previous layer
  MatrixXd hidden;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const LstmLayer &layer = params.layers[l];
    MatrixXd cell = MatrixXd::Zero(h, batch);
    hidden = MatrixXd::Zero(h, batch);
    std::vector<MatrixXd> sequence;
    sequence.reserve(steps);
    MatrixXd z(4 * h, batch);
    for (int t = 0; t < steps; ++t) {
      if (l == 0) {
        for (int b = 0; b < batch; ++b) {
          const int token = data.tokens[rows[b]][t];
          const double scale = masks ? (*masks).input[0][t](0, b) : 1.0;
          z.col(b) = layer.w_input.col(token) * scale;
        }
      } else {
        MatrixXd x = masks ? below[t].cwiseProduct((*masks).input[l][t])
                           : below[t];
        z.noalias() = layer.w_input * x;
        if (cache) cache->layers[l].input.push_back(std::move(x));
      }
      MatrixXd h_masked =
          masks ? hidden.cwiseProduct((*masks).recurrent[l][t]) : hidden;
      z.noalias() += layer.w_recurrent * h_masked;
      z.colwise() += layer.bias;

      MatrixXd gates(4 * h, batch);
      gates.topRows(2 * h) = sigmoid(z.topRows(2 * h));
      gates.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
      gates.bottomRows(h) = sigmoid(z.bottomRows(h));

      cell = (gates.middleRows(h, h).array() * cell.array()
              + gates.topRows(h).array() * gates.middleRows(2 * h, h).array())
                 .matrix();
      MatrixXd cell_tanh = cell.array().tanh().matrix();
      hidden = (gates.bottomRows(h).array() * cell_tanh.array()).matrix();

      if (cache) {
        auto &lc = cache->layers[l];
        lc.h_masked.push_back(std::move(h_masked));
        lc.gates.push_back(std::move(gates));
        lc.cell.push_back(cell);
        lc.cell_tanh.push_back(std::move(cell_tanh));
        lc.hidden.push_back(hidden);
      }
      sequence.push_back(hidden);
    }
    below = std::move(sequence);
  }

  VectorXd predictions;
  if (params.dense_w.size() > 0) {
    MatrixXd a = ((params.dense_w * hidden).colwise() + params.dense_b)
                     .array()
                     .tanh()
                     .matrix();
    predictions = a.transpose() * params.out_w;
    if (cache) cache->head_hidden = std::move(a);
  } else {
    predictions = hidden.transpose() * params.out_w;
  }
  predictions.array() += params.out_b(0);
  if (!predictions.allFinite())
    throw Error(ErrorCode::kNumeric, "non-finite activation in forward pass");
  if (cache) cache->predictions = predictions;
  return predictions;
}

Eigen::VectorXd forward(const LstmParams &params, const Hyperparams &hp,
                        const EncodedSet &data, std::span<const int> rows,
                        Mode mode, Rng &rng, ForwardCache *cache) {
  if (mode == Mode::kInfer)
    return forward(params, hp, data, rows, nullptr, cache);
  const DropoutMasks masks =
      draw_masks(hp, data.steps, static_cast<int>(rows.size()), rng);
  return forward(params, hp, data, rows, &masks, cache);
}

LossValue loss(const Eigen::VectorXd &predictions,
               std::span<const double> targets, const LstmParams &params,
               const Hyperparams &hp) {
  if (predictions.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "loss of an empty batch");
  if (static_cast<std::size_t>(predictions.size()) != targets.size())
    throw Error(ErrorCode::kInvalidArgument,
                "predictions and targets differ in length");
  double sse = 0.0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    const double r = predictions(i) - targets[i];
    sse += r * r;
  }
  const double mse = sse / static_cast<double>(predictions.size());
  const double penalty = hp.l1 * params.out_w.cwiseAbs().sum()
                         + hp.l2 * params.out_w.squaredNorm();
  return { mse + penalty, mse };
}

LstmParams backward(const LstmParams &params, const Hyperparams &hp,
                    const EncodedSet &data, const ForwardCache &cache) {
  const int batch = static_cast<int>(cache.rows.size());
  const int steps = data.steps;
  const int h = hp.units;
  if (batch == 0 || cache.predictions.size() != batch
      || cache.layers.size() != params.layers.size())
    throw Error(ErrorCode::kInvalidArgument,
                "cache does not belong to this model and batch");
  for (const auto &lc: cache.layers) {
    if (static_cast<int>(lc.gates.size()) != steps)
      throw Error(ErrorCode::kInvalidArgument,
                  "cache does not belong to this model and batch");
  }
  const bool masked = !cache.masks.recurrent.empty();

  LstmParams grad = params.zeros_like();
  VectorXd dpred(batch);
  for (int b = 0; b < batch; ++b)
    dpred(b) = 2.0 * (cache.predictions(b) - data.targets[cache.rows[b]])
               / batch;

  const MatrixXd &top = cache.layers.back().hidden.back();
  MatrixXd dtop;
  grad.out_b(0) = dpred.sum();
  if (params.dense_w.size() > 0) {
    const MatrixXd &a = cache.head_hidden;
    grad.out_w = a * dpred;
    MatrixXd dz = ((params.out_w * dpred.transpose()).array()
                   * (1.0 - a.array().square()))
                      .matrix();
    grad.dense_w = dz * top.transpose();
    grad.dense_b = dz.rowwise().sum();
    dtop = params.dense_w.transpose() * dz;
  } else {
    grad.out_w = top * dpred;
    dtop = params.out_w * dpred.transpose();
  }
  grad.out_w += hp.l1 * params.out_w.unaryExpr([](double w) {
    return static_cast<double>((w > 0.0) - (w < 0.0));
  });
  grad.out_w += 2.0 * hp.l2 * params.out_w;

  // Gradient flowing into each layer's hidden state at each step.
  std::vector<MatrixXd> dh_external(steps);
  dh_external[steps - 1] = dtop;

  for (int l = static_cast<int>(params.layers.size()) - 1; l >= 0; --l) {
    const LstmLayer &layer = params.layers[l];
    const auto &lc = cache.layers[l];
    LstmLayer &g = grad.layers[l];
    std::vector<MatrixXd> dh_below(l > 0 ? steps : 0);

    MatrixXd dh_next = MatrixXd::Zero(h, batch);
    MatrixXd dc_next = MatrixXd::Zero(h, batch);
    MatrixXd dz(4 * h, batch);
    for (int t = steps - 1; t >= 0; --t) {
      MatrixXd dh = dh_next;
      if (dh_external[t].size() > 0) dh += dh_external[t];

      const auto gates = lc.gates[t].array();
      const auto in = gates.topRows(h);
      const auto fg = gates.middleRows(h, h);
      const auto cand = gates.middleRows(2 * h, h);
      const auto out = gates.bottomRows(h);
      const auto tc = lc.cell_tanh[t].array();

      const Eigen::ArrayXXd dc =
          dc_next.array() + dh.array() * out * (1.0 - tc.square());
      dz.topRows(h) = (dc * cand * in * (1.0 - in)).matrix();
      if (t > 0)
        dz.middleRows(h, h) =
            (dc * lc.cell[t - 1].array() * fg * (1.0 - fg)).matrix();
      else
        dz.middleRows(h, h).setZero();
      dz.middleRows(2 * h, h) = (dc * in * (1.0 - cand.square())).matrix();
      dz.bottomRows(h) = (dh.array() * tc * out * (1.0 - out)).matrix();
      dc_next = (dc * fg).matrix();

      g.bias += dz.rowwise().sum();
      g.w_recurrent.noalias() += dz * lc.h_masked[t].transpose();
      dh_next.noalias() = layer.w_recurrent.transpose() * dz;
      if (masked) dh_next = dh_next.cwiseProduct(cache.masks.recurrent[l][t]);

      if (l == 0) {
        for (int b = 0; b < batch; ++b) {
          const int token = data.tokens[cache.rows[b]][t];
          const double scale = masked ? cache.masks.input[0][t](0, b) : 1.0;
          g.w_input.col(token) += dz.col(b) * scale;
        }
      } else {
        g.w_input.noalias() += dz * lc.input[t].transpose();
        MatrixXd dx = layer.w_input.transpose() * dz;
        if (masked) dx = dx.cwiseProduct(cache.masks.input[l][t]);
        dh_below[t] = std::move(dx);
      }
    }
    dh_external = std::move(dh_below);
  }
  return grad;
}

std::vector<double> predict(const LstmParams &params, const Hyperparams &hp,
                            const EncodedSet &data) {
  std::vector<double> out;
  out.reserve(data.size());
  std::vector<int> rows;
  for (std::size_t start = 0; start < data.size(); start += kPredictChunk) {
    const std::size_t end = std::min(data.size(), start + kPredictChunk);
    rows.resize(end - start);
    std::iota(rows.begin(), rows.end(), static_cast<int>(start));
    const VectorXd p = forward(params, hp, data, rows, nullptr, nullptr);
    out.insert(out.end(), p.data(), p.data() + p.size());
  }
  return out;
}

double mean_squared_error(std::span<const double> targets,
                          std::span<const double> predictions) {
  if (targets.empty() || targets.size() != predictions.size())
    throw Error(ErrorCode::kInvalidArgument,
                "mean squared error needs equal non-empty inputs");
  double sse = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = targets[i] - predictions[i];
    sse += r * r;
  }
  return sse / static_cast<double>(targets.size());
}

TrainResult train(LstmParams params, const Hyperparams &hp,
                  const EncodedSet &train_set, const EncodedSet *test_set,
                  const EpochCallback &on_epoch) {
  hp.validate();
  if (train_set.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "empty training set");
  check_shapes(params, hp, train_set);
  if (test_set && test_set->size() > 0) {
    check_shapes(params, hp, *test_set);
    if (test_set->steps != train_set.steps)
      throw Error(ErrorCode::kVocabMismatch,
                  "train and test sequence lengths differ");
  } else {
    test_set = nullptr;
  }

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;

  Rng rng(hp.seed ^ kTrainStream);
  LstmParams m = params.zeros_like();
  LstmParams v = params.zeros_like();
  auto p_tensors = params.tensors();
  auto m_tensors = m.tensors();
  auto v_tensors = v.tensors();

  TrainResult result { params, {} };
  double best = std::numeric_limits<double>::infinity();
  long step = 0;

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> batch_targets;
  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    rng.shuffle(order);
    double mse_sum = 0.0;
    double loss_sum = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += hp.batch_size, ++batch_index) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(hp.batch_size));
      const std::span<const int> rows(order.data() + start, end - start);
      batch_targets.clear();
      for (int r: rows) batch_targets.push_back(train_set.targets[r]);

      ForwardCache cache;
      const DropoutMasks masks = draw_masks(
          hp, train_set.steps, static_cast<int>(rows.size()), rng);
      VectorXd pred;
      try {
        pred = forward(params, hp, train_set, rows, &masks, &cache);
      } catch (const Error &e) {
        throw Error(ErrorCode::kNumeric,
                    std::string(e.what()) + " (epoch " + std::to_string(epoch)
                        + ", batch " + std::to_string(batch_index) + ")");
      }
      const LossValue lv = loss(pred, batch_targets, params, hp);
      if (!std::isfinite(lv.total))
        throw Error(ErrorCode::kNumeric,
                    "non-finite loss at epoch " + std::to_string(epoch)
                        + ", batch " + std::to_string(batch_index));
      mse_sum += lv.mse * static_cast<double>(rows.size());
      loss_sum += lv.total * static_cast<double>(rows.size());

      LstmParams grad = backward(params, hp, train_set, cache);
      auto g_tensors = grad.tensors();
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t k = 0; k < p_tensors.size(); ++k) {
        auto &p = p_tensors[k].values;
        auto &mk = m_tensors[k].values;
        auto &vk = v_tensors[k].values;
        const auto &gk = g_tensors[k].values;
        mk = kBeta1 * mk + (1.0 - kBeta1) * gk;
        vk = kBeta2 * vk + (1.0 - kBeta2) * gk.cwiseAbs2();
        p.array() -= hp.learning_rate * (mk.array() / c1)
                     / ((vk.array() / c2).sqrt() + kEps);
      }
      if (!params.all_finite())
        throw Error(ErrorCode::kNumeric,
                    "non-finite parameter after update at epoch "
                        + std::to_string(epoch) + ", batch "
                        + std::to_string(batch_index));
    }

    TraceEntry entry { epoch, mse_sum / order.size(), loss_sum / order.size(),
                       std::numeric_limits<double>::quiet_NaN() };
    double score = entry.train_loss;
    if (test_set) {
      entry.test_mse =
          mean_squared_error(test_set->targets, predict(params, hp, *test_set));
      score = entry.test_mse;
    }
    result.trace.epochs.push_back(entry);
    if (score < best) {
      best = score;
      result.params = params;
      result.trace.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(entry);
  }
  result.trace.updates = step;
  return result;
}

}  // namespace smienum
