#include <doctest.h>

#include <cmath>
#include <numeric>

#include "smienum/error.hpp"
#include "smienum/lstm.hpp"

using namespace smienum;

namespace {

EncodedSet random_set(Rng &rng, int n, int steps, int vocab) {
  EncodedSet set;
  set.steps = steps;
  set.vocab_size = vocab;
  for (int i = 0; i < n; ++i) {
    std::vector<int> seq(steps);
    for (int &tok: seq) tok = static_cast<int>(rng.below(vocab));
    set.tokens.push_back(seq);
    set.targets.push_back(rng.normal());
  }
  return set;
}

std::vector<int> all_rows(const EncodedSet &set) {
  std::vector<int> rows(set.size());
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

Hyperparams tiny(int units = 2) {
  Hyperparams hp;
  hp.units = units;
  hp.dropout_w = 0.0;
  hp.dropout_u = 0.0;
  hp.l1 = 0.0;
  hp.l2 = 0.0;
  hp.seed = 3;
  return hp;
}

double total_loss(const LstmParams &p, const Hyperparams &hp,
                  const EncodedSet &data, const DropoutMasks *masks) {
  const auto rows = all_rows(data);
  const auto pred = forward(p, hp, data, rows, masks, nullptr);
  return loss(pred, data.targets, p, hp).total;
}

// Central differences over every scalar parameter; returns the largest
// relative error against backward().
double gradient_check(const Hyperparams &hp, const EncodedSet &data,
                      const DropoutMasks *masks) {
  LstmParams params = init_params(hp, data.vocab_size);
  params.out_b(0) = 0.1;
  for (auto &layer: params.layers) layer.bias.setConstant(0.05);
  const auto rows = all_rows(data);
  ForwardCache cache;
  forward(params, hp, data, rows, masks, &cache);
  LstmParams grad = backward(params, hp, data, cache);

  constexpr double kStep = 1e-5;
  double worst = 0.0;
  auto p_tensors = params.tensors();
  auto g_tensors = grad.tensors();
  for (std::size_t k = 0; k < p_tensors.size(); ++k) {
    auto &values = p_tensors[k].values;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double saved = values(i);
      values(i) = saved + kStep;
      const double plus = total_loss(params, hp, data, masks);
      values(i) = saved - kStep;
      const double minus = total_loss(params, hp, data, masks);
      values(i) = saved;
      const double numeric = (plus - minus) / (2.0 * kStep);
      const double analytic = g_tensors[k].values(i);
      const double scale =
          std::max({ std::abs(numeric), std::abs(analytic), 1e-8 });
      const double rel = std::abs(numeric - analytic) / scale;
      if (rel > 1e-4)
        MESSAGE(p_tensors[k].name << "[" << i << "] analytic " << analytic
                                  << " numeric " << numeric);
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("init shapes and determinism") {
  Hyperparams hp = tiny(64);
  const LstmParams a = init_params(hp, 35);
  const LstmParams b = init_params(hp, 35);
  REQUIRE(a.layers.size() == 1);
  CHECK(a.layers[0].w_input.size() == 4 * 2240);
  CHECK(a.layers[0].w_input.rows() == 4 * 64);
  CHECK(a.layers[0].w_recurrent.size() == 4 * 64 * 64);
  CHECK(a.layers[0].w_input == b.layers[0].w_input);
  CHECK(a.out_w == b.out_w);
  CHECK(a.layers[0].bias.segment(64, 64) == Eigen::VectorXd::Ones(64));
  CHECK(a.layers[0].bias.head(64).isZero());
  CHECK(a.layers[0].bias.tail(128).isZero());
  CHECK(a.out_b(0) == 0.0);

  const double limit = std::sqrt(6.0 / (35 + 64));
  CHECK(a.layers[0].w_input.cwiseAbs().maxCoeff() <= limit);

  hp.seed = 4;
  CHECK(init_params(hp, 35).layers[0].w_input != a.layers[0].w_input);
}

TEST_CASE("two layers and a dense head") {
  Hyperparams hp = tiny(8);
  hp.num_lstm_layers = 2;
  hp.num_dense_hidden = 1;
  hp.dense_size = 4;
  const LstmParams p = init_params(hp, 5);
  CHECK(p.layers[1].w_input.rows() == 32);
  CHECK(p.layers[1].w_input.cols() == 8);
  CHECK(p.dense_w.rows() == 4);
  CHECK(p.out_w.size() == 4);
  LstmParams copy = p;
  CHECK(copy.tensors().size() == 10);
  std::size_t total = 0;
  for (auto &t: copy.tensors()) total += t.values.size();
  CHECK(total == p.parameter_count());
}

TEST_CASE("hyperparameter validation and presets") {
  Hyperparams hp;
  CHECK_NOTHROW(hp.validate());
  hp.dropout_w = 1.0;
  CHECK_THROWS_AS(hp.validate(), Error);
  hp = {};
  hp.num_lstm_layers = 3;
  CHECK_THROWS_AS(hp.validate(), Error);

  const Hyperparams e = Hyperparams::enumerated_preset();
  CHECK(e.num_lstm_layers == 1);
  CHECK(e.units == 64);
  CHECK(e.dropout_w == 0.19);
  CHECK(e.dropout_u == 0.0);
  CHECK(e.num_dense_hidden == 0);
  CHECK(e.l1 == 0.005);
  CHECK(e.l2 == 0.01);
  CHECK(e.learning_rate == 0.005);
  CHECK(e.batch_size == 200);

  const Hyperparams c = Hyperparams::canonical_preset();
  CHECK(c.units == 128);
  CHECK(c.dropout_w == 0.0);
  CHECK(c.l1 == 0.2);
  CHECK(c.l2 == 0.2);
  CHECK(c.learning_rate == 0.0001);
}

TEST_CASE("zero network predicts the output bias") {
  Rng rng(1);
  const EncodedSet data = random_set(rng, 7, 5, 4);
  const Hyperparams hp = tiny(3);
  LstmParams p = init_params(hp, 4).zeros_like();
  p.out_b(0) = 0.7;
  for (double y: predict(p, hp, data)) CHECK(y == 0.7);
}

TEST_CASE("dropout rates of zero make train mode equal inference") {
  Rng rng(2);
  const EncodedSet data = random_set(rng, 6, 4, 5);
  const Hyperparams hp = tiny(4);
  const LstmParams p = init_params(hp, 5);
  const auto rows = all_rows(data);
  Rng mask_rng(9);
  const auto train = forward(p, hp, data, rows, Mode::kTrain, mask_rng);
  const auto infer = forward(p, hp, data, rows, Mode::kInfer, mask_rng);
  CHECK(train == infer);
}

TEST_CASE("single step matches a hand calculation") {
  // V = 3, H = 2, one timestep, token 1.
  Hyperparams hp = tiny(2);
  LstmParams p = init_params(hp, 3);
  auto &layer = p.layers[0];
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 3; ++c) layer.w_input(r, c) = 0.1 * (r + 1) - 0.05 * c;
    layer.bias(r) = 0.02 * r - 0.07;
  }
  layer.w_recurrent.setConstant(0.3);  // irrelevant: h0 = 0
  p.out_w << 0.8, -1.3;
  p.out_b(0) = 0.25;

  EncodedSet data;
  data.steps = 1;
  data.vocab_size = 3;
  data.tokens = { { 1 } };
  data.targets = { 0.0 };

  double expected = 0.25;
  for (int j = 0; j < 2; ++j) {
    auto pre = [&](int gate) {
      const int r = gate * 2 + j;
      return (0.1 * (r + 1) - 0.05) + (0.02 * r - 0.07);
    };
    const double i = sigmoid(pre(0));
    const double g = std::tanh(pre(2));
    const double o = sigmoid(pre(3));
    const double c = i * g;  // f * c0 vanishes
    const double h = o * std::tanh(c);
    expected += (j == 0 ? 0.8 : -1.3) * h;
  }
  CHECK(std::abs(predict(p, hp, data)[0] - expected) < 1e-12);
}

TEST_CASE("loss") {
  Hyperparams hp = tiny(2);
  LstmParams p = init_params(hp, 3);
  Eigen::VectorXd pred(2);
  pred << 1.0, 2.0;
  const std::vector<double> same = { 1.0, 2.0 };
  CHECK(loss(pred, same, p, hp).total == 0.0);

  Eigen::VectorXd zero(1);
  zero << 0.0;
  const std::vector<double> two = { 2.0 };
  CHECK(loss(zero, two, p, hp).mse == 4.0);

  hp.l1 = 0.2;
  p.out_w << 0.5, -0.5;
  CHECK(loss(pred, same, p, hp).total == doctest::Approx(0.2).epsilon(1e-15));
  hp.l1 = 0.0;
  hp.l2 = 0.1;
  CHECK(loss(pred, same, p, hp).total == doctest::Approx(0.05).epsilon(1e-15));

  CHECK_THROWS_AS(loss(Eigen::VectorXd(), {}, p, hp), Error);
}

TEST_CASE("gradient check: 2 units, 3 steps, V = 4") {
  Rng rng(42);
  const EncodedSet data = random_set(rng, 5, 3, 4);
  Hyperparams hp = tiny(2);
  hp.l1 = 0.01;
  hp.l2 = 0.02;

  SUBCASE("no dropout") { CHECK(gradient_check(hp, data, nullptr) < 1e-4); }
  SUBCASE("fixed dropout masks") {
    hp.dropout_w = 0.3;
    hp.dropout_u = 0.4;
    Rng mask_rng(8);
    const DropoutMasks masks = draw_masks(hp, 3, 5, mask_rng);
    CHECK(gradient_check(hp, data, &masks) < 1e-4);
  }
}

TEST_CASE("gradient check: two layers with a dense hidden layer") {
  Rng rng(43);
  const EncodedSet data = random_set(rng, 4, 3, 4);
  Hyperparams hp = tiny(3);
  hp.num_lstm_layers = 2;
  hp.num_dense_hidden = 1;
  hp.dense_size = 2;
  hp.l1 = 0.01;
  hp.l2 = 0.02;
  hp.dropout_w = 0.2;
  hp.dropout_u = 0.3;
  Rng mask_rng(4);
  const DropoutMasks masks = draw_masks(hp, 3, 4, mask_rng);
  CHECK(gradient_check(hp, data, &masks) < 1e-4);
  CHECK(gradient_check(hp, data, nullptr) < 1e-4);
}

TEST_CASE("closed-form gradients") {
  Rng rng(5);
  EncodedSet data = random_set(rng, 6, 4, 3);
  const Hyperparams hp = tiny(3);
  const LstmParams p = init_params(hp, 3);
  const auto rows = all_rows(data);

  ForwardCache cache;
  const auto pred = forward(p, hp, data, rows, nullptr, &cache);
  const LstmParams g = backward(p, hp, data, cache);
  double expected = 0.0;
  for (int i = 0; i < 6; ++i) expected += 2.0 * (pred(i) - data.targets[i]);
  CHECK(g.out_b(0) == doctest::Approx(expected / 6).epsilon(1e-12));

  // Zero residual and zero penalties: every gradient vanishes.
  for (int i = 0; i < 6; ++i) data.targets[i] = pred(i);
  LstmParams z = backward(p, hp, data, cache);
  for (auto &t: z.tensors()) CHECK(t.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("backward rejects a mismatched cache") {
  Rng rng(6);
  const EncodedSet data = random_set(rng, 3, 2, 3);
  const Hyperparams hp = tiny(2);
  const LstmParams p = init_params(hp, 3);
  CHECK_THROWS_AS(backward(p, hp, data, ForwardCache {}), Error);
}

TEST_CASE("forward rejects a vocabulary mismatch") {
  Rng rng(6);
  const EncodedSet data = random_set(rng, 3, 2, 3);
  const Hyperparams hp = tiny(2);
  const LstmParams p = init_params(hp, 4);
  CHECK_THROWS_AS(predict(p, hp, data), Error);
}

TEST_CASE("inverted dropout preserves expected pre-activations") {
  Hyperparams hp = tiny(6);
  hp.dropout_w = 0.2;
  hp.dropout_u = 0.5;
  Rng rng(17);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Random(4, 6);
  const Eigen::VectorXd hidden = Eigen::VectorXd::Random(6);
  const Eigen::VectorXd reference = w * hidden;

  constexpr int kDraws = 20000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(4);
  double input_sum = 0.0;
  double input_sq = 0.0;
  for (int k = 0; k < kDraws; ++k) {
    const DropoutMasks m = draw_masks(hp, 1, 1, rng);
    const Eigen::VectorXd pre = w * hidden.cwiseProduct(m.recurrent[0][0].col(0));
    sum += pre;
    sum_sq += pre.cwiseAbs2();
    const double x = m.input[0][0](0, 0);
    input_sum += x;
    input_sq += x * x;
  }
  for (int i = 0; i < 4; ++i) {
    const double mean = sum(i) / kDraws;
    const double var = sum_sq(i) / kDraws - mean * mean;
    CHECK(std::abs(mean - reference(i)) < 3.0 * std::sqrt(var / kDraws));
  }
  const double mean = input_sum / kDraws;
  const double var = input_sq / kDraws - mean * mean;
  CHECK(std::abs(mean - 1.0) < 3.0 * std::sqrt(var / kDraws));
}

TEST_CASE("predict: batches agree with one-at-a-time") {
  Rng rng(7);
  const EncodedSet data = random_set(rng, 300, 6, 5);
  Hyperparams hp = tiny(5);
  hp.num_lstm_layers = 2;
  const LstmParams p = init_params(hp, 5);
  const auto batched = predict(p, hp, data);
  CHECK(predict(p, hp, data) == batched);
  for (int i = 0; i < 300; i += 37) {
    const std::vector<int> one = { i };
    const auto single = forward(p, hp, data, one, nullptr, nullptr);
    CHECK(std::abs(single(0) - batched[i]) < 1e-12);
  }
}

TEST_CASE("update count per epoch keeps the last partial batch") {
  Rng rng(8);
  const EncodedSet data = random_set(rng, 602, 2, 3);
  Hyperparams hp = tiny(2);
  hp.epochs = 1;
  hp.batch_size = 200;
  const auto result = train(init_params(hp, 3), hp, data, nullptr);
  CHECK(result.trace.updates == 4);
  CHECK(result.trace.epochs.size() == 1);
}

TEST_CASE("overfit smoke test, determinism and checkpointing") {
  Rng rng(9);
  const EncodedSet data = random_set(rng, 20, 12, 6);
  Hyperparams hp = tiny(64);
  hp.learning_rate = 0.005;
  hp.batch_size = 20;
  hp.epochs = 2000;
  const LstmParams init = init_params(hp, 6);
  const double initial_mse =
      mean_squared_error(data.targets, predict(init, hp, data));

  std::vector<double> seen;
  const auto result = train(init, hp, data, &data,
                            [&](const TraceEntry &e) { seen.push_back(e.test_mse); });
  CHECK(result.trace.updates <= 2000);
  const double final_mse =
      mean_squared_error(data.targets, predict(result.params, hp, data));
  CHECK(final_mse < 0.01);
  CHECK(final_mse < initial_mse);
  CHECK(seen.size() == 2000);

  const double best = *std::min_element(seen.begin(), seen.end());
  CHECK(final_mse == best);
  CHECK(result.trace.epochs[result.trace.best_epoch - 1].test_mse == best);
}

TEST_CASE("training is deterministic with dropout") {
  Rng rng(10);
  const EncodedSet data = random_set(rng, 30, 5, 4);
  Hyperparams hp = tiny(8);
  hp.dropout_w = 0.2;
  hp.dropout_u = 0.2;
  hp.batch_size = 8;
  hp.epochs = 5;
  const auto a = train(init_params(hp, 4), hp, data, &data);
  const auto b = train(init_params(hp, 4), hp, data, &data);
  REQUIRE(a.trace.epochs.size() == b.trace.epochs.size());
  for (std::size_t i = 0; i < a.trace.epochs.size(); ++i) {
    CHECK(a.trace.epochs[i].train_loss == b.trace.epochs[i].train_loss);
    CHECK(a.trace.epochs[i].test_mse == b.trace.epochs[i].test_mse);
  }
  CHECK(a.params.out_w == b.params.out_w);
}
