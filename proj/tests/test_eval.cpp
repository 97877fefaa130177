#include <doctest.h>

#include <cmath>

#include "smienum/checkpoint.hpp"
#include "smienum/error.hpp"
#include "smienum/eval.hpp"
#include "smienum/smiles.hpp"

using namespace smienum;

namespace {

ErrorCode code_of(auto &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

TokenVocabulary vocab_for(std::vector<std::string> corpus) {
  return TokenVocabulary::build(corpus);
}

Model random_model(const TokenVocabulary &vocab, std::uint64_t seed = 4) {
  Hyperparams hp;
  hp.units = 8;
  hp.seed = seed;
  return { hp, init_params(hp, vocab.size()), vocab.fingerprint(), "adam" };
}

Model constant_model(const TokenVocabulary &vocab, double b) {
  Model m = random_model(vocab);
  m.params = m.params.zeros_like();
  m.params.out_b(0) = b;
  return m;
}

}  // namespace

TEST_CASE("r2") {
  const std::vector<double> y = { 0, 1, 2 };
  CHECK(r2(y, y) == 1.0);
  const std::vector<double> mean = { 1, 1, 1 };
  CHECK(r2(y, mean) == 0.0);
  const std::vector<double> p = { 0, 1, 1 };
  CHECK(r2(y, p) == doctest::Approx(0.5).epsilon(1e-15));
  // worse than the mean is negative, and never above one
  const std::vector<double> bad = { 2, 1, 0 };
  CHECK(r2(y, bad) == doctest::Approx(-3.0));

  const std::vector<double> flat = { 3, 3 };
  const std::vector<double> two = { 3, 4 };
  CHECK(code_of([&] { r2(flat, two); }) == ErrorCode::kNumeric);
  CHECK(code_of([&] { r2(y, two); }) == ErrorCode::kInvalidArgument);
  const std::vector<double> none;
  CHECK(code_of([&] { r2(none, none); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("rms") {
  const std::vector<double> y = { 0.5, -2, 7 };
  CHECK(rms(y, y) == 0.0);
  CHECK(rms(std::vector<double> { 0 }, std::vector<double> { 2 }) == 2.0);
  CHECK(rms(std::vector<double> { 0, 0 }, std::vector<double> { 1, -1 }) == 1.0);

  // rms^2 * n equals the residual sum of squares
  const std::vector<double> p = { 1.5, -1, 4 };
  const double sse = 1.0 + 1.0 + 9.0;
  CHECK(rms(y, p) * rms(y, p) * 3 == doctest::Approx(sse).epsilon(1e-14));

  const std::vector<double> none;
  CHECK(code_of([&] { rms(none, none); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("predict_molecule_average") {
  const auto vocab = vocab_for({ "CCO", "OCC", "C(C)O", "C(O)C" });
  const std::vector<std::string> variants = { "CCO", "OCC", "C(C)O", "C(O)C" };

  const Model flat = constant_model(vocab, -0.3);
  CHECK(predict_molecule_average(flat, variants, vocab) == -0.3);
  CHECK(predict_molecule_average(flat, std::vector<std::string> { "OCC" }, vocab)
        == -0.3);

  const Model m = random_model(vocab);
  const std::vector<std::string> one = { "C(C)O" };
  CHECK(predict_molecule_average(m, one, vocab)
        == predict_strings(m, vocab, one)[0]);

  const auto each = predict_strings(m, vocab, variants);
  double mean = 0;
  for (double v: each) mean += v;
  mean /= each.size();
  CHECK(predict_molecule_average(m, variants, vocab)
        == doctest::Approx(mean).epsilon(1e-14));

  // variants outside the vocabulary are skipped; none usable is an error
  const std::vector<std::string> mixed = { "CCO", "CCN", "OCC" };
  const std::vector<std::string> usable = { "CCO", "OCC" };
  CHECK(predict_molecule_average(m, mixed, vocab)
        == doctest::Approx(predict_molecule_average(m, usable, vocab)));
  const std::vector<std::string> unusable = { "CCN" };
  CHECK(code_of([&] { predict_molecule_average(m, unusable, vocab); })
        == ErrorCode::kInvalidArgument);
}

TEST_CASE("build_report") {
  std::vector<DatasetRow> canonical = {
    { "a", "CCO", -1.0, Fold::kTrain },
    { "b", "CCC", 0.5, Fold::kTrain },
    { "c", "CCN", 1.0, Fold::kTrain },
    { "d", "CNC", 0.2, Fold::kTest },
    { "e", "NCO", -0.4, Fold::kTest },
  };
  std::vector<DatasetRow> enumerated = canonical;
  enumerated.push_back({ "a", "OCC", -1.0, Fold::kTrain });
  enumerated.push_back({ "a", "C(C)O", -1.0, Fold::kTrain });
  enumerated.push_back({ "e", "OCN", -0.4, Fold::kTest });
  std::vector<std::string> corpus;
  for (auto &r: enumerated) corpus.push_back(r.smiles);
  const auto vocab = TokenVocabulary::build(corpus);

  const Model can = random_model(vocab, 1);
  const Model aug = random_model(vocab, 2);
  const std::vector<NamedModel> models = { { "canonical", &can },
                                           { "enumerated", &aug } };
  const std::vector<DatasetView> views = { { "canonical", canonical },
                                           { "enumerated", enumerated } };
  const EvalReport rep = build_report(models, views, vocab);

  CHECK(rep.cells.size() == 8);
  CHECK(rep.averaged.size() == 4);
  for (const char *model: { "canonical", "enumerated" }) {
    for (const char *view: { "canonical", "enumerated", "averaged" }) {
      for (Fold fold: { Fold::kTrain, Fold::kTest }) {
        const ReportCell *c = rep.find(model, view, fold);
        REQUIRE(c);
        CHECK(c->rms >= 0.0);
        CHECK(c->r2 <= 1.0);
      }
    }
  }
  CHECK(rep.find("enumerated", "enumerated", Fold::kTrain)->count == 5);
  CHECK(rep.find("enumerated", "averaged", Fold::kTrain)->count == 3);
  CHECK(rep.find("enumerated", "averaged", Fold::kTest)->count == 2);

  // cell values recomputed independently from raw predictions
  const std::vector<std::string> test_smiles = { "CNC", "NCO", "OCN" };
  const auto p = predict_strings(aug, vocab, test_smiles);
  const std::vector<double> y = { 0.2, -0.4, -0.4 };
  const ReportCell *cell = rep.find("enumerated", "enumerated", Fold::kTest);
  CHECK(cell->r2 == doctest::Approx(r2(y, p)).epsilon(1e-14));
  CHECK(cell->rms == doctest::Approx(rms(y, p)).epsilon(1e-14));
  const std::vector<double> ym = { 0.2, -0.4 };
  const std::vector<double> pm = { p[0], (p[1] + p[2]) / 2 };
  const ReportCell *avg = rep.find("enumerated", "averaged", Fold::kTest);
  CHECK(avg->r2 == doctest::Approx(r2(ym, pm)).epsilon(1e-14));

  // byte-identical serialization on a rerun
  const EvalReport again = build_report(models, views, vocab);
  CHECK(again.to_text() == rep.to_text());
  CHECK(again.to_csv() == rep.to_csv());
  CHECK(again.scatter_csv() == rep.scatter_csv());
  CHECK(rep.to_text().find("coefficient of determination") != std::string::npos);
  CHECK(rep.to_csv().rfind("model,view,fold,r2,rms,count\n", 0) == 0);

  Model other = aug;
  other.vocab_fingerprint ^= 1;
  const std::vector<NamedModel> wrong = { { "x", &other } };
  CHECK(code_of([&] { build_report(wrong, views, vocab); })
        == ErrorCode::kVocabMismatch);
}
