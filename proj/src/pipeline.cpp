#include "smienum/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "smienum/checkpoint.hpp"
#include "smienum/csv.hpp"
#include "smienum/enumerator.hpp"
#include "smienum/error.hpp"
#include "smienum/smiles.hpp"

namespace smienum {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json hyperparams_json(const Hyperparams &hp) {
  return {
    { "num_lstm_layers", hp.num_lstm_layers },
    { "units", hp.units },
    { "dropout_w", hp.dropout_w },
    { "dropout_u", hp.dropout_u },
    { "num_dense_hidden", hp.num_dense_hidden },
    { "dense_size", hp.dense_size },
    { "l1", hp.l1 },
    { "l2", hp.l2 },
    { "learning_rate", hp.learning_rate },
    { "batch_size", hp.batch_size },
    { "epochs", hp.epochs },
    { "seed", hp.seed },
  };
}

}  // namespace

AugmentSummary run_augment(const AugmentOptions &options) {
  const std::vector<RawRecord> raw = load_table(options.input, options.columns);
  const CleanResult cleaned = clean(raw);
  const SplitResult folds =
      split(cleaned.kept, options.test_fraction, options.seed);
  const TargetScaler scaler = TargetScaler::fit(folds.train);
  const auto train = normalize(folds.train, scaler);
  const auto test = normalize(folds.test, scaler);

  const AugmentedDataset train_aug =
      augment(train, Fold::kTrain, options.attempts, options.seed);
  const AugmentedDataset test_aug =
      augment(test, Fold::kTest, options.attempts, options.seed);
  const AugmentedDataset train_can = canonical_view(train, Fold::kTrain);
  const AugmentedDataset test_can = canonical_view(test, Fold::kTest);

  std::vector<DatasetRow> augmented = train_aug.rows;
  augmented.insert(augmented.end(), test_aug.rows.begin(), test_aug.rows.end());
  std::vector<DatasetRow> canonical = train_can.rows;
  canonical.insert(canonical.end(), test_can.rows.begin(), test_can.rows.end());

  std::vector<std::string> corpus;
  corpus.reserve(augmented.size() + canonical.size());
  for (const auto *rows: { &augmented, &canonical })
    for (const DatasetRow &r: *rows) corpus.push_back(r.smiles);
  const TokenVocabulary vocab = TokenVocabulary::build(corpus, options.margin);

  fs::create_directories(options.out_dir);
  write_dataset(options.out_dir / "augmented.csv", augmented);
  write_dataset(options.out_dir / "canonical.csv", canonical);
  vocab.save(options.out_dir / "vocab.txt");

  std::string dropped = "molecule_id,smiles,activity,reason,detail\n";
  for (const DroppedRecord &d: cleaned.dropped)
    dropped += csv::format_row({ d.record.molecule_id, d.record.smiles,
                                 d.record.activity, to_string(d.reason),
                                 d.detail });
  write_text(options.out_dir / "dropped.csv", dropped);

  ordered_json meta = {
    { "format", "smienum-dataset v1" },
    { "invocation", options.invocation },
    { "input", options.input.string() },
    { "columns",
      { { "id", options.columns.id },
        { "smiles", options.columns.smiles },
        { "activity", options.columns.activity } } },
    { "seed", options.seed },
    { "attempts", options.attempts },
    { "test_fraction", options.test_fraction },
    { "random_generator", "mt19937_64" },
    { "target_transform", "(log10(activity) - mean) / std, fit on train" },
    { "scaler", { { "mean", scaler.mean() }, { "std", scaler.std() } } },
    { "vocabulary", "vocab.txt" },
    { "max_len", vocab.max_len() },
    { "records", { { "read", raw.size() },
                   { "kept", cleaned.kept.size() },
                   { "dropped", cleaned.dropped.size() } } },
    { "molecules", { { "train", train.size() }, { "test", test.size() } } },
    { "rows",
      { { "train", train_aug.rows.size() }, { "test", test_aug.rows.size() } } },
    { "augmentation_factor",
      { { "train", train_aug.augmentation_factor() },
        { "test", test_aug.augmentation_factor() } } },
  };
  write_text(options.out_dir / "metadata.json", meta.dump(2) + "\n");

  AugmentSummary s;
  s.kept = cleaned.kept.size();
  s.dropped = cleaned.dropped.size();
  s.train_molecules = train.size();
  s.test_molecules = test.size();
  s.train_rows = train_aug.rows.size();
  s.test_rows = test_aug.rows.size();
  s.scaler_mean = scaler.mean();
  s.scaler_std = scaler.std();
  s.max_len = vocab.max_len();
  s.vocab_size = vocab.size();
  return s;
}

DatasetDir DatasetDir::load(const fs::path &dir) {
  return { read_dataset(dir / "augmented.csv"),
           read_dataset(dir / "canonical.csv"),
           TokenVocabulary::load(dir / "vocab.txt") };
}

const std::vector<DatasetRow> &DatasetDir::view(const std::string &name) const {
  if (name == "enumerated") return augmented;
  if (name == "canonical") return canonical;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown dataset view '" + name
                  + "' (expected enumerated or canonical)");
}

std::pair<EncodedSet, EncodedSet> encode_view(const DatasetDir &data,
                                              const std::string &view) {
  std::pair<EncodedSet, EncodedSet> sets;
  for (EncodedSet *s: { &sets.first, &sets.second }) {
    s->steps = data.vocab.max_len();
    s->vocab_size = data.vocab.size();
  }
  for (const DatasetRow &r: data.view(view)) {
    EncodedSet &target = r.fold == Fold::kTrain ? sets.first : sets.second;
    target.add(encode(data.vocab, r.smiles), r.target);
  }
  return sets;
}

std::string trace_csv(const TrainingTrace &trace) {
  std::string out = "epoch,train_mse,train_loss,test_mse,best\n";
  for (const TraceEntry &e: trace.epochs)
    out += std::to_string(e.epoch) + "," + exact(e.train_mse) + ","
           + exact(e.train_loss) + "," + exact(e.test_mse) + ","
           + (e.epoch == trace.best_epoch ? "1" : "0") + "\n";
  return out;
}

TrainSummary run_train(const TrainOptions &options,
                       const EpochCallback &on_epoch) {
  options.hp.validate();
  if (options.checkpoint.empty())
    throw Error(ErrorCode::kInvalidArgument, "no checkpoint path given");
  const DatasetDir data = DatasetDir::load(options.dataset_dir);
  const auto [train_set, test_set] = encode_view(data, options.view);
  if (train_set.size() == 0)
    throw Error(ErrorCode::kInvalidArgument, "dataset has no training rows");

  const TrainResult result =
      train(init_params(options.hp, data.vocab.size()), options.hp, train_set,
            test_set.size() > 0 ? &test_set : nullptr, on_epoch);

  Model model { options.hp, result.params, data.vocab.fingerprint(), "adam" };
  save_model(options.checkpoint, model);
  const fs::path trace_path = options.trace.empty()
                                  ? fs::path(options.checkpoint.string()
                                             + ".trace.csv")
                                  : options.trace;
  write_text(trace_path, trace_csv(result.trace));

  const TraceEntry &best = result.trace.epochs[result.trace.best_epoch - 1];
  ordered_json meta = {
    { "format", "smienum-model v1" },
    { "invocation", options.invocation },
    { "dataset", options.dataset_dir.string() },
    { "view", options.view },
    { "optimizer",
      { { "name", "adam" }, { "beta1", 0.9 }, { "beta2", 0.999 },
        { "epsilon", 1e-8 } } },
    { "hyperparameters", hyperparams_json(options.hp) },
    { "regularization", "l1/l2 on the output dense weights only" },
    { "vocab_fingerprint", model.vocab_fingerprint },
    { "best_epoch", best.epoch },
    { "best_test_mse", test_set.size() > 0 ? ordered_json(best.test_mse)
                                           : ordered_json(nullptr) },
    { "updates", result.trace.updates },
    { "trace", trace_path.filename().string() },
  };
  write_text(options.checkpoint.string() + ".json", meta.dump(2) + "\n");

  TrainSummary s;
  s.best_epoch = best.epoch;
  s.best_test_mse = best.test_mse;
  s.updates = result.trace.updates;
  s.train_rows = train_set.size();
  s.test_rows = test_set.size();
  return s;
}

std::vector<Prediction> run_predict(const PredictOptions &options) {
  const TokenVocabulary vocab = TokenVocabulary::load(options.vocab);
  const Model model = load_model(options.checkpoint, &vocab);

  // (key, strings belonging to it)
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  for (const std::string &s: options.smiles) groups.push_back({ s, { s } });
  if (!options.table.empty()) {
    const auto rows = csv::read_file(options.table);
    if (rows.empty()) throw Error(ErrorCode::kSchema, "empty input table");
    const auto &header = rows.front();
    const auto find = [&](const char *name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end())
        throw Error(ErrorCode::kSchema,
                    std::string("input table lacks column '") + name + "'");
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t id_col = find("molecule_id");
    const std::size_t smiles_col = find("smiles");
    std::map<std::string, std::size_t> slot;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto &row = rows[r];
      if (row.size() <= std::max(id_col, smiles_col))
        throw Error(ErrorCode::kSchema,
                    "row " + std::to_string(r + 1) + " has too few fields");
      if (!options.average) {
        groups.push_back({ row[smiles_col], { row[smiles_col] } });
        continue;
      }
      auto [it, inserted] = slot.emplace(row[id_col], groups.size());
      if (inserted) groups.push_back({ row[id_col], {} });
      groups[it->second].second.push_back(row[smiles_col]);
    }
  }

  std::vector<Prediction> out;
  for (auto &[key, strings]: groups) {
    if (!options.average) {
      out.push_back({ key, 1, predict_strings(model, vocab, strings)[0] });
      continue;
    }
    // A single bare SMILES is expanded into its enumerated variants.
    std::vector<std::string> variants = strings;
    if (options.table.empty() || strings.size() == 1) {
      variants = enumerate_random(parse_molecule(strings.front()),
                                  options.attempts,
                                  molecule_seed(options.seed, key));
    }
    std::size_t usable = 0;
    for (const std::string &v: variants) {
      try {
        encode(vocab, v);
        ++usable;
      } catch (const Error &) {
      }
    }
    out.push_back(
        { key, usable, predict_molecule_average(model, variants, vocab) });
  }
  return out;
}

EvalReport run_eval(const EvalOptions &options) {
  const DatasetDir data = DatasetDir::load(options.dataset_dir);
  std::vector<Model> models;
  std::vector<std::string> tags;
  if (!options.canonical_model.empty()) {
    models.push_back(load_model(options.canonical_model, &data.vocab));
    tags.push_back("canonical");
  }
  if (!options.enumerated_model.empty()) {
    models.push_back(load_model(options.enumerated_model, &data.vocab));
    tags.push_back("enumerated");
  }
  if (models.empty())
    throw Error(ErrorCode::kInvalidArgument, "no model given to evaluate");
  std::vector<NamedModel> named;
  for (std::size_t i = 0; i < models.size(); ++i)
    named.push_back({ tags[i], &models[i] });
  const std::vector<DatasetView> views = {
    { "canonical", data.canonical },
    { "enumerated", data.augmented },
  };
  EvalReport report = build_report(named, views, data.vocab);
  if (!options.out_prefix.empty()) {
    const std::string prefix = options.out_prefix.string();
    write_text(prefix + ".txt", report.to_text());
    write_text(prefix + ".csv", report.to_csv());
    write_text(prefix + ".scatter.csv", report.scatter_csv());
    const ordered_json meta = {
      { "format", "smienum-report v1" },
      { "invocation", options.invocation },
      { "dataset", options.dataset_dir.string() },
      { "canonical_model", options.canonical_model.string() },
      { "enumerated_model", options.enumerated_model.string() },
      { "r2", "coefficient of determination, 1 - SS_res / SS_tot" },
      { "rms", "root mean square error" },
      { "averaged", "per-molecule mean over enumerated SMILES" },
    };
    write_text(prefix + ".json", meta.dump(2) + "\n");
  }
  return report;
}

std::string search_csv(const SearchResult &result) {
  std::string out = "trial,best,best_test_mse,best_epoch,num_lstm_layers,units,"
                    "dropout_w,dropout_u,num_dense_hidden,dense_size,l1,l2,"
                    "learning_rate,seed\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const TrialResult &t = result.trials[i];
    out += csv::format_row({
        std::to_string(t.trial), i == result.best ? "1" : "0",
        exact(t.best_test_mse), std::to_string(t.best_epoch),
        std::to_string(t.hp.num_lstm_layers), std::to_string(t.hp.units),
        exact(t.hp.dropout_w), exact(t.hp.dropout_u),
        std::to_string(t.hp.num_dense_hidden), std::to_string(t.hp.dense_size),
        exact(t.hp.l1), exact(t.hp.l2), exact(t.hp.learning_rate),
        std::to_string(t.hp.seed) });
  }
  return out;
}

SearchResult run_search(const SearchOptions &options,
                        const TrialCallback &on_trial) {
  const DatasetDir data = DatasetDir::load(options.dataset_dir);
  const auto [train_set, test_set] = encode_view(data, options.view);
  SearchResult result = random_search(train_set, test_set, options.trials,
                                      options.seed, options.base, on_trial);
  if (!options.out_csv.empty()) {
    write_text(options.out_csv, search_csv(result));
    const TrialResult &best = result.trials[result.best];
    const ordered_json meta = {
      { "format", "smienum-search v1" },
      { "invocation", options.invocation },
      { "dataset", options.dataset_dir.string() },
      { "view", options.view },
      { "trials", options.trials },
      { "seed", options.seed },
      { "trial_seed", "seed + trial index" },
      { "selection", "minimum best test MSE" },
      { "best_trial", best.trial },
      { "best_hyperparameters", hyperparams_json(best.hp) },
    };
    write_text(options.out_csv.string() + ".json", meta.dump(2) + "\n");
  }
  return result;
}

}  // namespace smienum
