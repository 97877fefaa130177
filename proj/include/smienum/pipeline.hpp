#pragma once

// File-level workflows behind the command line tool and the C API.
// A dataset directory produced by run_augment holds:
//   augmented.csv   enumerated SMILES, both folds
//   canonical.csv   one canonical SMILES per molecule, both folds
//   vocab.txt       vocabulary over every string of both views
//   dropped.csv     records removed by cleaning, with reasons
//   metadata.json   seeds, counts, scaler and the invocation

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smienum/dataset.hpp"
#include "smienum/eval.hpp"
#include "smienum/lstm.hpp"
#include "smienum/search.hpp"

namespace smienum {

struct AugmentOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir;
  ColumnNames columns;
  double test_fraction = 0.1;
  int attempts = 100;
  std::uint64_t seed = 0;
  int margin = 1;
  std::string invocation;
};

struct AugmentSummary {
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::size_t train_molecules = 0;
  std::size_t test_molecules = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double scaler_mean = 0.0;
  double scaler_std = 0.0;
  int max_len = 0;
  int vocab_size = 0;
};

AugmentSummary run_augment(const AugmentOptions &options);

struct DatasetDir {
  std::vector<DatasetRow> augmented;
  std::vector<DatasetRow> canonical;
  TokenVocabulary vocab;

  static DatasetDir load(const std::filesystem::path &dir);

  // "enumerated" or "canonical".
  const std::vector<DatasetRow> &view(const std::string &name) const;
};

// Splits a view into encoded train and test sets.
std::pair<EncodedSet, EncodedSet> encode_view(const DatasetDir &data,
                                              const std::string &view);

struct TrainOptions {
  std::filesystem::path dataset_dir;
  std::string view = "enumerated";
  Hyperparams hp = Hyperparams::enumerated_preset();
  std::filesystem::path checkpoint;
  std::filesystem::path trace;  // empty: <checkpoint>.trace.csv
  std::string invocation;
};

struct TrainSummary {
  int best_epoch = 0;
  double best_test_mse = 0.0;
  long updates = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

// Writes the checkpoint, its trace CSV and a <checkpoint>.json sidecar.
TrainSummary run_train(const TrainOptions &options,
                       const EpochCallback &on_epoch = {});

std::string trace_csv(const TrainingTrace &trace);

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path vocab;
  // Each entry is a molecule (for average mode) or one string to score.
  std::vector<std::string> smiles;
  // Optional CSV with molecule_id and smiles columns; rows sharing an id
  // are one molecule in average mode.
  std::filesystem::path table;
  bool average = false;
  int attempts = 100;
  std::uint64_t seed = 0;
};

struct Prediction {
  std::string key;  // SMILES, or molecule id in average mode
  std::size_t variants;
  double value;
};

std::vector<Prediction> run_predict(const PredictOptions &options);

struct EvalOptions {
  std::filesystem::path dataset_dir;
  std::filesystem::path canonical_model;   // optional
  std::filesystem::path enumerated_model;  // optional
  // Writes .txt, .csv, .scatter.csv and a .json with the invocation.
  std::filesystem::path out_prefix;
  std::string invocation;
};

EvalReport run_eval(const EvalOptions &options);

struct SearchOptions {
  std::filesystem::path dataset_dir;
  std::string view = "enumerated";
  int trials = 10;
  std::uint64_t seed = 0;
  Hyperparams base = Hyperparams::enumerated_preset();
  std::filesystem::path out_csv;  // optional; also writes <out_csv>.json
  std::string invocation;
};

SearchResult run_search(const SearchOptions &options,
                        const TrialCallback &on_trial = {});

std::string search_csv(const SearchResult &result);

}  // namespace smienum
