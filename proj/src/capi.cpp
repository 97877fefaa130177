#include "smienum/smienum.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "smienum/checkpoint.hpp"
#include "smienum/encode.hpp"
#include "smienum/enumerator.hpp"
#include "smienum/error.hpp"
#include "smienum/pipeline.hpp"
#include "smienum/smiles.hpp"

struct smienum_molecule {
  smienum::Molecule mol;
};

struct smienum_strings {
  std::vector<std::string> items;
};

struct smienum_vocab {
  smienum::TokenVocabulary vocab;
};

struct smienum_model {
  smienum::Model model;
};

struct smienum_predictions {
  std::vector<smienum::Prediction> items;
  std::vector<smienum_prediction> view;
};

struct smienum_report {
  smienum::EvalReport report;
  std::string text;
};

struct smienum_search {
  std::vector<smienum_trial> trials;
  std::size_t best = 0;
};

namespace {

thread_local std::string last_error;
thread_local long last_position = -1;

smienum_status fail(smienum_status status, const std::string &message,
                    long position = -1) {
  last_error = message;
  last_position = position;
  return status;
}

// Runs `body`, translating exceptions to status codes.
template <class F>
smienum_status guard(F &&body) {
  last_error.clear();
  last_position = -1;
  try {
    body();
    return SMIENUM_OK;
  } catch (const smienum::ParseError &e) {
    return fail(SMIENUM_E_PARSE, e.what(), static_cast<long>(e.position()));
  } catch (const smienum::Error &e) {
    return fail(static_cast<smienum_status>(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error &e) {
    return fail(SMIENUM_E_IO, e.what());
  } catch (const std::bad_alloc &) {
    return fail(SMIENUM_E_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return fail(SMIENUM_E_INTERNAL, e.what());
  } catch (...) {
    return fail(SMIENUM_E_INTERNAL, "unknown error");
  }
}

void require(const void *p, const char *what) {
  if (!p)
    throw smienum::Error(smienum::ErrorCode::kInvalidArgument,
                         std::string(what) + " is NULL");
}

std::string str_or(const char *s, const char *fallback = "") {
  return s ? s : fallback;
}

char *dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

smienum::Hyperparams from_c(const smienum_hyperparams &c) {
  smienum::Hyperparams hp;
  hp.num_lstm_layers = c.num_lstm_layers;
  hp.units = c.units;
  hp.dropout_w = c.dropout_w;
  hp.dropout_u = c.dropout_u;
  hp.num_dense_hidden = c.num_dense_hidden;
  hp.dense_size = c.dense_size;
  hp.l1 = c.l1;
  hp.l2 = c.l2;
  hp.learning_rate = c.learning_rate;
  hp.batch_size = c.batch_size;
  hp.epochs = c.epochs;
  hp.seed = c.seed;
  return hp;
}

smienum_hyperparams to_c(const smienum::Hyperparams &hp) {
  return { hp.num_lstm_layers, hp.units,     hp.dropout_w,
           hp.dropout_u,       hp.num_dense_hidden, hp.dense_size,
           hp.l1,              hp.l2,        hp.learning_rate,
           hp.batch_size,      hp.epochs,    hp.seed };
}

smienum_trial to_c(const smienum::TrialResult &t) {
  return { t.trial, to_c(t.hp), t.best_test_mse, t.best_epoch };
}

std::vector<int> order_from(const size_t *order, size_t n) {
  std::vector<int> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = static_cast<int>(order[i]);
  return out;
}

}  // namespace

extern "C" {

const char *smienum_version(void) { return "1.0.0"; }

const char *smienum_status_name(smienum_status status) {
  switch (status) {
    case SMIENUM_OK: return "ok";
    case SMIENUM_E_INVALID_ARGUMENT: return "invalid argument";
    case SMIENUM_E_PARSE: return "parse error";
    case SMIENUM_E_SIZE_LIMIT: return "size limit";
    case SMIENUM_E_LENGTH: return "length error";
    case SMIENUM_E_UNKNOWN_TOKEN: return "unknown token";
    case SMIENUM_E_IO: return "i/o error";
    case SMIENUM_E_SCHEMA: return "schema error";
    case SMIENUM_E_DUPLICATE_ID: return "duplicate id";
    case SMIENUM_E_NUMERIC: return "numeric error";
    case SMIENUM_E_VOCAB_MISMATCH: return "vocabulary mismatch";
    case SMIENUM_E_INVALID_PERMUTATION: return "invalid permutation";
    case SMIENUM_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char *smienum_last_error(void) { return last_error.c_str(); }
long smienum_last_error_position(void) { return last_position; }

void smienum_string_free(char *s) { std::free(s); }

size_t smienum_strings_count(const smienum_strings *list) {
  return list ? list->items.size() : 0;
}

const char *smienum_strings_at(const smienum_strings *list, size_t i) {
  if (!list || i >= list->items.size()) return nullptr;
  return list->items[i].c_str();
}

void smienum_strings_free(smienum_strings *list) { delete list; }

smienum_status smienum_parse(const char *smiles, smienum_molecule **out,
                             int *stripped_stereo) {
  return guard([&] {
    require(smiles, "smiles");
    require(out, "out");
    auto parsed = smienum::parse_smiles(smiles);
    if (stripped_stereo) *stripped_stereo = parsed.diagnostics.stripped_stereo;
    *out = new smienum_molecule { std::move(parsed.molecule) };
  });
}

void smienum_molecule_free(smienum_molecule *mol) { delete mol; }

size_t smienum_molecule_atom_count(const smienum_molecule *mol) {
  return mol ? mol->mol.atom_count() : 0;
}

size_t smienum_molecule_bond_count(const smienum_molecule *mol) {
  return mol ? mol->mol.bond_count() : 0;
}

smienum_status smienum_write(const smienum_molecule *mol, const size_t *order,
                             size_t n, char **out) {
  return guard([&] {
    require(mol, "molecule");
    require(out, "out");
    if (!order) {
      *out = dup(smienum::write_smiles(mol->mol));
      return;
    }
    const std::vector<int> o = order_from(order, n);
    *out = dup(smienum::write_smiles(mol->mol, o));
  });
}

smienum_status smienum_canonical(const smienum_molecule *mol, char **out) {
  return guard([&] {
    require(mol, "molecule");
    require(out, "out");
    *out = dup(smienum::canonical_smiles(mol->mol));
  });
}

smienum_status smienum_canonicalize(const char *smiles, char **out) {
  return guard([&] {
    require(smiles, "smiles");
    require(out, "out");
    *out = dup(smienum::canonicalize(smiles));
  });
}

smienum_status smienum_enumerate_random(const smienum_molecule *mol,
                                        int attempts, uint64_t seed,
                                        smienum_strings **out) {
  return guard([&] {
    require(mol, "molecule");
    require(out, "out");
    *out = new smienum_strings { smienum::enumerate_random(mol->mol, attempts,
                                                           seed) };
  });
}

smienum_status smienum_enumerate_exhaustive(const smienum_molecule *mol,
                                            smienum_strings **out) {
  return guard([&] {
    require(mol, "molecule");
    require(out, "out");
    *out = new smienum_strings { smienum::enumerate_exhaustive(mol->mol) };
  });
}

uint64_t smienum_molecule_seed(uint64_t seed, const char *id) {
  return smienum::molecule_seed(seed, id ? id : "");
}

smienum_status smienum_vocab_build(const char *const *corpus, size_t n,
                                   int margin, smienum_vocab **out) {
  return guard([&] {
    require(out, "out");
    if (n > 0) require(corpus, "corpus");
    std::vector<std::string> strings;
    for (size_t i = 0; i < n; ++i) {
      require(corpus[i], "corpus entry");
      strings.emplace_back(corpus[i]);
    }
    *out = new smienum_vocab { smienum::TokenVocabulary::build(strings,
                                                               margin) };
  });
}

smienum_status smienum_vocab_load(const char *path, smienum_vocab **out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new smienum_vocab { smienum::TokenVocabulary::load(path) };
  });
}

smienum_status smienum_vocab_save(const smienum_vocab *vocab,
                                  const char *path) {
  return guard([&] {
    require(vocab, "vocab");
    require(path, "path");
    vocab->vocab.save(path);
  });
}

void smienum_vocab_free(smienum_vocab *vocab) { delete vocab; }

int smienum_vocab_size(const smienum_vocab *vocab) {
  return vocab ? vocab->vocab.size() : 0;
}

int smienum_vocab_max_len(const smienum_vocab *vocab) {
  return vocab ? vocab->vocab.max_len() : 0;
}

smienum_status smienum_encode(const smienum_vocab *vocab, const char *smiles,
                              uint8_t *matrix, size_t capacity) {
  return guard([&] {
    require(vocab, "vocab");
    require(smiles, "smiles");
    require(matrix, "matrix");
    const auto seq = smienum::encode(vocab->vocab, smiles);
    if (capacity < seq.matrix.size())
      throw smienum::Error(smienum::ErrorCode::kInvalidArgument,
                           "matrix buffer holds " + std::to_string(capacity)
                               + " bytes, need "
                               + std::to_string(seq.matrix.size()));
    std::memcpy(matrix, seq.matrix.data(), seq.matrix.size());
  });
}

smienum_status smienum_decode(const smienum_vocab *vocab,
                              const uint8_t *matrix, size_t size,
                              char **out) {
  return guard([&] {
    require(vocab, "vocab");
    require(matrix, "matrix");
    require(out, "out");
    smienum::OneHotSequence seq;
    seq.rows = vocab->vocab.max_len();
    seq.cols = vocab->vocab.size();
    if (size != static_cast<size_t>(seq.rows) * seq.cols)
      throw smienum::Error(smienum::ErrorCode::kInvalidArgument,
                           "matrix size does not match the vocabulary");
    seq.matrix.assign(matrix, matrix + size);
    *out = dup(smienum::decode(vocab->vocab, seq));
  });
}

void smienum_hyperparams_enumerated(smienum_hyperparams *hp) {
  if (hp) *hp = to_c(smienum::Hyperparams::enumerated_preset());
}

void smienum_hyperparams_canonical(smienum_hyperparams *hp) {
  if (hp) *hp = to_c(smienum::Hyperparams::canonical_preset());
}

smienum_status smienum_hyperparams_validate(const smienum_hyperparams *hp) {
  return guard([&] {
    require(hp, "hyperparams");
    from_c(*hp).validate();
  });
}

smienum_status smienum_model_load(const char *path, const smienum_vocab *vocab,
                                  smienum_model **out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new smienum_model { smienum::load_model(
        path, vocab ? &vocab->vocab : nullptr) };
  });
}

void smienum_model_free(smienum_model *model) { delete model; }

void smienum_model_hyperparams(const smienum_model *model,
                               smienum_hyperparams *out) {
  if (model && out) *out = to_c(model->model.hp);
}

smienum_status smienum_model_predict(const smienum_model *model,
                                     const smienum_vocab *vocab,
                                     const char *const *smiles, size_t n,
                                     double *out) {
  return guard([&] {
    require(model, "model");
    require(vocab, "vocab");
    if (n == 0) return;
    require(smiles, "smiles");
    require(out, "out");
    std::vector<std::string> strings;
    for (size_t i = 0; i < n; ++i) {
      require(smiles[i], "smiles entry");
      strings.emplace_back(smiles[i]);
    }
    const auto values =
        smienum::predict_strings(model->model, vocab->vocab, strings);
    std::copy(values.begin(), values.end(), out);
  });
}

void smienum_augment_options_init(smienum_augment_options *o) {
  if (!o) return;
  const smienum::AugmentOptions d;
  *o = {};
  o->id_column = "id";
  o->smiles_column = "smiles";
  o->activity_column = "activity";
  o->test_fraction = d.test_fraction;
  o->attempts = d.attempts;
  o->seed = d.seed;
  o->margin = d.margin;
}

smienum_status smienum_augment(const smienum_augment_options *o,
                               smienum_augment_summary *summary) {
  return guard([&] {
    require(o, "options");
    require(o->input, "input");
    require(o->out_dir, "out_dir");
    smienum::AugmentOptions opts;
    opts.input = o->input;
    opts.out_dir = o->out_dir;
    opts.columns = { str_or(o->id_column, "id"),
                     str_or(o->smiles_column, "smiles"),
                     str_or(o->activity_column, "activity") };
    opts.test_fraction = o->test_fraction;
    opts.attempts = o->attempts;
    opts.seed = o->seed;
    opts.margin = o->margin;
    opts.invocation = str_or(o->invocation);
    const auto s = smienum::run_augment(opts);
    if (summary)
      *summary = { s.kept,        s.dropped,     s.train_molecules,
                   s.test_molecules, s.train_rows, s.test_rows,
                   s.scaler_mean, s.scaler_std,  s.max_len,
                   s.vocab_size };
  });
}

void smienum_train_options_init(smienum_train_options *o) {
  if (!o) return;
  *o = {};
  o->view = "enumerated";
  smienum_hyperparams_enumerated(&o->hp);
}

smienum_status smienum_train(const smienum_train_options *o,
                             smienum_train_summary *summary) {
  return guard([&] {
    require(o, "options");
    require(o->dataset_dir, "dataset_dir");
    require(o->checkpoint, "checkpoint");
    smienum::TrainOptions opts;
    opts.dataset_dir = o->dataset_dir;
    opts.view = str_or(o->view, "enumerated");
    opts.hp = from_c(o->hp);
    opts.checkpoint = o->checkpoint;
    if (o->trace) opts.trace = o->trace;
    opts.invocation = str_or(o->invocation);
    smienum::EpochCallback cb;
    if (o->on_epoch) {
      cb = [o](const smienum::TraceEntry &e) {
        o->on_epoch(o->user, e.epoch, e.train_mse, e.train_loss, e.test_mse);
      };
    }
    const auto s = smienum::run_train(opts, cb);
    if (summary)
      *summary = { s.best_epoch, s.best_test_mse, s.updates, s.train_rows,
                   s.test_rows };
  });
}

void smienum_predict_options_init(smienum_predict_options *o) {
  if (!o) return;
  *o = {};
  o->attempts = smienum::PredictOptions {}.attempts;
}

smienum_status smienum_predict(const smienum_predict_options *o,
                               smienum_predictions **out) {
  return guard([&] {
    require(o, "options");
    require(o->checkpoint, "checkpoint");
    require(o->vocab, "vocab");
    require(out, "out");
    smienum::PredictOptions opts;
    opts.checkpoint = o->checkpoint;
    opts.vocab = o->vocab;
    if (o->smiles_count > 0) require(o->smiles, "smiles");
    for (size_t i = 0; i < o->smiles_count; ++i) {
      require(o->smiles[i], "smiles entry");
      opts.smiles.emplace_back(o->smiles[i]);
    }
    if (o->table) opts.table = o->table;
    opts.average = o->average != 0;
    opts.attempts = o->attempts;
    opts.seed = o->seed;
    auto result = std::make_unique<smienum_predictions>();
    result->items = smienum::run_predict(opts);
    for (const auto &p: result->items)
      result->view.push_back({ p.key.c_str(), p.variants, p.value });
    *out = result.release();
  });
}

size_t smienum_predictions_count(const smienum_predictions *p) {
  return p ? p->view.size() : 0;
}

const smienum_prediction *smienum_predictions_at(const smienum_predictions *p,
                                                 size_t i) {
  if (!p || i >= p->view.size()) return nullptr;
  return &p->view[i];
}

void smienum_predictions_free(smienum_predictions *p) { delete p; }

smienum_status smienum_eval(const smienum_eval_options *o,
                            smienum_report **out) {
  return guard([&] {
    require(o, "options");
    require(o->dataset_dir, "dataset_dir");
    require(out, "out");
    smienum::EvalOptions opts;
    opts.dataset_dir = o->dataset_dir;
    if (o->canonical_model) opts.canonical_model = o->canonical_model;
    if (o->enumerated_model) opts.enumerated_model = o->enumerated_model;
    if (o->out_prefix) opts.out_prefix = o->out_prefix;
    opts.invocation = str_or(o->invocation);
    auto report = smienum::run_eval(opts);
    std::string text = report.to_text();
    *out = new smienum_report { std::move(report), std::move(text) };
  });
}

const char *smienum_report_text(const smienum_report *r) {
  return r ? r->text.c_str() : "";
}

smienum_status smienum_report_cell(const smienum_report *r, const char *model,
                                   const char *view, const char *fold,
                                   double *r2, double *rms, size_t *count) {
  return guard([&] {
    require(r, "report");
    require(model, "model");
    require(view, "view");
    require(fold, "fold");
    const std::string f = fold;
    if (f != "train" && f != "test")
      throw smienum::Error(smienum::ErrorCode::kInvalidArgument,
                           "fold must be 'train' or 'test'");
    const auto which = f == "train" ? smienum::Fold::kTrain
                                    : smienum::Fold::kTest;
    const smienum::ReportCell *cell = r->report.find(model, view, which);
    if (!cell)
      throw smienum::Error(smienum::ErrorCode::kInvalidArgument,
                           std::string("report has no cell ") + model + "/"
                               + view + "/" + fold);
    if (r2) *r2 = cell->r2;
    if (rms) *rms = cell->rms;
    if (count) *count = cell->count;
  });
}

void smienum_report_free(smienum_report *r) { delete r; }

void smienum_search_options_init(smienum_search_options *o) {
  if (!o) return;
  *o = {};
  o->view = "enumerated";
  o->trials = smienum::SearchOptions {}.trials;
  smienum_hyperparams_enumerated(&o->base);
}

smienum_status smienum_run_search(const smienum_search_options *o,
                                  smienum_search **out) {
  return guard([&] {
    require(o, "options");
    require(o->dataset_dir, "dataset_dir");
    require(out, "out");
    smienum::SearchOptions opts;
    opts.dataset_dir = o->dataset_dir;
    opts.view = str_or(o->view, "enumerated");
    opts.trials = o->trials;
    opts.seed = o->seed;
    opts.base = from_c(o->base);
    if (o->out_csv) opts.out_csv = o->out_csv;
    opts.invocation = str_or(o->invocation);
    smienum::TrialCallback cb;
    if (o->on_trial) {
      cb = [o](const smienum::TrialResult &t) {
        const smienum_trial c = to_c(t);
        o->on_trial(o->user, &c);
      };
    }
    const auto result = smienum::run_search(opts, cb);
    auto s = std::make_unique<smienum_search>();
    for (const auto &t: result.trials) s->trials.push_back(to_c(t));
    s->best = result.best;
    *out = s.release();
  });
}

size_t smienum_search_count(const smienum_search *s) {
  return s ? s->trials.size() : 0;
}

size_t smienum_search_best(const smienum_search *s) { return s ? s->best : 0; }

const smienum_trial *smienum_search_at(const smienum_search *s, size_t i) {
  if (!s || i >= s->trials.size()) return nullptr;
  return &s->trials[i];
}

void smienum_search_free(smienum_search *s) { delete s; }

}  // extern "C"
