// smienum command line tool. Talks to the library through the C API only.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smienum/smienum.h"

namespace {

constexpr int kUsageExit = 64;

// Thrown to unwind with a library status.
struct Failure {
  int code;
};

void check(smienum_status status) {
  if (status == SMIENUM_OK) return;
  std::cerr << "smienum: " << smienum_status_name(status) << ": "
            << smienum_last_error() << "\n";
  throw Failure { status };
}

std::string shell_quote(const std::string &arg) {
  if (!arg.empty()
      && arg.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTU"
                               "VWXYZ0123456789-_./=:,+@%")
             == std::string::npos)
    return arg;
  std::string out = "'";
  for (char c: arg) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string join_invocation(int argc, char **argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += shell_quote(argv[i]);
  }
  return out;
}

std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "smienum: i/o error: cannot read " << path << "\n";
    throw Failure { SMIENUM_E_IO };
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos)
      lines.push_back(line);
  }
  return lines;
}

const char *opt(const std::string &s) { return s.empty() ? nullptr : s.c_str(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Molecule {
  smienum_molecule *ptr = nullptr;
  ~Molecule() { smienum_molecule_free(ptr); }
};

struct Strings {
  smienum_strings *ptr = nullptr;
  ~Strings() { smienum_strings_free(ptr); }
};

// --- enumerate / canonicalize -------------------------------------------

struct InputArgs {
  std::vector<std::string> smiles;
  std::string input;

  void add(CLI::App *cmd) {
    auto *s = cmd->add_option("--smiles", smiles, "SMILES string (repeatable)");
    auto *i = cmd->add_option("--input", input, "file with one SMILES per line");
    s->excludes(i);
  }

  std::vector<std::string> collect() const {
    std::vector<std::string> all = smiles;
    if (!input.empty())
      for (auto &l: read_lines(input)) all.push_back(l);
    if (all.empty()) {
      std::cerr << "smienum: one of --smiles or --input is required\n";
      throw Failure { kUsageExit };
    }
    return all;
  }
};

Molecule parse(const std::string &smiles) {
  Molecule mol;
  int stereo = 0;
  check(smienum_parse(smiles.c_str(), &mol.ptr, &stereo));
  if (stereo)
    std::cerr << "smienum: warning: stereo marks ignored in " << smiles << "\n";
  return mol;
}

struct EnumerateArgs {
  InputArgs in;
  int attempts = 100;
  std::uint64_t seed = 0;
  bool exhaustive = false;

  void run() const {
    for (const std::string &s: in.collect()) {
      Molecule mol = parse(s);
      Strings list;
      if (exhaustive)
        check(smienum_enumerate_exhaustive(mol.ptr, &list.ptr));
      else
        check(smienum_enumerate_random(mol.ptr, attempts, seed, &list.ptr));
      for (size_t i = 0; i < smienum_strings_count(list.ptr); ++i)
        std::cout << smienum_strings_at(list.ptr, i) << "\n";
    }
  }
};

struct CanonicalizeArgs {
  InputArgs in;

  void run() const {
    for (const std::string &s: in.collect()) {
      Molecule mol = parse(s);
      char *out = nullptr;
      check(smienum_canonical(mol.ptr, &out));
      std::cout << out << "\n";
      smienum_string_free(out);
    }
  }
};

// --- augment ------------------------------------------------------------

struct AugmentArgs {
  std::string input, out_dir;
  std::string id_column = "id", smiles_column = "smiles",
              activity_column = "activity";
  double test_fraction = 0.1;
  int attempts = 100;
  std::uint64_t seed = 0;
  int margin = 1;

  void run(const std::string &invocation) const {
    smienum_augment_options o;
    smienum_augment_options_init(&o);
    o.input = input.c_str();
    o.out_dir = out_dir.c_str();
    o.id_column = id_column.c_str();
    o.smiles_column = smiles_column.c_str();
    o.activity_column = activity_column.c_str();
    o.test_fraction = test_fraction;
    o.attempts = attempts;
    o.seed = seed;
    o.margin = margin;
    o.invocation = invocation.c_str();
    smienum_augment_summary s;
    check(smienum_augment(&o, &s));
    std::cout << "kept " << s.kept << " dropped " << s.dropped << "\n"
              << "train molecules " << s.train_molecules << " rows "
              << s.train_rows << "\n"
              << "test molecules " << s.test_molecules << " rows "
              << s.test_rows << "\n"
              << "scaler mean " << fmt(s.scaler_mean) << " std "
              << fmt(s.scaler_std) << "\n"
              << "vocabulary " << s.vocab_size << " symbols, max_len "
              << s.max_len << "\n";
  }
};

// --- hyperparameter flags shared by train and search --------------------

struct HyperFlags {
  std::string preset = "enumerated";
  smienum_hyperparams hp {};
  std::vector<std::pair<CLI::Option *, std::function<void()>>> overrides;
  // Values parsed from flags; applied over the preset when given.
  int layers = 0, units = 0, dense_layers = 0, dense_size = 0, batch_size = 0,
      epochs = 0;
  double dropout_w = 0, dropout_u = 0, l1 = 0, l2 = 0, lr = 0;
  std::uint64_t seed = 0;

  template <class T>
  void flag(CLI::App *cmd, const char *name, T &value, T &target,
            const char *help) {
    CLI::Option *o = cmd->add_option(name, value, help);
    overrides.push_back({ o, [&value, &target] { target = value; } });
  }

  void add(CLI::App *cmd, bool searched_only_base) {
    cmd->add_option("--preset", preset, "hyperparameter preset")
        ->check(CLI::IsMember({ "enumerated", "canonical" }))
        ->capture_default_str();
    if (!searched_only_base) {
      flag(cmd, "--layers", layers, hp.num_lstm_layers, "LSTM layers (1-2)");
      flag(cmd, "--units", units, hp.units, "LSTM units per layer");
      flag(cmd, "--dropout-w", dropout_w, hp.dropout_w,
           "input connection dropout");
      flag(cmd, "--dropout-u", dropout_u, hp.dropout_u,
           "recurrent connection dropout");
      flag(cmd, "--dense-layers", dense_layers, hp.num_dense_hidden,
           "hidden dense layers (0-1)");
      flag(cmd, "--dense-size", dense_size, hp.dense_size,
           "hidden dense width");
      flag(cmd, "--l1", l1, hp.l1, "L1 penalty on the output weights");
      flag(cmd, "--l2", l2, hp.l2, "L2 penalty on the output weights");
      flag(cmd, "--learning-rate", lr, hp.learning_rate, "Adam learning rate");
      flag(cmd, "--seed", seed, hp.seed, "initialization and shuffling seed");
    }
    flag(cmd, "--batch-size", batch_size, hp.batch_size, "minibatch size");
    flag(cmd, "--epochs", epochs, hp.epochs, "training epochs");
  }

  smienum_hyperparams resolve() {
    smienum_hyperparams base;
    if (preset == "canonical") smienum_hyperparams_canonical(&base);
    else smienum_hyperparams_enumerated(&base);
    // Flags write into hp; start from the preset and apply the given ones.
    hp = base;
    for (auto &[o, apply]: overrides)
      if (o->count()) apply();
    check(smienum_hyperparams_validate(&hp));
    return hp;
  }
};

// --- train --------------------------------------------------------------

struct TrainArgs {
  std::string data, view = "enumerated", checkpoint, trace;
  HyperFlags hyper;
  bool quiet = false;

  static void on_epoch(void *, int epoch, double train_mse, double train_loss,
                       double test_mse) {
    std::fprintf(stderr, "epoch %d train_mse %.6f loss %.6f test_mse %.6f\n",
                 epoch, train_mse, train_loss, test_mse);
  }

  void run(const std::string &invocation) {
    smienum_train_options o;
    smienum_train_options_init(&o);
    o.dataset_dir = data.c_str();
    o.view = view.c_str();
    o.hp = hyper.resolve();
    o.checkpoint = checkpoint.c_str();
    o.trace = opt(trace);
    o.invocation = invocation.c_str();
    if (!quiet) o.on_epoch = on_epoch;
    smienum_train_summary s;
    check(smienum_train(&o, &s));
    std::cout << "train rows " << s.train_rows << " test rows " << s.test_rows
              << "\n"
              << "updates " << s.updates << "\n"
              << "best epoch " << s.best_epoch << " test mse "
              << fmt(s.best_test_mse) << "\n"
              << "checkpoint " << checkpoint << "\n";
  }
};

// --- predict ------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint, vocab, input, table;
  std::vector<std::string> smiles;
  bool average = false;
  int attempts = 100;
  std::uint64_t seed = 0;

  void run() const {
    std::vector<std::string> all = smiles;
    if (!input.empty())
      for (auto &l: read_lines(input)) all.push_back(l);
    if (all.empty() && table.empty()) {
      std::cerr << "smienum: one of --smiles, --input or --table is required\n";
      throw Failure { kUsageExit };
    }
    std::vector<const char *> ptrs;
    for (const auto &s: all) ptrs.push_back(s.c_str());

    smienum_predict_options o;
    smienum_predict_options_init(&o);
    o.checkpoint = checkpoint.c_str();
    o.vocab = vocab.c_str();
    o.smiles = ptrs.data();
    o.smiles_count = ptrs.size();
    o.table = opt(table);
    o.average = average;
    o.attempts = attempts;
    o.seed = seed;
    smienum_predictions *p = nullptr;
    check(smienum_predict(&o, &p));
    std::cout << (average ? "molecule,variants,prediction\n"
                          : "smiles,variants,prediction\n");
    for (size_t i = 0; i < smienum_predictions_count(p); ++i) {
      const smienum_prediction *r = smienum_predictions_at(p, i);
      std::string key = r->key;
      if (key.find_first_of(",\"\n") != std::string::npos) {
        std::string q = "\"";
        for (char c: key) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        key = q + "\"";
      }
      std::cout << key << "," << r->variants << "," << fmt(r->value) << "\n";
    }
    smienum_predictions_free(p);
  }
};

// --- eval ---------------------------------------------------------------

struct EvalArgs {
  std::string data, canonical_model, enumerated_model, out;

  void run(const std::string &invocation) const {
    smienum_eval_options o {};
    o.dataset_dir = data.c_str();
    o.canonical_model = opt(canonical_model);
    o.enumerated_model = opt(enumerated_model);
    o.out_prefix = opt(out);
    o.invocation = invocation.c_str();
    smienum_report *r = nullptr;
    check(smienum_eval(&o, &r));
    std::cout << smienum_report_text(r);
    smienum_report_free(r);
  }
};

// --- search -------------------------------------------------------------

struct SearchArgs {
  std::string data, view = "enumerated", out;
  int trials = 10;
  std::uint64_t seed = 0;
  HyperFlags hyper;

  static void print(std::ostream &os, const smienum_trial &t) {
    const smienum_hyperparams &h = t.hp;
    os << "trial " << t.trial << " test_mse " << fmt(t.best_test_mse)
       << " epoch " << t.best_epoch << " layers " << h.num_lstm_layers
       << " units " << h.units << " dropout_w " << fmt(h.dropout_w)
       << " dropout_u " << fmt(h.dropout_u) << " dense_layers "
       << h.num_dense_hidden << " dense_size " << h.dense_size << " l1 "
       << fmt(h.l1) << " l2 " << fmt(h.l2) << " learning_rate "
       << fmt(h.learning_rate) << " seed " << h.seed << "\n";
  }

  static void on_trial(void *, const smienum_trial *t) { print(std::cerr, *t); }

  void run(const std::string &invocation) {
    smienum_search_options o;
    smienum_search_options_init(&o);
    o.dataset_dir = data.c_str();
    o.view = view.c_str();
    o.trials = trials;
    o.seed = seed;
    o.base = hyper.resolve();
    o.out_csv = opt(out);
    o.invocation = invocation.c_str();
    o.on_trial = on_trial;
    smienum_search *s = nullptr;
    check(smienum_run_search(&o, &s));
    std::cout << "best ";
    print(std::cout, *smienum_search_at(s, smienum_search_best(s)));
    smienum_search_free(s);
  }
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "SMILES enumeration, augmentation and LSTM regression" };
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(smienum_version()));

  EnumerateArgs en;
  auto *c_en = app.add_subcommand("enumerate", "list alternative SMILES");
  en.in.add(c_en);
  c_en->add_option("--attempts", en.attempts, "random orderings to try")
      ->capture_default_str();
  c_en->add_option("--seed", en.seed, "random seed")->capture_default_str();
  c_en->add_flag("--exhaustive", en.exhaustive,
                 "try every atom ordering (small molecules only)");

  CanonicalizeArgs ca;
  auto *c_ca = app.add_subcommand("canonicalize", "print canonical SMILES");
  ca.in.add(c_ca);

  AugmentArgs au;
  auto *c_au = app.add_subcommand("augment", "build a dataset directory");
  c_au->add_option("--input", au.input, "CSV with id, SMILES, activity")
      ->required();
  c_au->add_option("--out", au.out_dir, "output directory")->required();
  c_au->add_option("--id-column", au.id_column)->capture_default_str();
  c_au->add_option("--smiles-column", au.smiles_column)->capture_default_str();
  c_au->add_option("--activity-column", au.activity_column)
      ->capture_default_str();
  c_au->add_option("--test-fraction", au.test_fraction)->capture_default_str();
  c_au->add_option("--attempts", au.attempts)->capture_default_str();
  c_au->add_option("--seed", au.seed)->capture_default_str();
  c_au->add_option("--margin", au.margin, "padding columns beyond the longest")
      ->capture_default_str();

  TrainArgs tr;
  auto *c_tr = app.add_subcommand("train", "train an LSTM regressor");
  c_tr->add_option("--data", tr.data, "dataset directory")->required();
  c_tr->add_option("--view", tr.view, "training view")
      ->check(CLI::IsMember({ "enumerated", "canonical" }))
      ->capture_default_str();
  c_tr->add_option("--checkpoint", tr.checkpoint, "model output path")
      ->required();
  c_tr->add_option("--trace", tr.trace, "trace CSV path");
  c_tr->add_flag("--quiet", tr.quiet, "no per-epoch progress");
  tr.hyper.add(c_tr, false);

  PredictArgs pr;
  auto *c_pr = app.add_subcommand("predict", "score SMILES with a model");
  c_pr->add_option("--checkpoint", pr.checkpoint)->required();
  c_pr->add_option("--vocab", pr.vocab, "vocab.txt of the dataset")
      ->required();
  c_pr->add_option("--smiles", pr.smiles, "SMILES string (repeatable)");
  c_pr->add_option("--input", pr.input, "file with one SMILES per line");
  c_pr->add_option("--table", pr.table, "CSV with molecule_id and smiles");
  c_pr->add_flag("--average", pr.average,
                 "average over enumerated SMILES per molecule");
  c_pr->add_option("--attempts", pr.attempts)->capture_default_str();
  c_pr->add_option("--seed", pr.seed)->capture_default_str();

  EvalArgs ev;
  auto *c_ev = app.add_subcommand("eval", "R2/RMS report per model and view");
  c_ev->add_option("--data", ev.data, "dataset directory")->required();
  c_ev->add_option("--canonical-model", ev.canonical_model);
  c_ev->add_option("--enumerated-model", ev.enumerated_model);
  c_ev->add_option("--out", ev.out, "prefix for .txt/.csv/.scatter.csv");

  SearchArgs se;
  auto *c_se = app.add_subcommand("search", "random hyperparameter search");
  c_se->add_option("--data", se.data, "dataset directory")->required();
  c_se->add_option("--view", se.view)
      ->check(CLI::IsMember({ "enumerated", "canonical" }))
      ->capture_default_str();
  c_se->add_option("--trials", se.trials)->capture_default_str();
  c_se->add_option("--seed", se.seed)->capture_default_str();
  c_se->add_option("--out", se.out, "per-trial CSV");
  se.hyper.add(c_se, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsageExit;
  }

  const std::string invocation = join_invocation(argc, argv);
  try {
    if (c_en->parsed()) en.run();
    else if (c_ca->parsed()) ca.run();
    else if (c_au->parsed()) au.run(invocation);
    else if (c_tr->parsed()) tr.run(invocation);
    else if (c_pr->parsed()) pr.run();
    else if (c_ev->parsed()) ev.run(invocation);
    else if (c_se->parsed()) se.run(invocation);
  } catch (const Failure &f) {
    return f.code;
  }
  std::cout.flush();
  return std::cout ? 0 : SMIENUM_E_IO;
}
