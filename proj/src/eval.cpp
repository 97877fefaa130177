#include "smienum/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "smienum/csv.hpp"
#include "smienum/error.hpp"

namespace smienum {

namespace {

void check_lengths(std::span<const double> y, std::span<const double> p) {
  if (y.empty() || y.size() != p.size())
    throw Error(ErrorCode::kInvalidArgument,
                "metrics need equal, non-empty inputs");
}

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// r2 of a cell; NaN when the fold's targets have no spread.
double r2_or_nan(std::span<const double> y, std::span<const double> p) {
  try {
    return r2(y, p);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kNumeric) throw;
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

double r2(std::span<const double> y, std::span<const double> p) {
  check_lengths(y, p);
  double mean = 0.0;
  for (double v: y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - p[i]) * (y[i] - p[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (!(ss_tot > 0.0))
    throw Error(ErrorCode::kNumeric, "r2 undefined: targets have zero variance");
  return 1.0 - ss_res / ss_tot;
}

double rms(std::span<const double> y, std::span<const double> p) {
  check_lengths(y, p);
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - p[i]) * (y[i] - p[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

double predict_molecule_average(const Model &model,
                                std::span<const std::string> variants,
                                const TokenVocabulary &vocab) {
  std::vector<std::string> usable;
  for (const std::string &v: variants) {
    try {
      encode(vocab, v);
      usable.push_back(v);
    } catch (const Error &) {
    }
  }
  if (usable.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "no variant of the molecule can be encoded");
  const std::vector<double> p = predict_strings(model, vocab, usable);
  double sum = 0.0;
  for (double v: p) sum += v;
  return sum / static_cast<double>(p.size());
}

const ReportCell *EvalReport::find(const std::string &model,
                                   const std::string &view, Fold fold) const {
  for (const auto *list: { &cells, &averaged }) {
    for (const ReportCell &c: *list) {
      if (c.model == model && c.view == view && c.fold == fold) return &c;
    }
  }
  return nullptr;
}

EvalReport build_report(std::span<const NamedModel> models,
                        std::span<const DatasetView> views,
                        const TokenVocabulary &vocab) {
  for (const NamedModel &m: models) {
    if (m.model->vocab_fingerprint != vocab.fingerprint())
      throw Error(ErrorCode::kVocabMismatch,
                  "model '" + m.tag + "' was trained with another vocabulary");
  }

  EvalReport report;
  for (const NamedModel &m: models) {
    for (const DatasetView &view: views) {
      for (Fold fold: { Fold::kTrain, Fold::kTest }) {
        std::vector<const DatasetRow *> rows;
        std::vector<std::string> smiles;
        std::vector<double> truth;
        for (const DatasetRow &r: view.rows) {
          if (r.fold != fold) continue;
          rows.push_back(&r);
          smiles.push_back(r.smiles);
          truth.push_back(r.target);
        }
        if (rows.empty()) continue;
        const std::vector<double> pred = predict_strings(*m.model, vocab, smiles);
        report.cells.push_back({ m.tag, view.name, fold, r2_or_nan(truth, pred),
                                 rms(truth, pred), rows.size() });
        for (std::size_t i = 0; i < rows.size(); ++i)
          report.scatter.push_back({ m.tag, view.name, rows[i]->molecule_id,
                                     fold, truth[i], pred[i] });

        if (view.name != "enumerated") continue;
        // Group by molecule in first-seen order.
        std::map<std::string, std::size_t> slot;
        std::vector<std::string> ids;
        std::vector<double> sums;
        std::vector<double> counts;
        std::vector<double> mol_truth;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          auto [it, inserted] = slot.emplace(rows[i]->molecule_id, ids.size());
          if (inserted) {
            ids.push_back(rows[i]->molecule_id);
            sums.push_back(0.0);
            counts.push_back(0.0);
            mol_truth.push_back(truth[i]);
          }
          sums[it->second] += pred[i];
          counts[it->second] += 1.0;
        }
        std::vector<double> mean(ids.size());
        for (std::size_t k = 0; k < ids.size(); ++k) {
          mean[k] = sums[k] / counts[k];
          report.scatter.push_back(
              { m.tag, "averaged", ids[k], fold, mol_truth[k], mean[k] });
        }
        report.averaged.push_back({ m.tag, "averaged", fold,
                                    r2_or_nan(mol_truth, mean),
                                    rms(mol_truth, mean), ids.size() });
      }
    }
  }
  return report;
}

std::string EvalReport::to_text() const {
  std::vector<std::pair<std::string, std::string>> keys;
  auto add_key = [&](const ReportCell &c) {
    const std::pair<std::string, std::string> k { c.model, c.view };
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  };
  for (const ReportCell &c: cells) add_key(c);
  for (const ReportCell &c: averaged) add_key(c);

  char line[160];
  std::string out = "# R2 is the coefficient of determination; RMS is the "
                    "root mean square error.\n";
  std::snprintf(line, sizeof line, "%-14s %-12s %10s %10s %10s %10s\n", "Model",
                "SMILES", "Train R2", "Train RMS", "Test R2", "Test RMS");
  out += line;
  for (const auto &[model, view]: keys) {
    const ReportCell *train = find(model, view, Fold::kTrain);
    const ReportCell *test = find(model, view, Fold::kTest);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::snprintf(line, sizeof line, "%-14s %-12s %10s %10s %10s %10s\n",
                  model.c_str(), view.c_str(),
                  fixed(train ? train->r2 : nan).c_str(),
                  fixed(train ? train->rms : nan).c_str(),
                  fixed(test ? test->r2 : nan).c_str(),
                  fixed(test ? test->rms : nan).c_str());
    out += line;
  }
  return out;
}

std::string EvalReport::to_csv() const {
  std::string out = "model,view,fold,r2,rms,count\n";
  for (const auto *list: { &cells, &averaged }) {
    for (const ReportCell &c: *list)
      out += csv::format_row({ c.model, c.view, to_string(c.fold), exact(c.r2),
                               exact(c.rms), std::to_string(c.count) });
  }
  return out;
}

std::string EvalReport::scatter_csv() const {
  std::string out = "true,predicted,molecule_id,view,model,fold\n";
  for (const ScatterPoint &p: scatter)
    out += csv::format_row({ exact(p.truth), exact(p.predicted), p.molecule_id,
                             p.view, p.model, to_string(p.fold) });
  return out;
}

}  // namespace smienum
