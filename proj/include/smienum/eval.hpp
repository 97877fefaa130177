#pragma once

#include <span>
#include <string>
#include <vector>

#include "smienum/checkpoint.hpp"
#include "smienum/dataset.hpp"
#include "smienum/encode.hpp"

namespace smienum {

// Coefficient of determination 1 - SS_res / SS_tot (not squared Pearson).
double r2(std::span<const double> y, std::span<const double> p);

double rms(std::span<const double> y, std::span<const double> p);

// Mean prediction over the variants that encode under `vocab`. Throws
// Error(kInvalidArgument) when none do.
double predict_molecule_average(const Model &model,
                                std::span<const std::string> variants,
                                const TokenVocabulary &vocab);

struct ReportCell {
  std::string model;
  std::string view;
  Fold fold;
  double r2;
  double rms;
  std::size_t count;
};

struct ScatterPoint {
  std::string model;
  std::string view;
  std::string molecule_id;
  Fold fold;
  double truth;
  double predicted;
};

struct EvalReport {
  std::vector<ReportCell> cells;
  // Per-molecule means of the enumerated view; view name "averaged".
  std::vector<ReportCell> averaged;
  std::vector<ScatterPoint> scatter;

  const ReportCell *find(const std::string &model, const std::string &view,
                         Fold fold) const;

  std::string to_text() const;
  std::string to_csv() const;
  std::string scatter_csv() const;
};

struct NamedModel {
  std::string tag;
  const Model *model;
};

struct DatasetView {
  std::string name;
  std::span<const DatasetRow> rows;
};

// Evaluates every model on every view and fold. Views named "enumerated"
// also get per-molecule averaged rows. All models must carry the
// vocabulary's fingerprint.
EvalReport build_report(std::span<const NamedModel> models,
                        std::span<const DatasetView> views,
                        const TokenVocabulary &vocab);

}  // namespace smienum
