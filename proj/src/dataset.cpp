#include "smienum/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "smienum/csv.hpp"
#include "smienum/enumerator.hpp"
#include "smienum/error.hpp"
#include "smienum/random.hpp"
#include "smienum/smiles.hpp"

namespace smienum {

namespace {

std::size_t column_index(const csv::Row &header, const std::string &name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw Error(ErrorCode::kSchema, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string &text, double &value) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char *begin = t.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), value);
  return ec == std::errc() && ptr == t.data() + t.size()
         && std::isfinite(value);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<RawRecord> records_from_rows(const std::vector<csv::Row> &rows,
                                         const ColumnNames &columns) {
  if (rows.empty()) throw Error(ErrorCode::kSchema, "table has no header row");
  const csv::Row &header = rows.front();
  const std::size_t id_col = column_index(header, columns.id);
  const std::size_t smiles_col = column_index(header, columns.smiles);
  const std::size_t activity_col = column_index(header, columns.activity);
  const std::size_t needed = std::max({ id_col, smiles_col, activity_col });

  std::vector<RawRecord> records;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row &row = rows[r];
    if (row.size() <= needed)
      throw Error(ErrorCode::kSchema,
                  "row " + std::to_string(r + 1) + " has too few fields");
    RawRecord rec { row[id_col], row[smiles_col], row[activity_col] };
    if (!ids.insert(rec.molecule_id).second)
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate molecule id '" + rec.molecule_id + "'");
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<RawRecord> parse_table(std::string_view csv_text,
                                   const ColumnNames &columns) {
  return records_from_rows(csv::parse(csv_text), columns);
}

std::vector<RawRecord> load_table(const std::filesystem::path &path,
                                  const ColumnNames &columns) {
  return records_from_rows(csv::read_file(path), columns);
}

const char *to_string(DropReason reason) {
  switch (reason) {
  case DropReason::kNonNumeric:
    return "non-numeric activity";
  case DropReason::kNonPositive:
    return "non-positive activity";
  case DropReason::kInvalidSmiles:
    return "invalid SMILES";
  }
  return "?";
}

CleanResult clean(std::span<const RawRecord> records) {
  CleanResult result;
  for (const RawRecord &rec: records) {
    double activity = 0.0;
    if (!parse_double(rec.activity, activity)) {
      result.dropped.push_back({ rec, DropReason::kNonNumeric, rec.activity });
      continue;
    }
    if (activity <= 0.0) {
      result.dropped.push_back({ rec, DropReason::kNonPositive, rec.activity });
      continue;
    }
    try {
      parse_smiles(rec.smiles);
    } catch (const Error &e) {
      result.dropped.push_back({ rec, DropReason::kInvalidSmiles, e.what() });
      continue;
    }
    result.kept.push_back({ rec.molecule_id, trim(rec.smiles), activity });
  }
  return result;
}

SplitResult split(std::span<const Record> records, double test_fraction,
                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorCode::kInvalidArgument,
                "test fraction must lie strictly between 0 and 1");
  if (records.size() < 2)
    throw Error(ErrorCode::kInvalidArgument,
                "need at least 2 records to split");
  const std::size_t n = records.size();
  const auto test_count = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * test_fraction - 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<bool> in_test(n, false);
  for (std::size_t i = 0; i < test_count; ++i) in_test[order[i]] = true;

  SplitResult result;
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? result.test : result.train).push_back(records[i]);
  return result;
}

TargetScaler::TargetScaler(double mean, double std) : mean_(mean), std_(std) {
  if (!(std > 0.0) || !std::isfinite(std) || !std::isfinite(mean))
    throw Error(ErrorCode::kNumeric, "scaler std must be positive and finite");
}

TargetScaler TargetScaler::fit(std::span<const Record> train) {
  if (train.size() < 2)
    throw Error(ErrorCode::kNumeric, "need at least 2 training activities");
  double sum = 0.0;
  for (const Record &r: train) sum += std::log10(r.activity);
  const double mean = sum / static_cast<double>(train.size());
  double ss = 0.0;
  for (const Record &r: train) {
    const double d = std::log10(r.activity) - mean;
    ss += d * d;
  }
  const double std = std::sqrt(ss / static_cast<double>(train.size()));
  if (!(std > 0.0))
    throw Error(ErrorCode::kNumeric, "training activities have zero variance");
  return TargetScaler(mean, std);
}

double TargetScaler::transform(double activity) const {
  return (std::log10(activity) - mean_) / std_;
}

double TargetScaler::inverse_transform(double target) const {
  return std::pow(10.0, target * std_ + mean_);
}

std::vector<LabeledMolecule> normalize(std::span<const Record> records,
                                       const TargetScaler &scaler) {
  std::vector<LabeledMolecule> out;
  out.reserve(records.size());
  for (const Record &r: records)
    out.push_back({ r.molecule_id, r.smiles, scaler.transform(r.activity) });
  return out;
}

const char *to_string(Fold fold) {
  return fold == Fold::kTrain ? "train" : "test";
}

AugmentedDataset augment(std::span<const LabeledMolecule> molecules, Fold fold,
                         int attempts, std::uint64_t seed) {
  AugmentedDataset out;
  out.molecule_count = molecules.size();
  out.seed = seed;
  out.attempts = attempts;
  for (const LabeledMolecule &m: molecules) {
    const Molecule mol = parse_molecule(m.smiles);
    for (std::string &s:
         enumerate_random(mol, attempts, molecule_seed(seed, m.molecule_id)))
      out.rows.push_back({ m.molecule_id, std::move(s), m.target, fold });
  }
  return out;
}

AugmentedDataset canonical_view(std::span<const LabeledMolecule> molecules,
                                Fold fold) {
  AugmentedDataset out;
  out.molecule_count = molecules.size();
  for (const LabeledMolecule &m: molecules)
    out.rows.push_back({ m.molecule_id, canonicalize(m.smiles), m.target, fold });
  return out;
}

std::string dataset_csv(std::span<const DatasetRow> rows) {
  std::string out = "molecule_id,smiles,target,fold\n";
  for (const DatasetRow &r: rows)
    out += csv::format_row({ r.molecule_id, r.smiles, format_double(r.target),
                             to_string(r.fold) });
  return out;
}

void write_dataset(const std::filesystem::path &path,
                   std::span<const DatasetRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << dataset_csv(rows);
}

std::vector<DatasetRow> read_dataset(const std::filesystem::path &path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw Error(ErrorCode::kSchema, path.string() + " is empty");
  const csv::Row &header = rows.front();
  const std::size_t id = column_index(header, "molecule_id");
  const std::size_t smiles = column_index(header, "smiles");
  const std::size_t target = column_index(header, "target");
  const std::size_t fold = column_index(header, "fold");
  const std::size_t needed = std::max({ id, smiles, target, fold });

  std::vector<DatasetRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row &row = rows[r];
    if (row.size() <= needed)
      throw Error(ErrorCode::kSchema,
                  "row " + std::to_string(r + 1) + " has too few fields");
    DatasetRow d { row[id], row[smiles], 0.0, Fold::kTrain };
    if (!parse_double(row[target], d.target))
      throw Error(ErrorCode::kSchema,
                  "row " + std::to_string(r + 1) + ": bad target");
    if (row[fold] == "test") d.fold = Fold::kTest;
    else if (row[fold] != "train")
      throw Error(ErrorCode::kSchema,
                  "row " + std::to_string(r + 1) + ": bad fold '" + row[fold]
                      + "'");
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace smienum
