#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace smienum {

struct RawRecord {
  std::string molecule_id;
  std::string smiles;
  std::string activity;  // as written in the file
};

struct ColumnNames {
  std::string id = "id";
  std::string smiles = "smiles";
  std::string activity = "activity";
};

// Throws Error(kIo) for a missing file, kSchema for a missing column and
// kDuplicateId naming the repeated id.
std::vector<RawRecord> load_table(const std::filesystem::path &path,
                                  const ColumnNames &columns = {});
std::vector<RawRecord> parse_table(std::string_view csv_text,
                                   const ColumnNames &columns = {});

struct Record {
  std::string molecule_id;
  std::string smiles;
  double activity;
};

enum class DropReason {
  kNonNumeric,
  kNonPositive,
  kInvalidSmiles,
};

const char *to_string(DropReason reason);

struct DroppedRecord {
  RawRecord record;
  DropReason reason;
  std::string detail;
};

struct CleanResult {
  std::vector<Record> kept;
  std::vector<DroppedRecord> dropped;
};

// Drops non-numeric or non-positive activities and unparseable SMILES.
CleanResult clean(std::span<const RawRecord> records);

struct SplitResult {
  std::vector<Record> train;
  std::vector<Record> test;
};

// Seeded shuffle; the first ceil(n * test_fraction) records go to test.
// Both folds keep the input order of their records.
SplitResult split(std::span<const Record> records, double test_fraction,
                  std::uint64_t seed);

// Standardizes log10(activity) with statistics of the training fold.
class TargetScaler {
 public:
  TargetScaler(double mean, double std);

  // Population mean and std of log10(activity); throws Error(kNumeric) on
  // zero variance.
  static TargetScaler fit(std::span<const Record> train);

  double transform(double activity) const;
  double inverse_transform(double target) const;

  double mean() const { return mean_; }
  double std() const { return std_; }

 private:
  double mean_;
  double std_;
};

struct LabeledMolecule {
  std::string molecule_id;
  std::string smiles;
  double target;
};

std::vector<LabeledMolecule> normalize(std::span<const Record> records,
                                       const TargetScaler &scaler);

enum class Fold {
  kTrain,
  kTest,
};

const char *to_string(Fold fold);

struct DatasetRow {
  std::string molecule_id;
  std::string smiles;
  double target;
  Fold fold;
};

struct AugmentedDataset {
  std::vector<DatasetRow> rows;
  std::size_t molecule_count = 0;
  std::uint64_t seed = 0;
  int attempts = 0;

  double augmentation_factor() const {
    return molecule_count == 0
               ? 0.0
               : static_cast<double>(rows.size()) / molecule_count;
  }
};

// One row per distinct enumerated SMILES of every molecule. Each molecule
// is enumerated with molecule_seed(seed, molecule_id).
AugmentedDataset augment(std::span<const LabeledMolecule> molecules, Fold fold,
                         int attempts, std::uint64_t seed);

// One row per molecule holding its canonical SMILES.
AugmentedDataset canonical_view(std::span<const LabeledMolecule> molecules,
                                Fold fold);

// Columns molecule_id, smiles, target, fold. Targets are printed with 17
// significant digits so that they read back exactly.
std::string dataset_csv(std::span<const DatasetRow> rows);
void write_dataset(const std::filesystem::path &path,
                   std::span<const DatasetRow> rows);
std::vector<DatasetRow> read_dataset(const std::filesystem::path &path);

}  // namespace smienum
