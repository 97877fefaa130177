#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smienum/encode.hpp"
#include "smienum/lstm.hpp"

namespace smienum {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Model {
  Hyperparams hp;
  LstmParams params;
  std::uint64_t vocab_fingerprint = 0;
  std::string optimizer = "adam";
};

// Batched inference over raw strings.
std::vector<double> predict_strings(const Model &model,
                                    const TokenVocabulary &vocab,
                                    std::span<const std::string> smiles);

// Binary little-endian container: magic, version, hyperparameters,
// vocabulary fingerprint, optimizer name, then named tensors with shape
// prefixes and row-major float64 payloads.
std::string serialize_model(const Model &model);
Model deserialize_model(std::string_view bytes);

void save_model(const std::filesystem::path &path, const Model &model);

// When `vocab` is given its fingerprint must match the checkpoint's.
Model load_model(const std::filesystem::path &path,
                 const TokenVocabulary *vocab = nullptr);

}  // namespace smienum
