#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smienum/error.hpp"

namespace smienum {

class LengthError : public Error {
 public:
  LengthError(std::size_t length, int max_len)
      : Error(ErrorCode::kLength,
              "string of length " + std::to_string(length)
                  + " exceeds max_len " + std::to_string(max_len)),
        length_(length) { }
  std::size_t length() const noexcept { return length_; }

 private:
  std::size_t length_;
};

class UnknownTokenError : public Error {
 public:
  UnknownTokenError(std::size_t position, char character)
      : Error(ErrorCode::kUnknownToken,
              std::string("character '") + character + "' at position "
                  + std::to_string(position) + " is not in the vocabulary"),
        position_(position), character_(character) { }
  std::size_t position() const noexcept { return position_; }
  char character() const noexcept { return character_; }

 private:
  std::size_t position_;
  char character_;
};

// Character-level vocabulary with a space pad symbol and a fixed padded
// sequence length. Indices follow ascending character code.
class TokenVocabulary {
 public:
  static constexpr char kPad = ' ';

  // Characters of the corpus plus the pad; max_len = longest + margin.
  static TokenVocabulary build(std::span<const std::string> corpus,
                               int margin = 1);

  // `symbols[i]` is the character with index i.
  TokenVocabulary(std::vector<char> symbols, int max_len);

  int size() const { return static_cast<int>(symbols_.size()); }
  int max_len() const { return max_len_; }
  char pad_char() const { return kPad; }
  int pad_index() const { return index_of(kPad); }

  // -1 when the character is not in the vocabulary.
  int index_of(char c) const { return index_[static_cast<unsigned char>(c)]; }
  char symbol(int index) const { return symbols_[index]; }
  const std::vector<char> &symbols() const { return symbols_; }

  // Text form: "smilesvocab v1 maxlen=<L>" then "<charcode>\t<index>" lines.
  std::string serialize() const;
  static TokenVocabulary deserialize(std::string_view text);

  void save(const std::filesystem::path &path) const;
  static TokenVocabulary load(const std::filesystem::path &path);

  // Hash of the serialized form; stored in model checkpoints.
  std::uint64_t fingerprint() const;

  friend bool operator==(const TokenVocabulary &a, const TokenVocabulary &b) {
    return a.symbols_ == b.symbols_ && a.max_len_ == b.max_len_;
  }

 private:
  std::vector<char> symbols_;
  std::array<int, 256> index_;
  int max_len_;
};

// max_len x V binary matrix, row-major.
struct OneHotSequence {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> matrix;
  std::string source;

  std::uint8_t at(int row, int col) const { return matrix[row * cols + col]; }

  // Hot column of every row; throws Error(kInvalidArgument) on a row that
  // is not exactly one-hot.
  std::vector<int> hot_indices() const;
};

OneHotSequence encode(const TokenVocabulary &vocab, std::string_view s);

// Inverse of encode with trailing pad characters removed.
std::string decode(const TokenVocabulary &vocab, const OneHotSequence &m);

}  // namespace smienum
