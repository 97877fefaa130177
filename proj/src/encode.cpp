#include "smienum/encode.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "smienum/random.hpp"

namespace smienum {

namespace {

constexpr std::string_view kHeaderPrefix = "smilesvocab v1 maxlen=";

[[noreturn]] void schema_error(const std::string &message) {
  throw Error(ErrorCode::kSchema, "vocabulary: " + message);
}

int parse_int(std::string_view text, const char *what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    schema_error(std::string("malformed ") + what + " '" + std::string(text)
                 + "'");
  return value;
}

}  // namespace

TokenVocabulary TokenVocabulary::build(std::span<const std::string> corpus,
                                       int margin) {
  if (corpus.empty())
    throw Error(ErrorCode::kInvalidArgument, "cannot build vocabulary from an "
                                             "empty corpus");
  if (margin < 0)
    throw Error(ErrorCode::kInvalidArgument, "margin must be non-negative");
  std::set<unsigned char> chars = { static_cast<unsigned char>(kPad) };
  std::size_t longest = 0;
  for (const std::string &s: corpus) {
    longest = std::max(longest, s.size());
    chars.insert(s.begin(), s.end());
  }
  return TokenVocabulary(std::vector<char>(chars.begin(), chars.end()),
                         static_cast<int>(longest) + margin);
}

TokenVocabulary::TokenVocabulary(std::vector<char> symbols, int max_len)
    : symbols_(std::move(symbols)), max_len_(max_len) {
  index_.fill(-1);
  if (max_len_ <= 0)
    throw Error(ErrorCode::kInvalidArgument, "max_len must be positive");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    int &slot = index_[static_cast<unsigned char>(symbols_[i])];
    if (slot >= 0)
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("duplicate vocabulary character '")
                      + symbols_[i] + "'");
    slot = static_cast<int>(i);
  }
  if (index_of(kPad) < 0)
    throw Error(ErrorCode::kInvalidArgument,
                "vocabulary lacks the pad character");
}

std::string TokenVocabulary::serialize() const {
  std::string out(kHeaderPrefix);
  out += std::to_string(max_len_);
  out += '\n';
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    out += std::to_string(static_cast<unsigned char>(symbols_[i]));
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

TokenVocabulary TokenVocabulary::deserialize(std::string_view text) {
  std::istringstream in { std::string(text) };
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kHeaderPrefix))
    schema_error("missing 'smilesvocab v1' header");
  const int max_len =
      parse_int(std::string_view(line).substr(kHeaderPrefix.size()), "maxlen");

  std::vector<std::pair<int, int>> entries;  // (index, code)
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) schema_error("entry without a tab");
    const std::string_view view(line);
    const int code = parse_int(view.substr(0, tab), "character code");
    const int index = parse_int(view.substr(tab + 1), "index");
    if (code < 0 || code > 255) schema_error("character code out of range");
    entries.emplace_back(index, code);
  }
  std::sort(entries.begin(), entries.end());
  std::vector<char> symbols;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first != static_cast<int>(i))
      schema_error("indices are not dense");
    symbols.push_back(static_cast<char>(entries[i].second));
  }
  try {
    return TokenVocabulary(std::move(symbols), max_len);
  } catch (const Error &e) {
    schema_error(e.what());
  }
}

void TokenVocabulary::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << serialize();
}

TokenVocabulary TokenVocabulary::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

std::uint64_t TokenVocabulary::fingerprint() const {
  return stable_hash(serialize());
}

std::vector<int> OneHotSequence::hot_indices() const {
  std::vector<int> hot(rows);
  for (int r = 0; r < rows; ++r) {
    int found = -1;
    for (int c = 0; c < cols; ++c) {
      if (at(r, c) == 0) continue;
      if (at(r, c) != 1 || found >= 0)
        throw Error(ErrorCode::kInvalidArgument,
                    "row " + std::to_string(r) + " is not one-hot");
      found = c;
    }
    if (found < 0)
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(r) + " is not one-hot");
    hot[r] = found;
  }
  return hot;
}

OneHotSequence encode(const TokenVocabulary &vocab, std::string_view s) {
  if (s.size() > static_cast<std::size_t>(vocab.max_len()))
    throw LengthError(s.size(), vocab.max_len());
  OneHotSequence seq;
  seq.rows = vocab.max_len();
  seq.cols = vocab.size();
  seq.matrix.assign(static_cast<std::size_t>(seq.rows) * seq.cols, 0);
  seq.source = std::string(s);
  const int pad = vocab.pad_index();
  for (int t = 0; t < seq.rows; ++t) {
    int col = pad;
    if (t < static_cast<int>(s.size())) {
      col = vocab.index_of(s[t]);
      if (col < 0) throw UnknownTokenError(t, s[t]);
    }
    seq.matrix[static_cast<std::size_t>(t) * seq.cols + col] = 1;
  }
  return seq;
}

std::string decode(const TokenVocabulary &vocab, const OneHotSequence &m) {
  if (m.cols != vocab.size())
    throw Error(ErrorCode::kVocabMismatch,
                "matrix width does not match vocabulary size");
  std::string out;
  for (int idx: m.hot_indices())
    out += vocab.symbol(idx);
  const auto end = out.find_last_not_of(vocab.pad_char());
  out.erase(end == std::string::npos ? 0 : end + 1);
  return out;
}

}  // namespace smienum
