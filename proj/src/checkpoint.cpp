#include "smienum/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "smienum/error.hpp"

namespace smienum {

namespace {

constexpr char kMagic[8] = { 'S', 'M', 'I', 'E', 'N', 'U', 'M', 'M' };

class Writer {
 public:
  void u32(std::uint32_t v) { little(v, 4); }
  void u64(std::uint64_t v) { little(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string &s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void raw(const char *p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  void little(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i)
      out_ += static_cast<char>((v >> (8 * i)) & 0xff);
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) { }

  std::uint32_t u32() { return static_cast<std::uint32_t>(little(4)); }
  std::uint64_t u64() { return little(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto v = in_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n)
      throw Error(ErrorCode::kSchema, "checkpoint is truncated");
  }
  std::uint64_t little(int bytes) {
    need(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i]))
           << (8 * i);
    pos_ += bytes;
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<double> predict_strings(const Model &model,
                                    const TokenVocabulary &vocab,
                                    std::span<const std::string> smiles) {
  if (model.vocab_fingerprint != vocab.fingerprint())
    throw Error(ErrorCode::kVocabMismatch,
                "model was trained with a different vocabulary");
  const std::vector<double> zeros(smiles.size(), 0.0);
  const EncodedSet set = EncodedSet::from_strings(vocab, smiles, zeros);
  return predict(model.params, model.hp, set);
}

std::string serialize_model(const Model &model) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);

  const Hyperparams &hp = model.hp;
  w.u32(hp.num_lstm_layers);
  w.u32(hp.units);
  w.f64(hp.dropout_w);
  w.f64(hp.dropout_u);
  w.u32(hp.num_dense_hidden);
  w.u32(hp.dense_size);
  w.f64(hp.l1);
  w.f64(hp.l2);
  w.f64(hp.learning_rate);
  w.u32(hp.batch_size);
  w.u32(hp.epochs);
  w.u64(hp.seed);

  w.u32(model.params.input_size);
  w.u64(model.vocab_fingerprint);
  w.str(model.optimizer);

  LstmParams params = model.params;
  const auto tensors = params.tensors();
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto &t: tensors) {
    w.str(t.name);
    w.u32(static_cast<std::uint32_t>(t.shape.size()));
    for (std::int64_t d: t.shape) w.u64(static_cast<std::uint64_t>(d));
    // Row-major payload; Eigen storage is column-major.
    const std::int64_t rows = t.shape[0];
    const std::int64_t cols = t.shape.size() > 1 ? t.shape[1] : 1;
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < cols; ++c) w.f64(t.values(c * rows + r));
  }
  return w.take();
}

Model deserialize_model(std::string_view bytes) {
  Reader r(bytes);
  if (std::memcmp(r.raw(sizeof kMagic).data(), kMagic, sizeof kMagic) != 0)
    throw Error(ErrorCode::kSchema, "not a model checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::kSchema,
                "unsupported checkpoint version " + std::to_string(version));

  Model model;
  Hyperparams &hp = model.hp;
  hp.num_lstm_layers = static_cast<int>(r.u32());
  hp.units = static_cast<int>(r.u32());
  hp.dropout_w = r.f64();
  hp.dropout_u = r.f64();
  hp.num_dense_hidden = static_cast<int>(r.u32());
  hp.dense_size = static_cast<int>(r.u32());
  hp.l1 = r.f64();
  hp.l2 = r.f64();
  hp.learning_rate = r.f64();
  hp.batch_size = static_cast<int>(r.u32());
  hp.epochs = static_cast<int>(r.u32());
  hp.seed = r.u64();
  try {
    hp.validate();
  } catch (const Error &e) {
    throw Error(ErrorCode::kSchema, std::string("checkpoint: ") + e.what());
  }

  const int input_size = static_cast<int>(r.u32());
  model.vocab_fingerprint = r.u64();
  model.optimizer = r.str();

  // Shapes come from the hyperparameters; the file must agree with them.
  model.params = init_params(hp, input_size);
  auto tensors = model.params.tensors();
  if (r.u32() != tensors.size())
    throw Error(ErrorCode::kSchema, "checkpoint tensor count mismatch");
  for (auto &t: tensors) {
    if (r.str() != t.name)
      throw Error(ErrorCode::kSchema, "unexpected tensor, wanted " + t.name);
    if (r.u32() != t.shape.size())
      throw Error(ErrorCode::kSchema, "bad rank for " + t.name);
    for (std::int64_t d: t.shape) {
      if (r.u64() != static_cast<std::uint64_t>(d))
        throw Error(ErrorCode::kSchema, "bad shape for " + t.name);
    }
    const std::int64_t rows = t.shape[0];
    const std::int64_t cols = t.shape.size() > 1 ? t.shape[1] : 1;
    for (std::int64_t i = 0; i < rows; ++i)
      for (std::int64_t c = 0; c < cols; ++c) t.values(c * rows + i) = r.f64();
  }
  if (!r.done()) throw Error(ErrorCode::kSchema, "trailing bytes in checkpoint");
  if (!model.params.all_finite())
    throw Error(ErrorCode::kNumeric, "checkpoint holds non-finite values");
  return model;
}

void save_model(const std::filesystem::path &path, const Model &model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << serialize_model(model);
}

Model load_model(const std::filesystem::path &path,
                 const TokenVocabulary *vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Model model = deserialize_model(buffer.str());
  if (vocab && vocab->fingerprint() != model.vocab_fingerprint)
    throw Error(ErrorCode::kVocabMismatch,
                "vocabulary does not match the checkpoint");
  return model;
}

}  // namespace smienum
