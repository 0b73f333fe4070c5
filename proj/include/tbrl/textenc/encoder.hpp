#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tbrl/errors.hpp"
#include "tbrl/numcore/layers.hpp"
#include "tbrl/textenc/embedding.hpp"
#include "tbrl/textenc/hash.hpp"
#include "tbrl/textenc/tokenize.hpp"

namespace tbrl::text {

enum class EncoderKind { hash, embedding_frozen, embedding_finetuned };

inline std::string_view to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::hash: return "hash";
    case EncoderKind::embedding_frozen: return "embedding_frozen";
    case EncoderKind::embedding_finetuned: return "embedding_finetuned";
  }
  return "hash";
}

inline EncoderKind parse_encoder_kind(std::string_view s) {
  if (s == "hash") return EncoderKind::hash;
  if (s == "embedding_frozen") return EncoderKind::embedding_frozen;
  if (s == "embedding_finetuned") return EncoderKind::embedding_finetuned;
  throw ConfigError("unknown encoder '" + std::string(s) + "'");
}

// Final hidden state of the GRU run over the columns of x, from h_0 = 0.
inline num::Vector gru_encode(const num::Matrix& x, const num::GruParams& gru,
                              num::GruSequenceCache* cache = nullptr) {
  if (x.cols() > 0 && x.rows() != gru.input_size()) {
    throw DimensionMismatch("gru_encode: input has " + std::to_string(x.rows()) +
                            " rows, GRU expects " + std::to_string(gru.input_size()));
  }
  return num::gru_sequence_forward(gru, x, cache);
}

struct EncoderParams {
  EmbeddingTable embedding;
  num::GruParams gru;
  bool frozen = true;

  num::ParamSet parameters() {
    num::ParamSet set;
    set.add(embedding.matrix());
    gru.visit([&](num::Param& p) { set.add(p); });
    return set;
  }
};

struct EncodeTrace {
  std::vector<int> rows;
  num::GruSequenceCache gru;
};

// f(text): either a salted whole-string hash, or embeddings run through a GRU.
class TextEncoder {
 public:
  static TextEncoder hash(int dim, std::uint64_t salt = 0) {
    if (dim < 1) throw ConfigError("hash encoder needs dim >= 1");
    TextEncoder e;
    e.kind_ = EncoderKind::hash;
    e.dim_ = dim;
    e.salt_ = salt;
    return e;
  }

  // update_gate_bias initialises bz; a negative value keeps the update gate
  // mostly shut so early tokens survive to the final state.
  static TextEncoder embedding(EmbeddingTable table, int hidden, bool frozen, std::uint64_t init_seed,
                               double update_gate_bias = 0.0) {
    if (hidden < 1) throw ConfigError("embedding encoder needs hidden >= 1");
    TextEncoder e;
    e.kind_ = frozen ? EncoderKind::embedding_frozen : EncoderKind::embedding_finetuned;
    e.dim_ = hidden;
    const int d = table.dim();
    EncoderParams p{std::move(table), num::GruParams(d, hidden, "encoder.gru"), frozen};
    Rng rng(init_seed);
    p.gru.init_glorot(rng);
    p.gru.bz.value.setConstant(update_gate_bias);
    e.params_ = std::move(p);
    return e;
  }

  EncoderKind kind() const { return kind_; }
  int output_dim() const { return dim_; }
  bool trainable() const { return params_.has_value() && !params_->frozen; }

  EncoderParams* params() { return params_ ? &*params_ : nullptr; }
  const EncoderParams* params() const { return params_ ? &*params_ : nullptr; }

  num::Vector encode(std::string_view text) const {
    if (!params_) return hash_encode(text, dim_, salt_);
    const auto rows = token_rows(tokenize(text), params_->embedding);
    return gru_encode(embed_rows(rows, params_->embedding), params_->gru);
  }

  // Same value as encode(text), keeping what backward() needs.
  num::Vector encode(std::string_view text, EncodeTrace& trace) const {
    if (!params_) return hash_encode(text, dim_, salt_);
    trace.rows = token_rows(tokenize(text), params_->embedding);
    return gru_encode(embed_rows(trace.rows, params_->embedding), params_->gru, &trace.gru);
  }

  // Accumulates d(loss)/d(params) given d(loss)/d(f(text)).
  void backward(const EncodeTrace& trace, const num::Vector& dh) {
    if (!trainable()) return;
    const num::Matrix dx = num::gru_sequence_backward(params_->gru, trace.gru, dh, true);
    num::Matrix& g = params_->embedding.matrix().grad;
    for (std::size_t t = 0; t < trace.rows.size(); ++t) {
      g.row(trace.rows[t]) += dx.col(static_cast<Eigen::Index>(t)).transpose();
    }
  }

  // Trainable parameters only; empty for hash and frozen encoders.
  num::ParamSet trainable_parameters() {
    return trainable() ? params_->parameters() : num::ParamSet{};
  }

  // Every parameter the encoder owns, trainable or not.
  num::ParamSet parameters() { return params_ ? params_->parameters() : num::ParamSet{}; }

 private:
  TextEncoder() = default;

  EncoderKind kind_ = EncoderKind::hash;
  int dim_ = 0;
  std::uint64_t salt_ = 0;
  std::optional<EncoderParams> params_;
};

}  // namespace tbrl::text
