#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"

using namespace tbrl;
using namespace tbrl::text;
using num::Matrix;
using num::Vector;

namespace {

std::vector<std::string> toks(std::string_view s) { return tokenize(s).tokens(); }

EmbeddingTable small_table() {
  Matrix m(3, 4);
  m << 1, 0, 0, 0,
       0, 2, 0, 0,
       0, 0, 3, 1;
  return EmbeddingTable({"kitchen", "fridge", "apple"}, m);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST(Tokenize, Examples) {
  EXPECT_EQ(toks("You've entered a kitchen."),
            (std::vector<std::string>{"you", "ve", "entered", "a", "kitchen"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("  ,.!  ").empty());
  EXPECT_EQ(tokenize("Open fridge"), tokenize("open fridge"));
  EXPECT_EQ(toks("take apple,from  table"), (std::vector<std::string>{"take", "apple", "from", "table"}));
}

TEST(Hash, DeterministicUnitAndCaseFolded) {
  const Vector a = hash_encode("kitchen", 64);
  EXPECT_EQ(a, hash_encode("kitchen", 64));
  EXPECT_EQ(a, hash_encode("Kitchen", 64));
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  EXPECT_NE(a, hash_encode("kitchen", 64, 1));
  EXPECT_NE(a, hash_encode("kitchens", 64));
  EXPECT_THROW(hash_encode("x", 0), DomainError);
}

TEST(Hash, CarriesNoSynonymStructure) {
  // Welch two-sample statistic on |cos| of synonym pairs against pairs drawn
  // across different concepts.
  std::vector<double> syn, rnd;
  const auto& concepts = fixtures::pool().concepts();
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& c = concepts[i];
    const auto& other = concepts[(i + 7) % concepts.size()];
    syn.push_back(std::abs(num::cosine(hash_encode(c.surface_names_id[0], 64), hash_encode(c.surface_names_ood[0], 64))));
    rnd.push_back(std::abs(num::cosine(hash_encode(c.surface_names_id[0], 64), hash_encode(other.surface_names_ood[0], 64))));
  }
  auto stats = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / static_cast<double>(v.size() - 1)};
  };
  const auto [m1, v1] = stats(syn);
  const auto [m2, v2] = stats(rnd);
  const double t = (m1 - m2) / std::sqrt(v1 / static_cast<double>(syn.size()) + v2 / static_cast<double>(rnd.size()));
  EXPECT_LT(std::abs(t), 2.5);
  EXPECT_LT(m1, 0.2);
}

TEST(Embedding, ParseAddsMeanUnkRow) {
  std::istringstream in("a 1 2 3 4\nb 3 2 1 0\nc 2 2 2 2\n");
  const EmbeddingTable t = parse_embeddings(in);
  EXPECT_EQ(t.size(), 4u);
  EXPECT_EQ(t.dim(), 4);
  EXPECT_EQ(t.vector("zebra"), Vector::Constant(4, 2.0));
  EXPECT_EQ(t.index("zebra"), t.unk_row());
  EXPECT_EQ(t.snapshot(), t.matrix().value);
}

TEST(Embedding, ParseErrors) {
  std::istringstream mixed("a 1 2 3\nb 1 2\n");
  EXPECT_THROW(parse_embeddings(mixed), DimensionMismatch);
  std::istringstream bad("a 1 2\nb 1 x\n");
  try {
    parse_embeddings(bad);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream empty("");
  EXPECT_THROW(parse_embeddings(empty), EmptyInput);
}

TEST(Embedding, WriteThenLoadIsBitIdentical) {
  const EmbeddingTable t = synth_pretrain(fixtures::pool(), 50, 3);
  const auto dir = fixtures::scratch_dir("emb_roundtrip");
  save_embedding_file(t, dir / "e.txt");
  const EmbeddingTable back = load_embedding_file(dir / "e.txt");
  EXPECT_EQ(back.tokens(), t.tokens());
  EXPECT_EQ(back.matrix().value, t.matrix().value);
  EXPECT_EQ(back.unk_row(), t.unk_row());
}

TEST(SynthPretrain, SynonymsCloserThanOtherConcepts) {
  const EmbeddingTable t = synth_pretrain(fixtures::pool(), 50, 7);
  const auto& concepts = fixtures::pool().concepts();
  for (const auto& c : concepts) {
    for (const auto& id_name : c.surface_names_id) {
      for (const auto& ood_name : c.surface_names_ood) {
        const double same = num::cosine(t.vector(id_name), t.vector(ood_name));
        for (const auto& other : concepts) {
          if (other.id == c.id) continue;
          for (const auto& n : other.surface_names_id) EXPECT_GT(same, num::cosine(t.vector(id_name), t.vector(n)));
          for (const auto& n : other.surface_names_ood) EXPECT_GT(same, num::cosine(t.vector(id_name), t.vector(n)));
        }
      }
    }
  }
}

TEST(SynthPretrain, DeterministicUnitRowsCoveringVocabulary) {
  const EmbeddingTable a = synth_pretrain(fixtures::pool(), 50, 7);
  const EmbeddingTable b = synth_pretrain(fixtures::pool(), 50, 7);
  EXPECT_EQ(a.tokens(), b.tokens());
  EXPECT_EQ(a.matrix().value, b.matrix().value);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<int>(i) == a.unk_row()) continue;
    EXPECT_NEAR(a.row(static_cast<int>(i)).norm(), 1.0, 1e-6);
  }
  for (const auto& w : engine::template_vocabulary()) EXPECT_TRUE(a.contains(w)) << w;
  for (const auto& r : fixtures::pool().rooms()) EXPECT_TRUE(a.contains(r)) << r;
  EXPECT_NE(a.matrix().value, synth_pretrain(fixtures::pool(), 50, 8).matrix().value);
  EXPECT_THROW(synth_pretrain(fixtures::pool(), 1, 7), DomainError);
}

TEST(EmbedSequence, LookupAndUnk) {
  const EmbeddingTable t = small_table();
  EXPECT_EQ(embed_sequence(tokenize(""), t).cols(), 0);
  const Matrix one = embed_sequence(tokenize("Kitchen"), t);
  ASSERT_EQ(one.cols(), 1);
  EXPECT_EQ(Vector(one.col(0)), t.vector("kitchen"));
  const Matrix unk = embed_sequence(tokenize("walrus"), t);
  EXPECT_EQ(Vector(unk.col(0)), t.row(t.unk_row()));
}

TEST(GruEncode, ZeroWeightsGiveZero) {
  num::GruParams p(4, 3, "g");
  const Matrix x = Matrix::Ones(4, 5);
  EXPECT_TRUE(gru_encode(x, p).isZero(0.0));
  EXPECT_TRUE(gru_encode(Matrix(4, 0), p).isZero(0.0));
  EXPECT_THROW(gru_encode(Matrix::Ones(3, 2), p), DimensionMismatch);
}

TEST(GruEncode, SingleStepMatchesHandArithmetic) {
  num::GruParams p(1, 2, "g");
  p.Wz.value << 0.5, -1.0;
  p.Wr.value << 0.3, 0.2;
  p.Wh.value << 1.0, 2.0;
  p.bz.value << 0.1, 0.0;
  p.bh.value << 0.0, -0.5;
  const double x = 0.8;
  // h0 = 0, so the reset gate and U matrices drop out.
  const double z0 = sigmoid(0.5 * x + 0.1), z1 = sigmoid(-1.0 * x);
  const double c0 = std::tanh(1.0 * x), c1 = std::tanh(2.0 * x - 0.5);
  const Vector h = gru_encode(Matrix::Constant(1, 1, x), p);
  EXPECT_NEAR(h(0), z0 * c0, 1e-15);
  EXPECT_NEAR(h(1), z1 * c1, 1e-15);
}

TEST(GruEncode, WeightGradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    num::GruParams p(4, 3, "g");
    p.init_glorot(rng);
    p.visit([&](num::Param& q) { q.value.array() += 0.1; });
    Matrix x(4, 6);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
    const Vector w = Vector::LinSpaced(3, -1.0, 1.5);
    num::ParamSet ps;
    p.visit([&](num::Param& q) { ps.add(q); });
    auto fn = [&] {
      ps.zero_grad();
      num::GruSequenceCache cache;
      const Vector h = gru_encode(x, p, &cache);
      num::gru_sequence_backward(p, cache, w, false);
      return w.dot(h);
    };
    EXPECT_LT(num::grad_check(fn, ps).max_rel_error, 1e-4) << "seed " << seed;
  }
}

TEST(Encoder, EmbeddingEncodeIsPure) {
  const TextEncoder e = TextEncoder::embedding(synth_pretrain(fixtures::pool(), 8, 1), 6, false, 3);
  const Vector a = e.encode("You've entered a kitchen.");
  EncodeTrace trace;
  EXPECT_EQ(a, e.encode("you ve entered a kitchen", trace));
  EXPECT_EQ(a, e.encode("You've entered a kitchen."));
  EXPECT_EQ(a.size(), 6);
  EXPECT_EQ(trace.rows.size(), 5u);
}

TEST(Encoder, KindsAndTrainability) {
  EXPECT_FALSE(TextEncoder::hash(16).trainable());
  auto frozen = TextEncoder::embedding(small_table(), 4, true, 1);
  auto tuned = TextEncoder::embedding(small_table(), 4, false, 1);
  EXPECT_EQ(frozen.kind(), EncoderKind::embedding_frozen);
  EXPECT_EQ(tuned.kind(), EncoderKind::embedding_finetuned);
  EXPECT_TRUE(frozen.trainable_parameters().empty());
  EXPECT_EQ(tuned.trainable_parameters().size(), 10u);
  EXPECT_EQ(parse_encoder_kind(to_string(EncoderKind::embedding_finetuned)), EncoderKind::embedding_finetuned);
  EXPECT_THROW(parse_encoder_kind("bert"), ConfigError);
}

TEST(Encoder, UpdateGateBiasIsApplied) {
  auto e = TextEncoder::embedding(small_table(), 4, true, 1, -2.0);
  EXPECT_TRUE(e.params()->gru.bz.value.isConstant(-2.0));
  EXPECT_TRUE(e.params()->gru.br.value.isZero(0.0));
}

TEST(Drift, Examples) {
  EmbeddingTable t = small_table();
  for (const auto& [tok, d] : embedding_drift(t)) {
    EXPECT_EQ(d.distance, 0.0) << tok;
    EXPECT_FALSE(d.degenerate);
  }
  t.matrix().value.row(t.index("fridge")) *= -1.0;
  t.matrix().value.row(t.index("apple")).setZero();
  const auto drift = embedding_drift(t);
  EXPECT_NEAR(drift.at("fridge").distance, 2.0, 1e-15);
  EXPECT_TRUE(drift.at("apple").degenerate);
  EXPECT_EQ(drift.at("kitchen").distance, 0.0);
}

TEST(Drift, CosineDistance) {
  const Vector a = (Vector(2) << 1, 0).finished();
  const Vector b = (Vector(2) << 0, 3).finished();
  EXPECT_NEAR(cosine_distance(a, b), 1.0, 1e-15);
  EXPECT_NEAR(cosine_distance(a, 2.0 * a), 0.0, 1e-15);
}
