#pragma once

#include <string>

#include "tbrl/numcore/tensor.hpp"

namespace tbrl::num {

// ---------------------------------------------------------------------------
// Linear layer: y = W x + b, applied column-wise to a batch x (in x B).
// ---------------------------------------------------------------------------

struct LinearParams {
  Param W;
  Param b;

  LinearParams() = default;
  LinearParams(int in, int out, const std::string& prefix)
      : W(prefix + ".W", out, in), b(prefix + ".b", out, 1) {}

  int input_size() const { return static_cast<int>(W.cols()); }
  int output_size() const { return static_cast<int>(W.rows()); }

  template <class F>
  void visit(F&& f) {
    f(W);
    f(b);
  }
  template <class F>
  void visit(F&& f) const {
    f(W);
    f(b);
  }

  void init_glorot(Rng& rng) {
    glorot_uniform(W.value, rng);
    b.value.setZero();
  }
};

struct LinearCache {
  Matrix x;
  Matrix w;
};

struct LinearGrads {
  Matrix dx;
  Matrix dW;
  Vector db;
};

inline Matrix linear_forward(const Matrix& x, const Matrix& W, const Matrix& b,
                             LinearCache* cache = nullptr) {
  require_shape(W.cols() == x.rows() && b.rows() == W.rows() && b.cols() == 1,
                "linear_forward");
  Matrix y = W * x;
  y.colwise() += b.col(0);
  require_finite(y, "linear_forward");
  if (cache != nullptr) {
    cache->x = x;
    cache->w = W;
  }
  return y;
}

inline LinearGrads linear_backward(const Matrix& dy, const LinearCache& cache) {
  require_shape(dy.rows() == cache.w.rows() && dy.cols() == cache.x.cols(), "linear_backward");
  LinearGrads g;
  g.dW = dy * cache.x.transpose();
  g.db = dy.rowwise().sum();
  g.dx = cache.w.transpose() * dy;
  return g;
}

// ---------------------------------------------------------------------------
// GRU
//   z  = sigmoid(Wz x + Uz h + bz)
//   r  = sigmoid(Wr x + Ur h + br)
//   h~ = tanh(Wh x + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * h~
// ---------------------------------------------------------------------------

struct GruParams {
  Param Wz, Wr, Wh;
  Param Uz, Ur, Uh;
  Param bz, br, bh;

  GruParams() = default;
  GruParams(int input, int hidden, const std::string& prefix)
      : Wz(prefix + ".Wz", hidden, input),
        Wr(prefix + ".Wr", hidden, input),
        Wh(prefix + ".Wh", hidden, input),
        Uz(prefix + ".Uz", hidden, hidden),
        Ur(prefix + ".Ur", hidden, hidden),
        Uh(prefix + ".Uh", hidden, hidden),
        bz(prefix + ".bz", hidden, 1),
        br(prefix + ".br", hidden, 1),
        bh(prefix + ".bh", hidden, 1) {}

  int input_size() const { return static_cast<int>(Wz.cols()); }
  int hidden_size() const { return static_cast<int>(Wz.rows()); }

  template <class F>
  void visit(F&& f) {
    f(Wz), f(Wr), f(Wh), f(Uz), f(Ur), f(Uh), f(bz), f(br), f(bh);
  }
  template <class F>
  void visit(F&& f) const {
    f(Wz), f(Wr), f(Wh), f(Uz), f(Ur), f(Uh), f(bz), f(br), f(bh);
  }

  // Weights Glorot-uniform, biases zero.
  void init_glorot(Rng& rng) {
    for (Param* w : {&Wz, &Wr, &Wh, &Uz, &Ur, &Uh}) glorot_uniform(w->value, rng);
    for (Param* b : {&bz, &br, &bh}) b->value.setZero();
  }
};

inline Vector sigmoid(const Vector& a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

struct GruCellCache {
  Vector x;
  Vector h_prev;
  Vector z;
  Vector r;
  Vector h_cand;
};

inline Vector gru_cell_forward(const GruParams& p, const Vector& x, const Vector& h_prev,
                               GruCellCache* cache = nullptr) {
  require_shape(x.size() == p.input_size() && h_prev.size() == p.hidden_size(),
                "gru_cell_forward");
  Vector z = sigmoid(p.Wz.value * x + p.Uz.value * h_prev + p.bz.col());
  Vector r = sigmoid(p.Wr.value * x + p.Ur.value * h_prev + p.br.col());
  Vector h_cand =
      (p.Wh.value * x + p.Uh.value * r.cwiseProduct(h_prev) + p.bh.col()).array().tanh().matrix();
  Vector h = (1.0 - z.array()).matrix().cwiseProduct(h_prev) + z.cwiseProduct(h_cand);
  require_finite(h, "gru_cell_forward");
  if (cache != nullptr) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->h_cand = std::move(h_cand);
  }
  return h;
}

struct GruCellGrads {
  Vector dx;
  Vector dh_prev;
};

// Accumulates parameter gradients into p.*.grad and returns input gradients.
inline GruCellGrads gru_cell_backward(GruParams& p, const GruCellCache& c, const Vector& dh) {
  require_shape(dh.size() == p.hidden_size() && c.z.size() == dh.size(), "gru_cell_backward");
  const Vector dz = dh.cwiseProduct(c.h_cand - c.h_prev);
  const Vector dh_cand = dh.cwiseProduct(c.z);
  Vector dh_prev = dh.cwiseProduct((1.0 - c.z.array()).matrix());

  const Vector da_h = dh_cand.cwiseProduct((1.0 - c.h_cand.array().square()).matrix());
  const Vector rh = c.r.cwiseProduct(c.h_prev);
  p.Wh.grad.noalias() += da_h * c.x.transpose();
  p.Uh.grad.noalias() += da_h * rh.transpose();
  p.bh.grad.col(0) += da_h;

  const Vector drh = p.Uh.value.transpose() * da_h;
  dh_prev += drh.cwiseProduct(c.r);
  const Vector da_r =
      drh.cwiseProduct(c.h_prev).cwiseProduct(c.r.cwiseProduct((1.0 - c.r.array()).matrix()));
  p.Wr.grad.noalias() += da_r * c.x.transpose();
  p.Ur.grad.noalias() += da_r * c.h_prev.transpose();
  p.br.grad.col(0) += da_r;
  dh_prev.noalias() += p.Ur.value.transpose() * da_r;

  const Vector da_z = dz.cwiseProduct(c.z.cwiseProduct((1.0 - c.z.array()).matrix()));
  p.Wz.grad.noalias() += da_z * c.x.transpose();
  p.Uz.grad.noalias() += da_z * c.h_prev.transpose();
  p.bz.grad.col(0) += da_z;
  dh_prev.noalias() += p.Uz.value.transpose() * da_z;

  GruCellGrads g;
  g.dx = p.Wz.value.transpose() * da_z + p.Wr.value.transpose() * da_r +
         p.Wh.value.transpose() * da_h;
  g.dh_prev = std::move(dh_prev);
  return g;
}

// Whole-sequence GRU from h_0 = 0. Input projections for all steps are done as
// one product per gate; the recurrence is the same arithmetic as the cell.
struct GruSequenceCache {
  Matrix x;       // input x T
  Matrix h;       // hidden x (T + 1), column 0 is h_0
  Matrix z;       // hidden x T
  Matrix r;       // hidden x T
  Matrix h_cand;  // hidden x T
};

inline Vector gru_sequence_forward(const GruParams& p, const Matrix& x,
                                   GruSequenceCache* cache = nullptr) {
  const Eigen::Index hidden = p.hidden_size();
  const Eigen::Index steps = x.cols();
  Vector h = Vector::Zero(hidden);
  if (cache != nullptr) {
    cache->x = x;
    cache->h.resize(hidden, steps + 1);
    cache->h.col(0) = h;
    cache->z.resize(hidden, steps);
    cache->r.resize(hidden, steps);
    cache->h_cand.resize(hidden, steps);
  }
  if (steps == 0) return h;
  require_shape(x.rows() == p.input_size(), "gru_sequence_forward");

  Matrix az = p.Wz.value * x;
  Matrix ar = p.Wr.value * x;
  Matrix ah = p.Wh.value * x;
  az.colwise() += p.bz.col();
  ar.colwise() += p.br.col();
  ah.colwise() += p.bh.col();

  for (Eigen::Index t = 0; t < steps; ++t) {
    const Vector z = sigmoid(az.col(t) + p.Uz.value * h);
    const Vector r = sigmoid(ar.col(t) + p.Ur.value * h);
    const Vector h_cand = (ah.col(t) + p.Uh.value * r.cwiseProduct(h)).array().tanh().matrix();
    Vector next = (1.0 - z.array()).matrix().cwiseProduct(h) + z.cwiseProduct(h_cand);
    if (cache != nullptr) {
      cache->z.col(t) = z;
      cache->r.col(t) = r;
      cache->h_cand.col(t) = h_cand;
      cache->h.col(t + 1) = next;
    }
    h = std::move(next);
  }
  require_finite(h, "gru_sequence_forward");
  return h;
}

// Backpropagation through time. Accumulates parameter gradients; returns the
// input gradient (input x T) when want_dx is set, else an empty matrix.
inline Matrix gru_sequence_backward(GruParams& p, const GruSequenceCache& c, const Vector& dh_final,
                                    bool want_dx) {
  const Eigen::Index hidden = p.hidden_size();
  const Eigen::Index steps = c.x.cols();
  require_shape(dh_final.size() == hidden, "gru_sequence_backward");
  if (steps == 0) return want_dx ? Matrix(p.input_size(), 0) : Matrix();

  Matrix da_z(hidden, steps);
  Matrix da_r(hidden, steps);
  Matrix da_h(hidden, steps);
  Matrix rh(hidden, steps);

  Vector dh = dh_final;
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Vector h_prev = c.h.col(t);
    const Vector z = c.z.col(t);
    const Vector r = c.r.col(t);
    const Vector h_cand = c.h_cand.col(t);

    const Vector dz = dh.cwiseProduct(h_cand - h_prev);
    Vector dh_prev = dh.cwiseProduct((1.0 - z.array()).matrix());
    const Vector a_h = dh.cwiseProduct(z).cwiseProduct((1.0 - h_cand.array().square()).matrix());
    const Vector drh = p.Uh.value.transpose() * a_h;
    dh_prev += drh.cwiseProduct(r);
    const Vector a_r =
        drh.cwiseProduct(h_prev).cwiseProduct(r.cwiseProduct((1.0 - r.array()).matrix()));
    dh_prev.noalias() += p.Ur.value.transpose() * a_r;
    const Vector a_z = dz.cwiseProduct(z.cwiseProduct((1.0 - z.array()).matrix()));
    dh_prev.noalias() += p.Uz.value.transpose() * a_z;

    da_z.col(t) = a_z;
    da_r.col(t) = a_r;
    da_h.col(t) = a_h;
    rh.col(t) = r.cwiseProduct(h_prev);
    dh = std::move(dh_prev);
  }

  const auto h_prev_all = c.h.leftCols(steps);
  p.Wz.grad.noalias() += da_z * c.x.transpose();
  p.Wr.grad.noalias() += da_r * c.x.transpose();
  p.Wh.grad.noalias() += da_h * c.x.transpose();
  p.Uz.grad.noalias() += da_z * h_prev_all.transpose();
  p.Ur.grad.noalias() += da_r * h_prev_all.transpose();
  p.Uh.grad.noalias() += da_h * rh.transpose();
  p.bz.grad.col(0) += da_z.rowwise().sum();
  p.br.grad.col(0) += da_r.rowwise().sum();
  p.bh.grad.col(0) += da_h.rowwise().sum();

  if (!want_dx) return Matrix();
  Matrix dx = p.Wz.value.transpose() * da_z;
  dx.noalias() += p.Wr.value.transpose() * da_r;
  dx.noalias() += p.Wh.value.transpose() * da_h;
  return dx;
}

// ---------------------------------------------------------------------------
// Softmax and TD loss
// ---------------------------------------------------------------------------

inline Vector softmax(const Vector& logits) {
  if (logits.size() == 0) throw EmptyInput("softmax of an empty vector");
  require_finite(logits, "softmax");
  const Vector e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

struct TdLoss {
  double loss;
  double dq;
};

// (target - q)^2; the target is a constant, so only dq is returned.
inline TdLoss squared_td_loss(double q, double target) {
  const double diff = target - q;
  return {diff * diff, -2.0 * diff};
}

}  // namespace tbrl::num
