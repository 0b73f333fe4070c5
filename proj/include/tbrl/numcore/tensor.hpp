#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbrl/errors.hpp"
#include "tbrl/rng.hpp"

namespace tbrl::num {

// Row-major double precision throughout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

template <class Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, std::string_view what) {
  if (!m.allFinite()) throw NumericFault("non-finite value in " + std::string(what));
}

inline void require_shape(bool ok, std::string_view what) {
  if (!ok) throw DimensionMismatch("shape mismatch in " + std::string(what));
}

// A trainable tensor with its gradient and Adam moment buffers. Vectors are
// stored as n x 1.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;

  Param() = default;
  Param(std::string param_name, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(param_name)),
        value(Matrix::Zero(rows, cols)),
        grad(Matrix::Zero(rows, cols)),
        m(Matrix::Zero(rows, cols)),
        v(Matrix::Zero(rows, cols)) {}

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }
  Eigen::Index size() const { return value.size(); }

  auto col() { return value.col(0); }
  auto col() const { return value.col(0); }

  void zero_grad() { grad.setZero(); }
  void reset_moments() {
    m.setZero();
    v.setZero();
  }
};

// Ordered, named view over parameters owned by model structs. The view holds
// pointers, so rebuild it after copying or moving the owning model.
class ParamSet {
 public:
  ParamSet() = default;

  void add(Param& p) { params_.push_back(&p); }

  void append(const ParamSet& other) {
    params_.insert(params_.end(), other.params_.begin(), other.params_.end());
  }

  Param& at(std::string_view name) const {
    for (Param* p : params_) {
      if (p->name == name) return *p;
    }
    throw Error("no parameter named " + std::string(name));
  }

  bool contains(std::string_view name) const {
    for (const Param* p : params_) {
      if (p->name == name) return true;
    }
    return false;
  }

  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const Param* p : params_) n += static_cast<std::size_t>(p->size());
    return n;
  }

  void zero_grad() const {
    for (Param* p : params_) p->zero_grad();
  }

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Param*> params_;
};

// Glorot/Xavier uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
inline void glorot_uniform(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
  }
}

inline double cosine(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

}  // namespace tbrl::num
