#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "tbrl/errors.hpp"
#include "tbrl/numcore/tensor.hpp"
#include "tbrl/textenc/embedding.hpp"

namespace tbrl::lab {

struct Projection {
  num::Matrix coords;  // n x 2
  bool degenerate = false;
};

// Mean-centred PCA onto the top two principal directions. Each direction's
// sign is fixed so that its largest-magnitude loading is positive.
inline Projection project_2d(const num::Matrix& vectors) {
  if (vectors.rows() < 3) throw DomainError("project_2d needs at least 3 vectors");
  if (vectors.cols() < 1) throw DomainError("project_2d needs non-empty vectors");
  num::require_finite(vectors, "project_2d");
  Projection p;
  p.coords = num::Matrix::Zero(vectors.rows(), 2);
  num::Matrix centered = vectors;
  centered.rowwise() -= vectors.colwise().mean();
  if (centered.isZero(0.0)) {
    p.degenerate = true;
    return p;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(centered), Eigen::ComputeThinV);
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::Index k = std::min<Eigen::Index>(2, v.cols());
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.rows(); ++i) {
      if (std::abs(v(i, c)) > std::abs(v(best, c))) best = i;
    }
    if (v(best, c) < 0.0) v.col(c) = -v.col(c);
    p.coords.col(c) = centered * v.col(c);
  }
  return p;
}

inline void write_projection_csv(std::ostream& out, const std::vector<std::string>& labels,
                                 const Projection& p) {
  if (static_cast<Eigen::Index>(labels.size()) != p.coords.rows()) {
    throw DimensionMismatch("one label per projected vector");
  }
  out << "label,x,y\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << labels[i] << ',' << text::format_double(p.coords(r, 0)) << ','
        << text::format_double(p.coords(r, 1)) << '\n';
  }
}

}  // namespace tbrl::lab
