#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tbrl/numcore/tensor.hpp"

namespace tbrl::num {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

// Central-difference check of every coordinate in `params`.
// `loss_and_grads` must zero the gradients, return the scalar loss and leave
// the analytic gradient in each Param::grad. It is called 2N + 1 times.
inline GradCheckReport grad_check(const std::function<double()>& loss_and_grads,
                                  const ParamSet& params, double eps = 1e-5) {
  loss_and_grads();
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (const Param* p : params) analytic.push_back(p->grad);

  GradCheckReport report;
  std::size_t k = 0;
  for (Param* p : params) {
    for (Eigen::Index i = 0; i < p->size(); ++i) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + eps;
      const double up = loss_and_grads();
      x = saved - eps;
      const double down = loss_and_grads();
      x = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k].data()[i];
      const double err = relative_error(a, numeric);
      ++report.coordinates;
      if (report.worst_index < 0 || err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = p->name;
        report.worst_index = i;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
    ++k;
  }
  // Leave the analytic gradient in place for callers that inspect it.
  k = 0;
  for (Param* p : params) p->grad = analytic[k++];
  return report;
}

}  // namespace tbrl::num
