#pragma once

#include <cstdint>
#include <string_view>

#include "tbrl/numcore/tensor.hpp"
#include "tbrl/rng.hpp"
#include "tbrl/textenc/tokenize.hpp"

namespace tbrl::text {

// The whole lowercased string picks a PRNG stream; the vector is `dim`
// uniform(-1, 1) draws scaled to unit length.
inline num::Vector hash_encode(std::string_view text, int dim, std::uint64_t salt = 0) {
  if (dim < 1) throw DomainError("hash_encode needs dim >= 1");
  Rng rng(combine_seeds(fnv1a(lowercase(text)), salt));
  num::Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.uniform(-1.0, 1.0);
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

}  // namespace tbrl::text
