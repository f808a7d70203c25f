#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace injectbench {

/// Fixed-length dense vector. All embeddings in one index share dim.
struct Embedding {
  std::vector<double> v;

  std::size_t dim() const { return v.size(); }

  double dot(const Embedding& other) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * other.v[i];
    return acc;
  }

  double norm() const { return std::sqrt(dot(*this)); }

  bool all_finite() const {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }
};

}  // namespace injectbench
