#pragma once

#include <vector>

#include "stem/sequence.hpp"

namespace stem {

/// Indices i in [begin, end) that are strictly higher than both grid
/// neighbours. Samples at 0 and size-1 are never maxima; plateaus never count.
template <typename Derived>
std::vector<Index> local_maximum_indices(const Eigen::DenseBase<Derived>& values, Index begin,
                                         Index end) {
  std::vector<Index> out;
  const Index n = values.size();
  begin = std::max<Index>(begin, 1);
  end = std::min<Index>(end, n - 1);
  for (Index i = begin; i < end; ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) out.push_back(i);
  }
  return out;
}

} // namespace stem
