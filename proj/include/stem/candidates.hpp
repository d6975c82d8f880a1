#pragma once

#include <optional>
#include <vector>

#include "stem/sequence.hpp"

namespace stem {

/// A local maximum (or, for pointwise methods, a single sample) under test.
struct Candidate {
  Index index;
  double location;
  double height;
  std::optional<double> pvalue;
};

/// Candidates ordered by strictly increasing location.
class CandidateSet {
public:
  CandidateSet() = default;
  explicit CandidateSet(std::vector<Candidate> entries);

  const std::vector<Candidate>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Candidate& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }
  bool has_pvalues() const noexcept;

private:
  std::vector<Candidate> entries_;
};

/// Local maxima of `seq` (strictly above both neighbours) with margin <= i < len - margin.
/// Pass seq.margin() to honour the convolution margin.
CandidateSet find_local_maxima(const SampledSequence& seq, Index margin);

} // namespace stem
