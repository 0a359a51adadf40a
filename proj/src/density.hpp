#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "index_set.hpp"
#include "rational.hpp"

namespace storsion {

enum class Verdict3 { Holds, Fails, Inconclusive };

const char* to_string(Verdict3 v);

/// Prefix-based density data for A ∩ [1,N].
/// window_low/window_high are min/max of |A∩[1,n]|/n over n in [N/2, N].
struct DensityEstimate {
  std::int64_t N = 0;
  std::int64_t count = 0;
  Rat point;
  Rat window_low;
  Rat window_high;
  std::optional<Rat> exact;

  /// Density value to compare against a zero-threshold: exact when known,
  /// otherwise the pessimistic (window_high) or optimistic (window_low) bound.
  const Rat& upper() const { return exact ? *exact : window_high; }
  const Rat& lower() const { return exact ? *exact : window_low; }
};

json density_to_json(const DensityEstimate& d);

std::int64_t count_members(const IndexSet& A, std::int64_t N);

DensityEstimate density_estimate(const IndexSet& A, std::int64_t N);

/// Estimate from an ascending member list of A ∩ [1,N] (exact left unset).
DensityEstimate density_estimate_from_members(const std::vector<std::int64_t>& members,
                                              std::int64_t N);

struct SubsetVerdict {
  Verdict3 verdict = Verdict3::Inconclusive;
  DensityEstimate residual;  // of A \ B
};

/// A ⊆^d B at a threshold: judges d(A\B) = 0 from the prefix.
SubsetVerdict subset_d(const SetPtr& A, const SetPtr& B, std::int64_t N, const Rat& threshold);

/// L_k(A) = A ∪ (A+1) ∪ ... ∪ (A+k).
SetPtr shift_union(const SetPtr& A, std::int64_t k);

struct DiagonalCover {
  SetPtr cover;                                        // C, as the explicit prefix member list
  std::vector<std::int64_t> cover_members;             // ascending
  std::vector<std::pair<std::size_t, std::int64_t>> thresholds;  // (cell index, t)
};

/// Witness for the density ideal's P-property: C of small density with every
/// cell \ C finite (at prefix scale, cell members beyond the cell threshold).
/// Cell j may keep at most floor(budget * 2^-j * N/2) members in C, which
/// bounds |C∩[1,n]|/n by budget for all n in [N/2, N].
DiagonalCover diagonal_cover(const std::vector<SetPtr>& cells, std::int64_t N, const Rat& budget);

}  // namespace storsion
