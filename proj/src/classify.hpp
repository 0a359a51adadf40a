#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "density.hpp"
#include "index_set.hpp"
#include "rational.hpp"
#include "sequences.hpp"

namespace storsion {

/// Tri-state verdict plus an analytic-certainty flag: certain verdicts come
/// from rule structure, uncertain ones from prefix evidence.
struct ClassVerdict {
  Verdict3 verdict = Verdict3::Inconclusive;
  bool certain = false;
};

/// What the rule structure proves about (q_n) along a set.
struct RatioBehavior {
  bool finite_set = false;                   // the set itself is certainly finite
  std::optional<std::int64_t> const_value;   // q_n constant along the set
  std::optional<std::int64_t> bound;         // certain upper bound along the set
  bool divergent = false;                    // q_n -> infinity along the set
  bool recurrent = false;                    // some value recurs infinitely often
  bool unbounded = false;                    // sup q_n = infinity along the set
};

RatioBehavior analyze_ratios(const SetPtr& A, const SeqPtr& seq);

struct QBoundedResult {
  ClassVerdict v;
  std::int64_t observed_max = 0;
};

QBoundedResult is_q_bounded(const SetPtr& A, const SeqPtr& seq, std::int64_t N,
                            std::int64_t bound_cap);

ClassVerdict is_q_divergent(const SetPtr& A, const SeqPtr& seq, std::int64_t N);

struct LevelSetInfo {
  std::int64_t value = 0;
  SetPtr set;
  DensityEstimate density;
  std::int64_t count = 0;
  std::int64_t last_member = 0;
};

/// Distinct ratio values observed in [1,N] with their level sets and densities.
std::vector<LevelSetInfo> level_sets(const SeqPtr& seq, std::int64_t N);

struct SplitWitness {
  SetPtr B;  // q-bounded part (up to small sets)
  SetPtr D;  // q-divergent part
  std::int64_t M = 0;
};

struct SplitResult {
  ClassVerdict v;
  std::optional<SplitWitness> witness;
  std::vector<LevelSetInfo> levels;  // diagnostics (may be empty on analytic paths)
};

SplitResult is_splitting(const SeqPtr& seq, std::int64_t N, std::int64_t M_cap);

SplitResult is_d_splitting(const SeqPtr& seq, std::int64_t N, const Rat& threshold);

struct ExtractResult {
  SetPtr B;
  SetPtr cover;  // the removed density-zero cover C (prefix member list)
  DensityEstimate residual;
  std::vector<std::pair<std::int64_t, std::int64_t>> thresholds;  // (ratio value, t)
};

/// Extraction of a q-divergent B ⊆ A with small residual density.
/// Throws when some level set of A carries positive density (evidence or exact).
ExtractResult extract_q_divergent(const SetPtr& A, const SeqPtr& seq, std::int64_t N,
                                  const Rat& budget);

json classify_report(const SeqPtr& seq, std::int64_t N, const Rat& threshold,
                     std::int64_t M_cap);

}  // namespace storsion
