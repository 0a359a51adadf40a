#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "density.hpp"
#include "expansion.hpp"
#include "rational.hpp"

namespace storsion {

enum class StatVerdict { ConvergesEvidence, DivergesEvidence, Inconclusive };

const char* to_string(StatVerdict v);

/// Exact enclosure of a circle norm (lo == hi when exact).
struct NormBracket {
  Rat lo, hi;
  bool exact = false;
};

/// Norm enclosure for a value known to lie in [vlo, vhi], 0 <= vlo <= vhi < 2.
NormBracket norm_bracket(const Rat& vlo, const Rat& vhi);

/// Exceptional-set statistics at one epsilon. The density field carries the
/// cumulative prefix windows; verdicts compare delta against the tail
/// quarter-segment densities (N/2, 3N/4] and (3N/4, N], which track the limit
/// instead of the initial segment.
struct ExceptionalStats {
  std::int64_t N = 0;
  std::int64_t count = 0;
  DensityEstimate density;
  Rat tail_q3, tail_q4;
  StatVerdict verdict = StatVerdict::Inconclusive;
};

/// flags[n] != 0 marks n exceptional; flags has size N+1, index 0 unused.
ExceptionalStats tally_flags(const std::vector<std::uint8_t>& flags, std::int64_t N,
                             const Rat& delta);

/// Statistical-convergence test of values -> 0 (values[i] is x_{i+1}).
StatVerdict stat_limit_zero(const std::vector<Rat>& values, const Rat& eps, const Rat& delta);

/// A = {n <= N : |value_n| < eps}, the prefix shadow of the density-one witness.
SetPtr density_one_witness(const std::vector<Rat>& values, const Rat& eps);

struct EpsEntry {
  Rat eps;
  std::int64_t exceptional_count = 0;
  DensityEstimate density;
  Rat tail_low, tail_high;
  StatVerdict verdict = StatVerdict::Inconclusive;
};

struct OracleReport {
  std::int64_t N = 0;
  Rat delta;
  std::vector<EpsEntry> entries;
  StatVerdict overall = StatVerdict::Inconclusive;
  std::int64_t witness_count = 0;
  SetPtr witness;  // density-one witness at the smallest epsilon
};

json oracle_report_to_json(const OracleReport& r);

/// Empirical membership oracle: circle_norm({a_n x}) for n <= N, exact for
/// rationals, bracketed through the digit tail bound otherwise; then the
/// statistical test per epsilon. Overall verdict converges iff every epsilon
/// converges. `trace` (when set) receives every (n, norm bracket).
OracleReport oracle_membership(const CircleElement& x, SeqPtr seq, std::int64_t N,
                               std::vector<Rat> eps_grid, Rat delta, int parallelism = 1,
                               const std::function<void(std::int64_t, const NormBracket&)>& trace = {});

struct RestrictedReport {
  std::int64_t members = 0;
  std::int64_t exceptional = 0;
  ExceptionalStats stats;  // member-indexed
  StatVerdict verdict = StatVerdict::Inconclusive;
};

/// Statistical test along the subsequence indexed by B ∩ [1,N], with densities
/// relative to the member count.
RestrictedReport restricted_oracle(const CircleElement& x, SeqPtr seq, const SetPtr& B,
                                   std::int64_t N, const Rat& eps, const Rat& delta);

/// circle_norm({a_n x}) for n = 1..N, exact (rational x only).
std::vector<Rat> exact_norms(const Rat& x, SeqPtr seq, std::int64_t N);

}  // namespace storsion
