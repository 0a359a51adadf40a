#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace storsion {

class IndexSet;
using SetPtr = std::shared_ptr<const IndexSet>;

std::int64_t isqrt64(std::int64_t n);
int v2_of(std::int64_t n);

/// Rule defining the ratio sequence (q_n), q_n >= 2 for all n >= 1.
struct RatioRule {
  enum class Kind {
    Constant,          // q_n = q
    Periodic,          // q_n = pattern[(n-1) mod len]
    Affine,            // q_n = n + offset
    TableWithTail,     // q_n = prefix[n-1] for n <= len, else tail ratio at n - len
    SquaresPartition,  // q_n = (n - floor(sqrt(n))^2) + 2
    DyadicPartition,   // q_n = v2(n) + 2
    LevelSets,         // q_n = value of the cell containing n
  };

  Kind kind = Kind::Constant;
  std::int64_t q = 2;
  std::vector<std::int64_t> pattern;
  std::int64_t offset = 1;
  std::vector<std::int64_t> prefix;
  std::shared_ptr<const RatioRule> tail;
  std::vector<std::pair<SetPtr, std::int64_t>> cells;

  static RatioRule constant(std::int64_t q);
  static RatioRule periodic(std::vector<std::int64_t> pattern);
  static RatioRule affine(std::int64_t offset);
  static RatioRule table_with_tail(std::vector<std::int64_t> prefix, RatioRule tail);
  static RatioRule squares_partition();
  static RatioRule dyadic_partition();
  static RatioRule level_sets(std::vector<std::pair<SetPtr, std::int64_t>> cells);

  std::int64_t ratio(std::int64_t n) const;

  /// Analytic bound on the whole range, when the rule guarantees one.
  std::optional<std::int64_t> range_bound() const;
  /// True when q_n -> infinity along every infinite index set.
  bool divergent_everywhere() const;
};

/// Arithmetic sequence a_n = q_1 q_2 ... q_n with a_0 = 1 and a_n | a_{n+1}.
class ArithmeticSequence {
 public:
  explicit ArithmeticSequence(RatioRule rule) : rule_(std::move(rule)) {}

  std::int64_t ratio(std::int64_t n) const { return rule_.ratio(n); }

  /// a_n, exact. Prefix results are cached; safe for concurrent callers.
  Int term(std::int64_t n) const;

  const RatioRule& rule() const { return rule_; }

 private:
  RatioRule rule_;
  mutable std::mutex mu_;
  mutable std::vector<Int> terms_{Int(1)};  // terms_[i] = a_i
};

using SeqPtr = std::shared_ptr<const ArithmeticSequence>;

SeqPtr make_example_2_6();
SeqPtr make_example_2_7();

SeqPtr seq_from_json(const json& spec);
json seq_to_json(const ArithmeticSequence& seq);

}  // namespace storsion
