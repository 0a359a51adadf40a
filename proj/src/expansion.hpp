#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "index_set.hpp"
#include "rational.hpp"
#include "sequences.hpp"

namespace storsion {

enum class DigitValue { One, QMinusOne, Custom };

/// Rule producing digits 0 <= c_n < q_n.
struct DigitRule {
  enum class Kind { Indicator, EventuallyPeriodic, PrefixThenZero, Custom };

  Kind kind = Kind::Indicator;
  SetPtr support;
  DigitValue value = DigitValue::One;
  std::function<std::int64_t(std::int64_t, std::int64_t)> custom;  // (n, q_n) -> c_n
  std::vector<std::int64_t> prefix;
  std::vector<std::int64_t> period;

  static DigitRule indicator(SetPtr support, DigitValue value);
  static DigitRule indicator_custom(SetPtr support,
                                    std::function<std::int64_t(std::int64_t, std::int64_t)> fn);
  static DigitRule custom_digits(std::function<std::int64_t(std::int64_t, std::int64_t)> fn);
  static DigitRule eventually_periodic(std::vector<std::int64_t> prefix,
                                       std::vector<std::int64_t> period);
  static DigitRule prefix_then_zero(std::vector<std::int64_t> prefix);

  std::int64_t digit(std::int64_t n, std::int64_t q) const;
};

/// A point of T = R/Z: an exact rational in [0,1) or a rule-defined digit sequence.
class CircleElement {
 public:
  static CircleElement rational(Rat x);
  static CircleElement rational(std::int64_t num, std::int64_t den);
  static CircleElement digits(DigitRule rule);

  bool is_rational() const { return rational_.has_value(); }
  const Rat& value() const;
  const DigitRule& rule() const;

 private:
  CircleElement() = default;
  std::optional<Rat> rational_;
  std::optional<DigitRule> rule_;
};

/// Digits c_1..c_N of x relative to a sequence, plus bookkeeping.
struct ExpansionPrefix {
  SeqPtr seq;
  std::int64_t N = 0;
  std::vector<std::int64_t> digits;  // digits[n-1] = c_n
  bool terminated = false;           // a_n x became integral at termination_index
  std::int64_t termination_index = 0;
  std::vector<std::string> diagnostics;  // canonicality warnings for digit rules

  std::int64_t digit(std::int64_t n) const {
    if (n < 1 || n > N) throw std::out_of_range("digit index outside expansion prefix");
    return digits[static_cast<std::size_t>(n - 1)];
  }
};

/// Greedy canonical expansion: c_n = floor(q_n r_{n-1}), r_n = q_n r_{n-1} - c_n.
ExpansionPrefix expand(const Rat& x, SeqPtr seq, std::int64_t N);

/// Digit prefix of any element (rationals are expanded, digit rules evaluated).
/// Digit-rule prefixes get a canonicality scan: a window of length canon_window
/// with every digit maximal raises a diagnostic, not an error.
ExpansionPrefix digits_prefix(const CircleElement& x, SeqPtr seq, std::int64_t N,
                              std::int64_t canon_window = 64);

/// {a_n x} for rational x = p/q, via a_n mod q; never materializes a_n.
Rat frac_part(const Rat& x, const ArithmeticSequence& seq, std::int64_t n);

/// Streams {a_1 x}, {a_2 x}, ... for rational x.
class FracScanner {
 public:
  FracScanner(const Rat& x, SeqPtr seq);
  /// {a_n x} for the next n (n = 1, 2, ... in call order).
  Rat next();
  std::int64_t index() const { return n_; }

 private:
  SeqPtr seq_;
  Int num_;      // p
  Int den_;      // q
  Int a_mod_;    // a_n mod q
  std::int64_t n_ = 0;
};

/// sigma_{n,k} = sum_{i=n}^{n+k} c_i / (q_n ... q_i), exact.
Rat sigma(const ExpansionPrefix& p, std::int64_t n, std::int64_t k);

/// Exhaustive exact check of the expansion identities at (n,k):
/// the ratio product identity, the sigma split of {a_{n-1}x}, the one-step
/// digit recursion, the sigma recursion and the tail bracket.
bool verify_identities(const Rat& x, SeqPtr seq, std::int64_t n, std::int64_t k);

/// (supp, supp_q) of the prefix as explicit finite sets.
std::pair<SetPtr, SetPtr> support_sets(const ExpansionPrefix& p);

/// sum_{n<=N} c_n / a_n, exact.
Rat reconstruct(const ExpansionPrefix& p);

CircleElement element_from_json(const json& spec);
json element_to_json(const CircleElement& x);

}  // namespace storsion
