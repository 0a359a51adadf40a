#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rational.hpp"
#include "sequences.hpp"

namespace storsion {

/// Ratio-value band predicates used for exact level/band densities.
enum class BandKind { Eq, Le, Ge, Neq };

std::optional<Rat> ratio_band_density(const RatioRule& rule, BandKind kind, std::int64_t v);

/// Immutable, finitely-described subset of N = {1, 2, ...}.
///
/// Structured variants keep enough shape for exact densities and for the
/// conservative subset / disjointness reasoning the classifiers rely on;
/// everything else degrades to sampled membership with a declared bound.
class IndexSet : public std::enable_shared_from_this<IndexSet> {
 public:
  enum class Kind {
    Empty,
    All,
    Finite,          // explicit sorted members
    Range,           // [lo, hi]
    AP,              // {start, start+step, ...}
    Squares,         // {k^2}
    ShiftedSquares,  // {k^2 + offset}
    LevelSet,        // {n : q_n = value} for a sequence
    Predicate,       // sampled membership, valid up to `bound`
    Union,
    Intersection,
    Difference,      // children[0] \ children[1]
    Complement,
    Shift,           // {n : n - k in child}, n >= 1
  };

  static SetPtr empty();
  static SetPtr all();
  static SetPtr finite(std::vector<std::int64_t> members);
  static SetPtr range(std::int64_t lo, std::int64_t hi);
  static SetPtr ap(std::int64_t start, std::int64_t step);
  static SetPtr squares();
  static SetPtr shifted_squares(std::int64_t offset);
  static SetPtr level_set(SeqPtr seq, std::int64_t value);
  static SetPtr predicate(std::function<bool(std::int64_t)> member, std::int64_t bound,
                          std::string label, std::optional<Rat> exact = std::nullopt);
  static SetPtr union_of(std::vector<SetPtr> children);
  static SetPtr intersection_of(std::vector<SetPtr> children);
  static SetPtr difference(SetPtr a, SetPtr b);
  static SetPtr complement(SetPtr a);
  static SetPtr shift(SetPtr a, std::int64_t k);

  Kind kind() const { return kind_; }
  bool contains(std::int64_t n) const;

  /// Largest index any operation may probe (min over Predicate bounds).
  std::int64_t enumeration_bound() const;

  std::optional<Rat> exact_density() const;
  std::optional<bool> infinite() const;

  /// Structurally simplified equivalent (level sets to APs, shifts folded, ...).
  SetPtr canonical() const;

  /// Conservative structural relations: definite answer or nullopt.
  std::optional<bool> subset_of(const SetPtr& other) const;
  std::optional<bool> disjoint_with(const SetPtr& other) const;

  std::string describe() const;

  // Variant payload accessors (meaningful per kind).
  const std::vector<std::int64_t>& members() const { return members_; }
  std::int64_t lo() const { return a_; }
  std::int64_t hi() const { return b_; }
  std::int64_t start() const { return a_; }
  std::int64_t step() const { return b_; }
  std::int64_t offset() const { return a_; }
  std::int64_t value() const { return b_; }
  std::int64_t shift_by() const { return a_; }
  const SeqPtr& seq() const { return seq_; }
  const std::vector<SetPtr>& children() const { return children_; }

 private:
  explicit IndexSet(Kind k) : kind_(k) {}

  Kind kind_;
  std::int64_t a_ = 0;  // lo / start / offset / shift
  std::int64_t b_ = 0;  // hi / step / value
  std::vector<std::int64_t> members_;
  SeqPtr seq_;
  std::vector<SetPtr> children_;
  std::function<bool(std::int64_t)> pred_;
  std::int64_t bound_ = 0;
  std::optional<Rat> exact_;
  std::string label_;
};

SetPtr set_from_json(const json& spec);
json set_to_json(const IndexSet& set);

}  // namespace storsion
