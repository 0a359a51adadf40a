#include "sequences.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "index_set.hpp"

namespace storsion {

std::int64_t isqrt64(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("isqrt64 of negative");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

int v2_of(std::int64_t n) {
  if (n <= 0) throw std::invalid_argument("v2 of non-positive");
  return std::countr_zero(static_cast<std::uint64_t>(n));
}

namespace {

void require_ratio(std::int64_t q) {
  if (q < 2) throw std::invalid_argument("ratio values must be >= 2");
}

}  // namespace

RatioRule RatioRule::constant(std::int64_t q) {
  require_ratio(q);
  RatioRule r;
  r.kind = Kind::Constant;
  r.q = q;
  return r;
}

RatioRule RatioRule::periodic(std::vector<std::int64_t> pattern) {
  if (pattern.empty()) throw std::invalid_argument("periodic ratio needs a non-empty pattern");
  for (auto q : pattern) require_ratio(q);
  RatioRule r;
  r.kind = Kind::Periodic;
  r.pattern = std::move(pattern);
  return r;
}

RatioRule RatioRule::affine(std::int64_t offset) {
  if (offset < 1) throw std::invalid_argument("affine ratio needs offset >= 1 so q_1 >= 2");
  RatioRule r;
  r.kind = Kind::Affine;
  r.offset = offset;
  return r;
}

RatioRule RatioRule::table_with_tail(std::vector<std::int64_t> prefix, RatioRule tail) {
  for (auto q : prefix) require_ratio(q);
  RatioRule r;
  r.kind = Kind::TableWithTail;
  r.prefix = std::move(prefix);
  r.tail = std::make_shared<const RatioRule>(std::move(tail));
  return r;
}

RatioRule RatioRule::squares_partition() {
  RatioRule r;
  r.kind = Kind::SquaresPartition;
  return r;
}

RatioRule RatioRule::dyadic_partition() {
  RatioRule r;
  r.kind = Kind::DyadicPartition;
  return r;
}

RatioRule RatioRule::level_sets(std::vector<std::pair<SetPtr, std::int64_t>> cells) {
  if (cells.empty()) throw std::invalid_argument("level-set rule needs at least one cell");
  for (const auto& [set, q] : cells) {
    require_ratio(q);
    if (!set) throw std::invalid_argument("level-set rule cell without a set");
  }
  RatioRule r;
  r.kind = Kind::LevelSets;
  r.cells = std::move(cells);
  return r;
}

std::int64_t RatioRule::ratio(std::int64_t n) const {
  if (n < 1) throw std::invalid_argument("ratio index must be >= 1");
  switch (kind) {
    case Kind::Constant:
      return q;
    case Kind::Periodic:
      return pattern[static_cast<std::size_t>((n - 1) % static_cast<std::int64_t>(pattern.size()))];
    case Kind::Affine:
      return n + offset;
    case Kind::TableWithTail: {
      auto len = static_cast<std::int64_t>(prefix.size());
      if (n <= len) return prefix[static_cast<std::size_t>(n - 1)];
      return tail->ratio(n - len);
    }
    case Kind::SquaresPartition: {
      std::int64_t k = isqrt64(n);
      return n - k * k + 2;
    }
    case Kind::DyadicPartition:
      return v2_of(n) + 2;
    case Kind::LevelSets: {
      for (const auto& [set, value] : cells)
        if (set->contains(n)) return value;
      throw std::runtime_error("level-set rule: no cell contains index " + std::to_string(n));
    }
  }
  throw std::logic_error("unreachable ratio kind");
}

std::optional<std::int64_t> RatioRule::range_bound() const {
  switch (kind) {
    case Kind::Constant:
      return q;
    case Kind::Periodic:
      return *std::max_element(pattern.begin(), pattern.end());
    case Kind::TableWithTail: {
      auto tb = tail->range_bound();
      if (!tb) return std::nullopt;
      std::int64_t m = *tb;
      for (auto v : prefix) m = std::max(m, v);
      return m;
    }
    case Kind::LevelSets: {
      std::int64_t m = 2;
      for (const auto& [set, value] : cells) m = std::max(m, value);
      return m;
    }
    default:
      return std::nullopt;
  }
}

bool RatioRule::divergent_everywhere() const {
  switch (kind) {
    case Kind::Affine:
      return true;
    case Kind::TableWithTail:
      return tail->divergent_everywhere();
    default:
      return false;
  }
}

Int ArithmeticSequence::term(std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("term index must be >= 0");
  std::lock_guard<std::mutex> lock(mu_);
  while (static_cast<std::int64_t>(terms_.size()) <= n) {
    auto i = static_cast<std::int64_t>(terms_.size());
    terms_.push_back(terms_.back() * ratio(i));
  }
  return terms_[static_cast<std::size_t>(n)];
}

SeqPtr make_example_2_6() {
  return std::make_shared<ArithmeticSequence>(RatioRule::squares_partition());
}

SeqPtr make_example_2_7() {
  return std::make_shared<ArithmeticSequence>(RatioRule::dyadic_partition());
}

namespace {

RatioRule rule_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("type"))
    throw std::invalid_argument("sequence spec must be an object with a \"type\"");
  const std::string type = spec.at("type").get<std::string>();
  if (type == "constant_ratio") return RatioRule::constant(spec.at("q").get<std::int64_t>());
  if (type == "affine_ratio") return RatioRule::affine(spec.at("offset").get<std::int64_t>());
  if (type == "periodic_ratio")
    return RatioRule::periodic(spec.at("pattern").get<std::vector<std::int64_t>>());
  if (type == "table_tail")
    return RatioRule::table_with_tail(spec.at("prefix").get<std::vector<std::int64_t>>(),
                                      rule_from_json(spec.at("tail")));
  if (type == "example_2_6") return RatioRule::squares_partition();
  if (type == "example_2_7") return RatioRule::dyadic_partition();
  throw std::invalid_argument("unknown sequence spec type: " + type);
}

json rule_to_json(const RatioRule& r) {
  switch (r.kind) {
    case RatioRule::Kind::Constant:
      return json{{"type", "constant_ratio"}, {"q", r.q}};
    case RatioRule::Kind::Periodic:
      return json{{"type", "periodic_ratio"}, {"pattern", r.pattern}};
    case RatioRule::Kind::Affine:
      return json{{"type", "affine_ratio"}, {"offset", r.offset}};
    case RatioRule::Kind::TableWithTail:
      return json{{"type", "table_tail"}, {"prefix", r.prefix}, {"tail", rule_to_json(*r.tail)}};
    case RatioRule::Kind::SquaresPartition:
      return json{{"type", "example_2_6"}};
    case RatioRule::Kind::DyadicPartition:
      return json{{"type", "example_2_7"}};
    case RatioRule::Kind::LevelSets:
      throw std::invalid_argument("level-set rules have no file representation");
  }
  throw std::logic_error("unreachable rule kind");
}

}  // namespace

SeqPtr seq_from_json(const json& spec) {
  return std::make_shared<ArithmeticSequence>(rule_from_json(spec));
}

json seq_to_json(const ArithmeticSequence& seq) { return rule_to_json(seq.rule()); }

}  // namespace storsion
