#include "index_set.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace storsion {

namespace {

constexpr std::int64_t kNoBound = std::numeric_limits<std::int64_t>::max();

bool band_match(BandKind kind, std::int64_t q, std::int64_t v) {
  switch (kind) {
    case BandKind::Eq:
      return q == v;
    case BandKind::Le:
      return q <= v;
    case BandKind::Ge:
      return q >= v;
    case BandKind::Neq:
      return q != v;
  }
  return false;
}

Rat pow2_inv(std::int64_t e) {
  // 2^{-e} for e >= 0
  Int den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  return make_rat(Int(1), den);
}

}  // namespace

std::optional<Rat> ratio_band_density(const RatioRule& rule, BandKind kind, std::int64_t v) {
  using K = RatioRule::Kind;
  switch (rule.kind) {
    case K::Constant:
      return band_match(kind, rule.q, v) ? Rat(1) : Rat(0);
    case K::Periodic: {
      std::int64_t hits = 0;
      for (auto q : rule.pattern)
        if (band_match(kind, q, v)) ++hits;
      return make_rat(hits, static_cast<std::int64_t>(rule.pattern.size()));
    }
    case K::Affine:
    case K::SquaresPartition:
      // Every fixed value has a density-zero level set; bounded bands vanish,
      // cofinite-band complements have density one.
      switch (kind) {
        case BandKind::Eq:
        case BandKind::Le:
          return Rat(0);
        case BandKind::Ge:
        case BandKind::Neq:
          return Rat(1);
      }
      return std::nullopt;
    case K::DyadicPartition: {
      // d({n : q_n = w}) = 2^{1-w} for w >= 2.
      switch (kind) {
        case BandKind::Eq:
          return v < 2 ? Rat(0) : pow2_inv(v - 1);
        case BandKind::Le:
          return v < 2 ? Rat(0) : Rat(1) - pow2_inv(v - 1);
        case BandKind::Ge:
          return v <= 2 ? Rat(1) : pow2_inv(v - 2);
        case BandKind::Neq:
          return v < 2 ? Rat(1) : Rat(1) - pow2_inv(v - 1);
      }
      return std::nullopt;
    }
    case K::TableWithTail:
      return ratio_band_density(*rule.tail, kind, v);
    case K::LevelSets: {
      Rat total(0);
      for (const auto& [set, q] : rule.cells) {
        if (!band_match(kind, q, v)) continue;
        auto d = set->exact_density();
        if (!d) return std::nullopt;
        total += *d;
      }
      return total;
    }
  }
  return std::nullopt;
}

SetPtr IndexSet::empty() { return SetPtr(new IndexSet(Kind::Empty)); }

SetPtr IndexSet::all() { return SetPtr(new IndexSet(Kind::All)); }

SetPtr IndexSet::finite(std::vector<std::int64_t> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (!members.empty() && members.front() < 1)
    throw std::invalid_argument("index sets live in N = {1,2,...}");
  if (members.empty()) return empty();
  auto* s = new IndexSet(Kind::Finite);
  s->members_ = std::move(members);
  return SetPtr(s);
}

SetPtr IndexSet::range(std::int64_t lo, std::int64_t hi) {
  if (lo < 1) lo = 1;
  if (hi < lo) return empty();
  auto* s = new IndexSet(Kind::Range);
  s->a_ = lo;
  s->b_ = hi;
  return SetPtr(s);
}

SetPtr IndexSet::ap(std::int64_t start, std::int64_t step) {
  if (start < 1 || step < 1) throw std::invalid_argument("ap needs start >= 1, step >= 1");
  auto* s = new IndexSet(Kind::AP);
  s->a_ = start;
  s->b_ = step;
  return SetPtr(s);
}

SetPtr IndexSet::squares() { return SetPtr(new IndexSet(Kind::Squares)); }

SetPtr IndexSet::shifted_squares(std::int64_t offset) {
  if (offset < 0) throw std::invalid_argument("shifted_squares needs offset >= 0");
  if (offset == 0) return squares();
  auto* s = new IndexSet(Kind::ShiftedSquares);
  s->a_ = offset;
  return SetPtr(s);
}

SetPtr IndexSet::level_set(SeqPtr seq, std::int64_t value) {
  if (!seq) throw std::invalid_argument("level_set needs a sequence");
  auto* s = new IndexSet(Kind::LevelSet);
  s->seq_ = std::move(seq);
  s->b_ = value;
  return SetPtr(s);
}

SetPtr IndexSet::predicate(std::function<bool(std::int64_t)> member, std::int64_t bound,
                           std::string label, std::optional<Rat> exact) {
  if (!member) throw std::invalid_argument("predicate set needs a membership function");
  if (bound < 1) throw std::invalid_argument("predicate set needs a positive enumeration bound");
  auto* s = new IndexSet(Kind::Predicate);
  s->pred_ = std::move(member);
  s->bound_ = bound;
  s->label_ = std::move(label);
  s->exact_ = std::move(exact);
  return SetPtr(s);
}

SetPtr IndexSet::union_of(std::vector<SetPtr> children) {
  std::vector<SetPtr> kept;
  for (auto& c : children) {
    if (!c) throw std::invalid_argument("null child in union");
    if (c->kind_ == Kind::Empty) continue;
    if (c->kind_ == Kind::All) return all();
    kept.push_back(std::move(c));
  }
  if (kept.empty()) return empty();
  if (kept.size() == 1) return kept.front();
  auto* s = new IndexSet(Kind::Union);
  s->children_ = std::move(kept);
  return SetPtr(s);
}

SetPtr IndexSet::intersection_of(std::vector<SetPtr> children) {
  std::vector<SetPtr> kept;
  for (auto& c : children) {
    if (!c) throw std::invalid_argument("null child in intersection");
    if (c->kind_ == Kind::Empty) return empty();
    if (c->kind_ == Kind::All) continue;
    kept.push_back(std::move(c));
  }
  if (kept.empty()) return all();
  if (kept.size() == 1) return kept.front();
  auto* s = new IndexSet(Kind::Intersection);
  s->children_ = std::move(kept);
  return SetPtr(s);
}

SetPtr IndexSet::difference(SetPtr a, SetPtr b) {
  if (!a || !b) throw std::invalid_argument("null side in difference");
  if (a->kind_ == Kind::Empty || b->kind_ == Kind::All) return empty();
  if (b->kind_ == Kind::Empty) return a;
  auto* s = new IndexSet(Kind::Difference);
  s->children_ = {std::move(a), std::move(b)};
  return SetPtr(s);
}

SetPtr IndexSet::complement(SetPtr a) {
  if (!a) throw std::invalid_argument("null complement");
  if (a->kind_ == Kind::Empty) return all();
  if (a->kind_ == Kind::All) return empty();
  if (a->kind_ == Kind::Complement) return a->children_.front();
  auto* s = new IndexSet(Kind::Complement);
  s->children_ = {std::move(a)};
  return SetPtr(s);
}

SetPtr IndexSet::shift(SetPtr a, std::int64_t k) {
  if (!a) throw std::invalid_argument("null shift");
  if (k == 0) return a;
  if (a->kind_ == Kind::Empty) return a;
  auto* s = new IndexSet(Kind::Shift);
  s->a_ = k;
  s->children_ = {std::move(a)};
  return SetPtr(s);
}

bool IndexSet::contains(std::int64_t n) const {
  if (n < 1) return false;
  switch (kind_) {
    case Kind::Empty:
      return false;
    case Kind::All:
      return true;
    case Kind::Finite:
      return std::binary_search(members_.begin(), members_.end(), n);
    case Kind::Range:
      return n >= a_ && n <= b_;
    case Kind::AP:
      return n >= a_ && (n - a_) % b_ == 0;
    case Kind::Squares: {
      std::int64_t r = isqrt64(n);
      return r * r == n;
    }
    case Kind::ShiftedSquares: {
      if (n <= a_) return false;
      std::int64_t m = n - a_;
      std::int64_t r = isqrt64(m);
      return r * r == m;
    }
    case Kind::LevelSet:
      return seq_->ratio(n) == b_;
    case Kind::Predicate:
      if (n > bound_)
        throw std::out_of_range("predicate set probed beyond its declared bound (" + label_ + ")");
      return pred_(n);
    case Kind::Union:
      for (const auto& c : children_)
        if (c->contains(n)) return true;
      return false;
    case Kind::Intersection:
      for (const auto& c : children_)
        if (!c->contains(n)) return false;
      return true;
    case Kind::Difference:
      return children_[0]->contains(n) && !children_[1]->contains(n);
    case Kind::Complement:
      return !children_[0]->contains(n);
    case Kind::Shift:
      return n - a_ >= 1 && children_[0]->contains(n - a_);
  }
  return false;
}

std::int64_t IndexSet::enumeration_bound() const {
  switch (kind_) {
    case Kind::Predicate:
      return bound_;
    case Kind::Union:
    case Kind::Intersection:
    case Kind::Difference:
    case Kind::Complement: {
      std::int64_t b = kNoBound;
      for (const auto& c : children_) b = std::min(b, c->enumeration_bound());
      return b;
    }
    case Kind::Shift: {
      std::int64_t b = children_[0]->enumeration_bound();
      if (b == kNoBound) return kNoBound;
      return b + a_;
    }
    default:
      return kNoBound;
  }
}

std::optional<bool> IndexSet::infinite() const {
  switch (kind_) {
    case Kind::Empty:
    case Kind::Finite:
    case Kind::Range:
      return false;
    case Kind::All:
    case Kind::AP:
    case Kind::Squares:
    case Kind::ShiftedSquares:
      return true;
    case Kind::LevelSet: {
      auto c = canonical();
      if (c.get() == this) {
        // Squares partition keeps every offset cell infinite.
        if (seq_->rule().kind == RatioRule::Kind::SquaresPartition) return true;
        return std::nullopt;
      }
      return c->infinite();
    }
    case Kind::Union: {
      bool all_finite = true;
      for (const auto& c : children_) {
        auto f = c->infinite();
        if (f == true) return true;
        if (f != false) all_finite = false;
      }
      if (all_finite) return false;
      return std::nullopt;
    }
    case Kind::Intersection:
      for (const auto& c : children_)
        if (c->infinite() == false) return false;
      return std::nullopt;
    case Kind::Difference: {
      auto fa = children_[0]->infinite();
      if (fa == false) return false;
      if (fa == true && children_[1]->infinite() == false) return true;
      return std::nullopt;
    }
    case Kind::Complement: {
      const auto& c = children_[0];
      if (c->infinite() == false) return true;
      if (c->kind_ == Kind::AP) return c->b_ >= 2 ? std::optional<bool>(true)
                                                  : std::optional<bool>(false);
      if (c->kind_ == Kind::Squares || c->kind_ == Kind::ShiftedSquares) return true;
      return std::nullopt;
    }
    case Kind::Shift:
      return children_[0]->infinite();
    case Kind::Predicate:
      return std::nullopt;
  }
  return std::nullopt;
}

SetPtr IndexSet::canonical() const {
  switch (kind_) {
    case Kind::LevelSet: {
      const RatioRule& rule = seq_->rule();
      using K = RatioRule::Kind;
      switch (rule.kind) {
        case K::Constant:
          return b_ == rule.q ? all() : empty();
        case K::Periodic: {
          auto len = static_cast<std::int64_t>(rule.pattern.size());
          std::vector<SetPtr> aps;
          for (std::int64_t r = 1; r <= len; ++r)
            if (rule.pattern[static_cast<std::size_t>(r - 1)] == b_) aps.push_back(ap(r, len));
          return union_of(std::move(aps));
        }
        case K::Affine: {
          std::int64_t n = b_ - rule.offset;
          return n >= 1 ? finite({n}) : empty();
        }
        case K::DyadicPartition: {
          // q_n = v2(n) + 2 = v  <=>  n ≡ 2^{v-2} (mod 2^{v-1})
          if (b_ < 2 || b_ > 62) return shared_from_this();
          std::int64_t lo = std::int64_t{1} << (b_ - 2);
          return ap(lo, lo * 2);
        }
        case K::LevelSets: {
          std::vector<SetPtr> parts;
          for (const auto& [set, q] : rule.cells)
            if (q == b_) parts.push_back(set);
          return union_of(std::move(parts));
        }
        default:
          return shared_from_this();
      }
    }
    case Kind::Shift: {
      auto c = children_[0]->canonical();
      std::int64_t k = a_;
      if (c->kind_ == Kind::Shift) {
        k += c->a_;
        c = c->children_[0];
      }
      if (k == 0) return c;
      switch (c->kind_) {
        case Kind::Empty:
          return empty();
        case Kind::All: {
          std::int64_t lo = 1 + k;
          return lo <= 1 ? all() : ap(lo, 1);
        }
        case Kind::Finite: {
          std::vector<std::int64_t> m;
          for (auto x : c->members_)
            if (x + k >= 1) m.push_back(x + k);
          return finite(std::move(m));
        }
        case Kind::Range:
          return range(c->a_ + k, c->b_ + k);
        case Kind::AP: {
          std::int64_t s = c->a_ + k;
          std::int64_t p = c->b_;
          while (s < 1) s += p;
          return ap(s, p);
        }
        case Kind::Squares:
          if (k >= 0) return shifted_squares(k);
          break;
        case Kind::ShiftedSquares:
          if (c->a_ + k >= 0) return shifted_squares(c->a_ + k);
          break;
        default:
          break;
      }
      return shift(c, k);
    }
    case Kind::Union: {
      std::vector<SetPtr> cs;
      cs.reserve(children_.size());
      for (const auto& c : children_) cs.push_back(c->canonical());
      return union_of(std::move(cs));
    }
    case Kind::Intersection: {
      std::vector<SetPtr> cs;
      cs.reserve(children_.size());
      for (const auto& c : children_) cs.push_back(c->canonical());
      return intersection_of(std::move(cs));
    }
    case Kind::Difference:
      return difference(children_[0]->canonical(), children_[1]->canonical());
    case Kind::Complement:
      return complement(children_[0]->canonical());
    default:
      return shared_from_this();
  }
}

namespace {

std::optional<bool> subset_impl(const SetPtr& a, const SetPtr& b);

std::optional<bool> disjoint_impl(const SetPtr& a, const SetPtr& b) {
  using Kind = IndexSet::Kind;
  if (a->kind() == Kind::Empty || b->kind() == Kind::Empty) return true;
  if (a.get() == b.get()) {
    auto inf = a->infinite();
    if (inf == true) return false;
    if (a->kind() == Kind::Finite || a->kind() == Kind::Range) return false;  // nonempty by ctor
    return std::nullopt;
  }
  if (a->kind() == Kind::All) {
    auto inf = b->infinite();
    if (inf == true) return false;
    if (b->kind() == Kind::Finite || b->kind() == Kind::Range) return false;
    return std::nullopt;
  }
  if (b->kind() == Kind::All) return disjoint_impl(b, a);
  if (a->kind() == Kind::Finite) {
    std::int64_t bound = b->enumeration_bound();
    for (auto n : a->members()) {
      if (n > bound) return std::nullopt;
      if (b->contains(n)) return false;
    }
    return true;
  }
  if (b->kind() == Kind::Finite) return disjoint_impl(b, a);
  if (a->kind() == Kind::AP && b->kind() == Kind::AP) {
    std::int64_t g = std::gcd(a->step(), b->step());
    if (((a->start() - b->start()) % g + g) % g != 0) return true;
    return false;  // CRT: infinitely many common members
  }
  if (a->kind() == Kind::Range && b->kind() == Kind::Range)
    return a->hi() < b->lo() || b->hi() < a->lo();
  // Level sets of one sequence partition N.
  if (a->kind() == Kind::LevelSet && b->kind() == Kind::LevelSet &&
      a->seq().get() == b->seq().get())
    return a->value() != b->value() ? std::optional<bool>(true) : std::optional<bool>(false);
  if (b->kind() == Kind::Complement) {
    if (subset_impl(a, b->children()[0]) == true) return true;
  }
  if (a->kind() == Kind::Complement) {
    if (subset_impl(b, a->children()[0]) == true) return true;
  }
  if (a->kind() == Kind::Union) {
    bool all_disjoint = true;
    for (const auto& c : a->children()) {
      auto d = disjoint_impl(c, b);
      if (d == false) return false;
      if (d != true) all_disjoint = false;
    }
    if (all_disjoint) return true;
    return std::nullopt;
  }
  if (b->kind() == Kind::Union) return disjoint_impl(b, a);
  if (a->kind() == Kind::Intersection) {
    for (const auto& c : a->children())
      if (disjoint_impl(c, b) == true) return true;
    return std::nullopt;
  }
  if (b->kind() == Kind::Intersection) return disjoint_impl(b, a);
  if (a->kind() == Kind::Difference) {
    if (disjoint_impl(a->children()[0], b) == true) return true;
    if (subset_impl(b, a->children()[1]) == true) return true;
    return std::nullopt;
  }
  if (b->kind() == Kind::Difference) return disjoint_impl(b, a);
  if (a->kind() == Kind::Shift && b->kind() == Kind::Shift && a->shift_by() == b->shift_by())
    return disjoint_impl(a->children()[0], b->children()[0]);
  return std::nullopt;
}

std::optional<bool> subset_impl(const SetPtr& a, const SetPtr& b) {
  using Kind = IndexSet::Kind;
  if (a->kind() == Kind::Empty) return true;
  if (b->kind() == Kind::All) return true;
  if (a.get() == b.get()) return true;
  if (b->kind() == Kind::Empty) {
    auto inf = a->infinite();
    if (inf == true) return false;
    if (a->kind() == Kind::Finite || a->kind() == Kind::Range) return false;
    return std::nullopt;
  }
  if (a->kind() == Kind::Finite) {
    std::int64_t bound = b->enumeration_bound();
    for (auto n : a->members()) {
      if (n > bound) return std::nullopt;
      if (!b->contains(n)) return false;
    }
    return true;
  }
  if (a->kind() == Kind::Range) {
    if (a->hi() - a->lo() > 65536) return std::nullopt;
    std::int64_t bound = b->enumeration_bound();
    if (a->hi() > bound) return std::nullopt;
    for (std::int64_t n = a->lo(); n <= a->hi(); ++n)
      if (!b->contains(n)) return false;
    return true;
  }
  if (a->kind() == Kind::AP && b->kind() == Kind::AP) {
    if (a->step() % b->step() == 0 && a->start() >= b->start() &&
        (a->start() - b->start()) % b->step() == 0)
      return true;
    // First member disproves containment when incompatible.
    if (!b->contains(a->start())) return false;
    return std::nullopt;
  }
  if (a->kind() == Kind::Squares && b->kind() == Kind::Squares) return true;
  if (a->kind() == Kind::ShiftedSquares && b->kind() == Kind::ShiftedSquares)
    return a->offset() == b->offset() ? std::optional<bool>(true) : std::nullopt;
  if (a->kind() == Kind::LevelSet && b->kind() == Kind::LevelSet &&
      a->seq().get() == b->seq().get() && a->value() == b->value())
    return true;
  if (b->kind() == Kind::Union) {
    for (const auto& c : b->children())
      if (subset_impl(a, c) == true) return true;
    if (a->kind() == Kind::Union) {
      bool all_in = true;
      for (const auto& c : a->children()) {
        auto s = subset_impl(c, b);
        if (s == false) return false;
        if (s != true) all_in = false;
      }
      if (all_in) return true;
    }
    return std::nullopt;
  }
  if (a->kind() == Kind::Union) {
    bool all_in = true;
    for (const auto& c : a->children()) {
      auto s = subset_impl(c, b);
      if (s == false) return false;
      if (s != true) all_in = false;
    }
    if (all_in) return true;
    return std::nullopt;
  }
  if (b->kind() == Kind::Intersection) {
    bool all_in = true;
    for (const auto& c : b->children()) {
      auto s = subset_impl(a, c);
      if (s == false) return false;
      if (s != true) all_in = false;
    }
    if (all_in) return true;
    return std::nullopt;
  }
  if (a->kind() == Kind::Intersection) {
    for (const auto& c : a->children())
      if (subset_impl(c, b) == true) return true;
    return std::nullopt;
  }
  if (a->kind() == Kind::Difference) {
    if (subset_impl(a->children()[0], b) == true) return true;
    return std::nullopt;
  }
  if (b->kind() == Kind::Difference) {
    if (subset_impl(a, b->children()[0]) == true &&
        disjoint_impl(a, b->children()[1]) == true)
      return true;
    return std::nullopt;
  }
  if (b->kind() == Kind::Complement) {
    if (disjoint_impl(a, b->children()[0]) == true) return true;
    return std::nullopt;
  }
  if (a->kind() == Kind::Shift && b->kind() == Kind::Shift && a->shift_by() == b->shift_by())
    return subset_impl(a->children()[0], b->children()[0]);
  return std::nullopt;
}

}  // namespace

std::optional<bool> IndexSet::subset_of(const SetPtr& other) const {
  return subset_impl(canonical(), other->canonical());
}

std::optional<bool> IndexSet::disjoint_with(const SetPtr& other) const {
  return disjoint_impl(canonical(), other->canonical());
}

std::optional<Rat> IndexSet::exact_density() const {
  switch (kind_) {
    case Kind::Empty:
    case Kind::Finite:
    case Kind::Range:
    case Kind::Squares:
    case Kind::ShiftedSquares:
      return Rat(0);
    case Kind::All:
      return Rat(1);
    case Kind::AP:
      return make_rat(std::int64_t{1}, b_);
    case Kind::LevelSet:
      return ratio_band_density(seq_->rule(), BandKind::Eq, b_);
    case Kind::Predicate:
      return exact_;
    case Kind::Shift:
      return children_[0]->exact_density();
    case Kind::Complement: {
      auto d = children_[0]->exact_density();
      if (!d) return std::nullopt;
      return Rat(1) - *d;
    }
    case Kind::Union: {
      bool all_zero = true;
      for (const auto& c : children_) {
        auto d = c->exact_density();
        if (!d || *d != 0) {
          all_zero = false;
          break;
        }
      }
      if (all_zero) return Rat(0);
      // Pairwise disjoint with known densities: additive.
      Rat total(0);
      for (std::size_t i = 0; i < children_.size(); ++i) {
        auto d = children_[i]->exact_density();
        if (!d) return std::nullopt;
        total += *d;
        for (std::size_t j = i + 1; j < children_.size(); ++j)
          if (disjoint_impl(children_[i]->canonical(), children_[j]->canonical()) != true)
            return std::nullopt;
      }
      return total;
    }
    case Kind::Intersection: {
      for (const auto& c : children_) {
        auto d = c->exact_density();
        if (d && *d == 0) return Rat(0);
      }
      if (children_.size() == 2) {
        auto ca = children_[0]->canonical();
        auto cb = children_[1]->canonical();
        if (disjoint_impl(ca, cb) == true) return Rat(0);
        if (subset_impl(ca, cb) == true) return children_[0]->exact_density();
        if (subset_impl(cb, ca) == true) return children_[1]->exact_density();
      }
      return std::nullopt;
    }
    case Kind::Difference: {
      auto ca = children_[0]->canonical();
      auto cb = children_[1]->canonical();
      if (subset_impl(ca, cb) == true) return Rat(0);
      auto da = children_[0]->exact_density();
      if (da && *da == 0) return Rat(0);
      if (disjoint_impl(ca, cb) == true) return da;
      auto db = children_[1]->exact_density();
      if (db && *db == 0) return da;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string IndexSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Empty:
      return "empty";
    case Kind::All:
      return "N";
    case Kind::Finite:
      os << "finite[" << members_.size() << "]";
      return os.str();
    case Kind::Range:
      os << "[" << a_ << "," << b_ << "]";
      return os.str();
    case Kind::AP:
      os << "ap(" << a_ << "," << b_ << ")";
      return os.str();
    case Kind::Squares:
      return "squares";
    case Kind::ShiftedSquares:
      os << "squares+" << a_;
      return os.str();
    case Kind::LevelSet:
      os << "level(q=" << b_ << ")";
      return os.str();
    case Kind::Predicate:
      return label_.empty() ? "sampled" : label_;
    case Kind::Union: {
      os << "union(";
      for (std::size_t i = 0; i < children_.size(); ++i)
        os << (i ? "," : "") << children_[i]->describe();
      os << ")";
      return os.str();
    }
    case Kind::Intersection: {
      os << "inter(";
      for (std::size_t i = 0; i < children_.size(); ++i)
        os << (i ? "," : "") << children_[i]->describe();
      os << ")";
      return os.str();
    }
    case Kind::Difference:
      os << children_[0]->describe() << "\\" << children_[1]->describe();
      return os.str();
    case Kind::Complement:
      os << "co(" << children_[0]->describe() << ")";
      return os.str();
    case Kind::Shift:
      os << "(" << children_[0]->describe() << (a_ >= 0 ? ")+" : ")") << a_;
      return os.str();
  }
  return "?";
}

SetPtr set_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("type"))
    throw std::invalid_argument("index-set spec must be an object with a \"type\"");
  const std::string type = spec.at("type").get<std::string>();
  if (type == "finite") return IndexSet::finite(spec.at("elems").get<std::vector<std::int64_t>>());
  if (type == "ap")
    return IndexSet::ap(spec.at("start").get<std::int64_t>(), spec.at("step").get<std::int64_t>());
  if (type == "all") return IndexSet::all();
  if (type == "empty") return IndexSet::empty();
  if (type == "range")
    return IndexSet::range(spec.at("lo").get<std::int64_t>(), spec.at("hi").get<std::int64_t>());
  if (type == "squares") return IndexSet::squares();
  if (type == "shifted_squares") return IndexSet::shifted_squares(spec.at("offset").get<std::int64_t>());
  if (type == "level_set")
    return IndexSet::level_set(seq_from_json(spec.at("seq")), spec.at("value").get<std::int64_t>());
  if (type == "union" || type == "intersection") {
    std::vector<SetPtr> cs;
    for (const auto& c : spec.at("of")) cs.push_back(set_from_json(c));
    return type == "union" ? IndexSet::union_of(std::move(cs))
                           : IndexSet::intersection_of(std::move(cs));
  }
  if (type == "difference")
    return IndexSet::difference(set_from_json(spec.at("a")), set_from_json(spec.at("b")));
  if (type == "complement") return IndexSet::complement(set_from_json(spec.at("of")));
  if (type == "shift")
    return IndexSet::shift(set_from_json(spec.at("of")), spec.at("k").get<std::int64_t>());
  throw std::invalid_argument("unknown index-set spec type: " + type);
}

json set_to_json(const IndexSet& set) {
  using Kind = IndexSet::Kind;
  switch (set.kind()) {
    case Kind::Empty:
      return json{{"type", "empty"}};
    case Kind::All:
      return json{{"type", "all"}};
    case Kind::Finite:
      return json{{"type", "finite"}, {"elems", set.members()}};
    case Kind::Range:
      return json{{"type", "range"}, {"lo", set.lo()}, {"hi", set.hi()}};
    case Kind::AP:
      return json{{"type", "ap"}, {"start", set.start()}, {"step", set.step()}};
    case Kind::Squares:
      return json{{"type", "squares"}};
    case Kind::ShiftedSquares:
      return json{{"type", "shifted_squares"}, {"offset", set.offset()}};
    case Kind::LevelSet:
      return json{{"type", "level_set"}, {"seq", seq_to_json(*set.seq())}, {"value", set.value()}};
    case Kind::Union:
    case Kind::Intersection: {
      json of = json::array();
      for (const auto& c : set.children()) of.push_back(set_to_json(*c));
      return json{{"type", set.kind() == Kind::Union ? "union" : "intersection"}, {"of", of}};
    }
    case Kind::Difference:
      return json{{"type", "difference"},
                  {"a", set_to_json(*set.children()[0])},
                  {"b", set_to_json(*set.children()[1])}};
    case Kind::Complement:
      return json{{"type", "complement"}, {"of", set_to_json(*set.children()[0])}};
    case Kind::Shift:
      return json{{"type", "shift"}, {"of", set_to_json(*set.children()[0])}, {"k", set.shift_by()}};
    case Kind::Predicate:
      throw std::invalid_argument("sampled sets have no file representation");
  }
  throw std::logic_error("unreachable set kind");
}

}  // namespace storsion
