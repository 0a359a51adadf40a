#include "classify.hpp"

#include <algorithm>
#include <map>

namespace storsion {

namespace {

using Kind = IndexSet::Kind;
using RKind = RatioRule::Kind;

void analyze_dyadic(const SetPtr& A, RatioBehavior& b) {
  switch (A->kind()) {
    case Kind::All:
      b.unbounded = b.recurrent = true;
      break;
    case Kind::AP: {
      int e = v2_of(A->step());
      int f = v2_of(A->start());
      if (f < e) {
        b.const_value = f + 2;
        b.bound = f + 2;
      } else {
        b.unbounded = b.recurrent = true;
      }
      break;
    }
    case Kind::Squares:
    case Kind::ShiftedSquares:
      // odd members recur, so q = 2 recurs; squares also reach every 2-adic height
      b.recurrent = true;
      if (A->kind() == Kind::Squares) b.unbounded = true;
      break;
    default:
      break;
  }
}

void analyze_squares_partition(const SetPtr& A, RatioBehavior& b) {
  switch (A->kind()) {
    case Kind::Squares:
      b.const_value = 2;
      b.bound = 2;
      break;
    case Kind::ShiftedSquares:
      // members k^2 + o sit at offset <= o above the preceding square
      b.bound = A->offset() + 2;
      break;
    case Kind::LevelSet:
      if (A->seq()->rule().kind == RKind::SquaresPartition) {
        b.const_value = A->value();
        b.bound = A->value();
      }
      break;
    case Kind::All:
      b.unbounded = b.recurrent = true;
      break;
    case Kind::AP: {
      // positive density forces unbounded offsets; some offset < step recurs
      b.unbounded = b.recurrent = true;
      break;
    }
    default:
      break;
  }
}

void analyze_node(const SetPtr& A, const SeqPtr& seq, RatioBehavior& b);

void analyze_children_subset(const SetPtr& child, const SeqPtr& seq, RatioBehavior& b) {
  // A ⊆ child: bounds and constancy are inherited downward.
  RatioBehavior cb;
  analyze_node(child, seq, cb);
  if (cb.const_value && !b.const_value) {
    b.const_value = cb.const_value;
    b.bound = cb.bound;
  }
  if (cb.bound && (!b.bound || *cb.bound < *b.bound)) b.bound = cb.bound;
  if (cb.divergent) b.divergent = true;  // subset of a divergent-along set
}

void analyze_node(const SetPtr& A, const SeqPtr& seq, RatioBehavior& b) {
  const RatioRule& rule = seq->rule();
  switch (rule.kind) {
    case RKind::DyadicPartition:
      analyze_dyadic(A, b);
      break;
    case RKind::SquaresPartition:
      analyze_squares_partition(A, b);
      break;
    default:
      break;
  }
  if (A->kind() == Kind::LevelSet && A->seq().get() == seq.get()) {
    b.const_value = A->value();
    b.bound = A->value();
  }
  switch (A->kind()) {
    case Kind::Union: {
      bool all_const = true, all_bounded = true, all_div = true;
      std::optional<std::int64_t> cval;
      std::int64_t bmax = 0;
      for (const auto& c : A->children()) {
        RatioBehavior cb;
        analyze_node(c, seq, cb);
        if (cb.recurrent) b.recurrent = true;
        if (cb.unbounded) b.unbounded = true;
        if (!cb.const_value)
          all_const = false;
        else if (!cval)
          cval = cb.const_value;
        else if (*cval != *cb.const_value)
          all_const = false;
        if (cb.bound)
          bmax = std::max(bmax, *cb.bound);
        else
          all_bounded = false;
        if (!cb.divergent && !cb.finite_set) all_div = false;
      }
      if (all_const && cval) b.const_value = cval;
      if (all_bounded) b.bound = bmax;
      if (all_div) b.divergent = true;
      break;
    }
    case Kind::Intersection:
      for (const auto& c : A->children()) analyze_children_subset(c, seq, b);
      break;
    case Kind::Difference:
      analyze_children_subset(A->children()[0], seq, b);
      break;
    default:
      break;
  }
}

}  // namespace

RatioBehavior analyze_ratios(const SetPtr& A, const SeqPtr& seq) {
  RatioBehavior b;
  SetPtr A0 = A->canonical();
  auto inf = A0->infinite();
  if (inf == false) {
    b.finite_set = true;
    return b;
  }
  const RatioRule& rule = seq->rule();
  if (auto rb = rule.range_bound()) {
    b.bound = rb;
    if (rule.kind == RKind::Constant) b.const_value = rule.q;
  }
  if (rule.divergent_everywhere()) {
    if (inf == true) b.divergent = true;
    return b;
  }
  analyze_node(A0, seq, b);
  if (b.const_value && !b.bound) b.bound = b.const_value;
  if (b.divergent && inf != true) b.divergent = false;  // only meaningful on infinite sets
  return b;
}

QBoundedResult is_q_bounded(const SetPtr& A, const SeqPtr& seq, std::int64_t N,
                            std::int64_t bound_cap) {
  QBoundedResult out;
  RatioBehavior b = analyze_ratios(A, seq);

  std::int64_t max_head = 0, max_tail = 0;
  std::int64_t half = N / 2;
  std::int64_t bound = std::min(N, A->enumeration_bound());
  for (std::int64_t n = 1; n <= bound; ++n) {
    if (!A->contains(n)) continue;
    std::int64_t q = seq->ratio(n);
    if (n <= half)
      max_head = std::max(max_head, q);
    else
      max_tail = std::max(max_tail, q);
  }
  out.observed_max = std::max(max_head, max_tail);

  if (b.finite_set || b.bound || b.const_value) {
    out.v = {Verdict3::Holds, true};
    return out;
  }
  if (b.divergent || b.unbounded) {
    out.v = {Verdict3::Fails, true};
    return out;
  }
  if (out.observed_max > bound_cap)
    out.v = {Verdict3::Fails, false};
  else if (max_tail > max_head)
    out.v = {Verdict3::Fails, false};  // maxima still growing in the tail
  else
    out.v = {Verdict3::Inconclusive, false};
  return out;
}

ClassVerdict is_q_divergent(const SetPtr& A, const SeqPtr& seq, std::int64_t N) {
  RatioBehavior b = analyze_ratios(A, seq);
  if (b.finite_set) return {Verdict3::Holds, true};  // vacuously divergent
  if (b.divergent) return {Verdict3::Holds, true};
  if (b.recurrent) return {Verdict3::Fails, true};
  if (b.bound || b.const_value) return {Verdict3::Fails, true};

  // Running minima over tail segments must climb for divergence evidence.
  std::int64_t bound = std::min(N, A->enumeration_bound());
  const std::int64_t cut1 = bound / 2, cut2 = bound - bound / 4, cut3 = bound - bound / 8;
  std::int64_t mins[4] = {0, 0, 0, 0};
  bool seen[4] = {false, false, false, false};
  for (std::int64_t n = 1; n <= bound; ++n) {
    if (!A->contains(n)) continue;
    std::int64_t q = seq->ratio(n);
    int seg = n <= cut1 ? 0 : (n <= cut2 ? 1 : (n <= cut3 ? 2 : 3));
    if (!seen[seg] || q < mins[seg]) {
      mins[seg] = q;
      seen[seg] = true;
    }
  }
  if (!seen[0] || !seen[1] || !seen[2] || !seen[3]) return {Verdict3::Inconclusive, false};
  if (mins[0] < mins[1] && mins[1] < mins[2] && mins[2] < mins[3])
    return {Verdict3::Holds, false};
  if (mins[3] <= mins[0]) return {Verdict3::Fails, false};
  return {Verdict3::Inconclusive, false};
}

std::vector<LevelSetInfo> level_sets(const SeqPtr& seq, std::int64_t N) {
  if (N < 2) throw std::invalid_argument("level_sets needs N >= 2");
  std::vector<std::pair<std::int64_t, std::int64_t>> vn;  // (value, n)
  vn.reserve(static_cast<std::size_t>(N));
  for (std::int64_t n = 1; n <= N; ++n) vn.emplace_back(seq->ratio(n), n);
  std::sort(vn.begin(), vn.end());

  std::vector<LevelSetInfo> out;
  std::size_t i = 0;
  std::vector<std::int64_t> members;
  while (i < vn.size()) {
    std::int64_t v = vn[i].first;
    members.clear();
    while (i < vn.size() && vn[i].first == v) members.push_back(vn[i++].second);
    LevelSetInfo info;
    info.value = v;
    info.set = IndexSet::level_set(seq, v);
    info.density = density_estimate_from_members(members, N);
    info.density.exact = ratio_band_density(seq->rule(), BandKind::Eq, v);
    info.count = static_cast<std::int64_t>(members.size());
    info.last_member = members.back();
    out.push_back(std::move(info));
  }
  return out;
}

namespace {

// 99th percentile of the distinct observed values: the default M-search cap.
std::int64_t percentile99(const std::vector<LevelSetInfo>& levels) {
  if (levels.empty()) return 2;
  std::size_t idx = (levels.size() - 1) * 99 / 100;
  return levels[idx].value;
}

const RatioRule& effective_rule(const RatioRule& rule) {
  const RatioRule* r = &rule;
  while (r->kind == RKind::TableWithTail) r = r->tail.get();
  return *r;
}

SetPtr below_M_set(const SeqPtr& seq, const std::vector<LevelSetInfo>& levels, std::int64_t M) {
  std::vector<SetPtr> parts;
  for (const auto& l : levels)
    if (l.value < M) parts.push_back(l.set);
  return IndexSet::union_of(std::move(parts));
}

SplitWitness witness_all_bounded(std::int64_t bound) {
  return SplitWitness{IndexSet::all(), IndexSet::empty(), bound + 1};
}

SplitWitness witness_all_divergent() {
  return SplitWitness{IndexSet::empty(), IndexSet::all(), 2};
}

}  // namespace

SplitResult is_splitting(const SeqPtr& seq, std::int64_t N, std::int64_t M_cap) {
  SplitResult out;
  const RatioRule& rule = seq->rule();
  if (auto rb = rule.range_bound()) {
    out.v = {Verdict3::Holds, true};
    out.witness = witness_all_bounded(*rb);
    return out;
  }
  if (rule.divergent_everywhere()) {
    out.v = {Verdict3::Holds, true};
    out.witness = witness_all_divergent();
    return out;
  }
  const RatioRule& eff = effective_rule(rule);
  if (eff.kind == RKind::SquaresPartition || eff.kind == RKind::DyadicPartition) {
    // every level set is infinite, so no band [M,m] is finite
    out.v = {Verdict3::Fails, true};
    return out;
  }

  out.levels = level_sets(seq, N);
  std::int64_t cap = std::min(M_cap, percentile99(out.levels));
  std::int64_t half = N / 2;
  for (std::int64_t M = 2; M <= cap; ++M) {
    bool ok = true;
    for (const auto& l : out.levels)
      if (l.value >= M && l.last_member >= half) {
        ok = false;
        break;
      }
    if (ok) {
      out.v = {Verdict3::Holds, false};
      SetPtr B = below_M_set(seq, out.levels, M);
      out.witness = SplitWitness{B, IndexSet::complement(B), M};
      return out;
    }
  }
  out.v = {Verdict3::Fails, false};
  return out;
}

SplitResult is_d_splitting(const SeqPtr& seq, std::int64_t N, const Rat& threshold) {
  if (threshold <= 0 || threshold >= 1)
    throw std::invalid_argument("d-splitting threshold must lie in (0,1)");
  SplitResult out;
  const RatioRule& rule = seq->rule();
  if (auto rb = rule.range_bound()) {
    out.v = {Verdict3::Holds, true};
    out.witness = witness_all_bounded(*rb);
    return out;
  }
  if (rule.divergent_everywhere()) {
    out.v = {Verdict3::Holds, true};
    out.witness = witness_all_divergent();
    return out;
  }

  out.levels = level_sets(seq, N);
  std::int64_t max_value = out.levels.back().value;

  // Every bounded band [2,m] provably null: M = 2 works outright.
  auto le_probe = ratio_band_density(rule, BandKind::Le, 2 * max_value + 64);
  if (le_probe && *le_probe == 0) {
    out.v = {Verdict3::Holds, true};
    out.witness = witness_all_divergent();
    return out;
  }

  // Every level set provably positive (observed and beyond): no M can work.
  {
    bool all_positive = true;
    for (const auto& l : out.levels) {
      auto d = ratio_band_density(rule, BandKind::Eq, l.value);
      if (!d || *d == 0) {
        all_positive = false;
        break;
      }
    }
    for (std::int64_t v : {max_value + 1, 2 * max_value + 17}) {
      if (!all_positive) break;
      auto d = ratio_band_density(rule, BandKind::Eq, v);
      if (!d || *d == 0) all_positive = false;
    }
    if (all_positive) {
      out.v = {Verdict3::Fails, true};
      return out;
    }
  }

  // Prefix evidence: positive-density values must be bounded by some M with
  // everything above individually null.
  std::int64_t max_positive = 0;
  for (const auto& l : out.levels) {
    bool positive = l.density.exact ? (*l.density.exact > 0) : (l.density.window_low > threshold);
    if (positive) max_positive = std::max(max_positive, l.value);
  }
  if (max_positive >= max_value) {
    out.v = {Verdict3::Fails, false};  // positive-density values reach the observed top
    return out;
  }
  std::int64_t M = max_positive > 0 ? max_positive + 1 : 2;
  for (const auto& l : out.levels) {
    if (l.value < M) continue;
    bool small = l.density.exact ? (*l.density.exact == 0) : (l.density.window_high <= threshold);
    if (!small) {
      out.v = {Verdict3::Inconclusive, false};
      return out;
    }
  }
  out.v = {Verdict3::Holds, false};
  SetPtr B = below_M_set(seq, out.levels, M);
  out.witness = SplitWitness{B, IndexSet::complement(B), M};
  return out;
}

ExtractResult extract_q_divergent(const SetPtr& A, const SeqPtr& seq, std::int64_t N,
                                  const Rat& budget) {
  if (budget <= 0 || budget >= 1) throw std::invalid_argument("budget must lie in (0,1)");
  ExtractResult out;
  RatioBehavior b = analyze_ratios(A, seq);
  if (b.divergent) {
    out.B = A;
    out.cover = IndexSet::empty();
    out.residual.N = N;
    out.residual.count = 0;
    out.residual.point = Rat(0);
    out.residual.window_low = Rat(0);
    out.residual.window_high = Rat(0);
    out.residual.exact = Rat(0);
    return out;
  }

  std::int64_t bound = std::min(N, A->enumeration_bound());
  std::map<std::int64_t, std::vector<std::int64_t>> cells;  // value -> members of A
  for (std::int64_t n = 1; n <= bound; ++n)
    if (A->contains(n)) cells[seq->ratio(n)].push_back(n);

  // Precondition: no level set of A may carry positive density.
  for (const auto& [v, members] : cells) {
    auto cell = IndexSet::intersection_of({IndexSet::level_set(seq, v), A});
    auto exact = cell->exact_density();
    if (exact && *exact > 0)
      throw std::runtime_error("extract_q_divergent: level set at value " + std::to_string(v) +
                               " has exact density " + rat_str(*exact) + " on A");
    if (!exact) {
      auto est = density_estimate_from_members(members, N);
      if (est.window_low > budget)
        throw std::runtime_error("extract_q_divergent: level set at value " + std::to_string(v) +
                                 " has positive density evidence " + rat_str(est.window_low) +
                                 " on A");
    }
  }

  // Geometric budget shares, low values first: B keeps only the head of each
  // low-ratio cell, so the running minimum of q over B climbs past every bound.
  std::vector<std::int64_t> cover;
  Rat share = budget;
  for (const auto& [v, members] : cells) {
    share /= 2;
    Rat cap = share * Rat(N) / 2;
    Int cap_floor;
    mpz_fdiv_q(cap_floor.get_mpz_t(), cap.get_num_mpz_t(), cap.get_den_mpz_t());
    std::int64_t allowed =
        cap_floor.fits_slong_p() ? cap_floor.get_si() : static_cast<std::int64_t>(members.size());
    allowed = std::min<std::int64_t>(allowed, static_cast<std::int64_t>(members.size()));
    std::int64_t t;
    if (allowed >= static_cast<std::int64_t>(members.size()))
      t = 0;
    else if (allowed == 0)
      t = members.back();
    else
      t = members[members.size() - static_cast<std::size_t>(allowed) - 1];
    out.thresholds.emplace_back(v, t);
    for (auto m : members)
      if (m > t) cover.push_back(m);
  }
  std::sort(cover.begin(), cover.end());
  out.residual = density_estimate_from_members(cover, N);
  out.cover = cover.empty() ? IndexSet::empty() : IndexSet::finite(cover);
  out.B = IndexSet::difference(A, out.cover);
  return out;
}

json classify_report(const SeqPtr& seq, std::int64_t N, const Rat& threshold,
                     std::int64_t M_cap) {
  SplitResult sp = is_splitting(seq, N, M_cap);
  SplitResult dsp = is_d_splitting(seq, N, threshold);
  auto verdict_json = [](const ClassVerdict& v) {
    return json{{"verdict", to_string(v.verdict)}, {"certain", v.certain}};
  };
  json j{{"prefix", N},
         {"threshold", rat_to_json(threshold)},
         {"splitting", verdict_json(sp.v)},
         {"d_splitting", verdict_json(dsp.v)}};
  if (dsp.witness) {
    j["witness"] = json{{"M", dsp.witness->M},
                        {"B_spec", set_to_json(*dsp.witness->B)},
                        {"D_spec", set_to_json(*dsp.witness->D)}};
  }
  auto levels = dsp.levels.empty() ? level_sets(seq, std::min<std::int64_t>(N, 100000)) : dsp.levels;
  std::sort(levels.begin(), levels.end(), [](const LevelSetInfo& a, const LevelSetInfo& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.value < b.value;
  });
  json lv = json::array();
  for (std::size_t i = 0; i < levels.size() && i < 32; ++i) {
    json e{{"value", levels[i].value},
           {"count", levels[i].count},
           {"point", rat_to_json(levels[i].density.point)}};
    if (levels[i].density.exact) e["exact"] = rat_to_json(*levels[i].density.exact);
    lv.push_back(std::move(e));
  }
  j["level_sets"] = lv;
  return j;
}

}  // namespace storsion
