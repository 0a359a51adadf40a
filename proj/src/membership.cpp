#include "membership.hpp"

#include <algorithm>

namespace storsion {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Member:
      return "member";
    case Outcome::NonMember:
      return "non_member";
    case Outcome::Undecided:
      return "undecided";
  }
  return "?";
}

namespace {

// Limit patterns along a set S, judged through the restricted-density
// machinery: pass iff exceptional members have relative prefix density
// within the threshold.
enum class LimitKind { NormToZero, RatioToZero, RatioToOne };

struct LimitSpec {
  LimitKind kind;
  std::int64_t shift = 0;  // digit index n + shift
};

struct LimitOutcome {
  Verdict3 verdict = Verdict3::Inconclusive;
  bool certain = false;
  std::int64_t member_count = 0;
  DensityEstimate exceptional;  // relative, member-indexed
  std::string note;
};

bool digit_exceptional(const PreparedElement& e, std::int64_t idx, LimitKind kind,
                       const Rat& eps) {
  std::int64_t c = e.digit(idx);
  std::int64_t q = e.ratio(idx);
  switch (kind) {
    case LimitKind::NormToZero: {
      if (c == 0) return false;
      Rat v = make_rat(c, q);
      return circle_norm(v) >= eps;
    }
    case LimitKind::RatioToZero:
      return make_rat(c, q) >= eps;
    case LimitKind::RatioToOne:
      return make_rat(q - 1 - c, q) >= eps;  // |(c+1)/q - 1|
  }
  return false;
}

// Structural fast path: when the digits are indicator-valued, the exceptional
// set is S ∩ (ratio band), possibly shifted; exact density zero settles the
// limit with certainty.
std::optional<bool> structural_limit_zero(const PreparedElement& e, const SetPtr& S,
                                          const LimitSpec& spec, const Rat& eps) {
  if (!e.structural_support || e.x.is_rational()) return std::nullopt;
  const DigitRule& rule = e.x.rule();
  if (rule.kind != DigitRule::Kind::Indicator || rule.value == DigitValue::Custom)
    return std::nullopt;

  // Exceptional values of q at the shifted index:
  //   One, NormToZero/RatioToZero: c/q = 1/q >= eps       <=> q <= floor(1/eps)
  //   QMinusOne, NormToZero:       norm = 1/q >= eps      <=> q <= floor(1/eps)
  //   One, RatioToOne:             1 - 2/q >= eps         <=> q >= 3 (eps <= 1/3)
  //   QMinusOne, RatioToOne:       exact 1, never exceptional on the support
  //   QMinusOne, RatioToZero:      (q-1)/q >= eps always  -> no shortcut
  SetPtr band;  // indices whose digit makes the value exceptional
  bool off_support_exceptional = false;
  Rat inv = 1 / eps;
  Int k0_z;
  mpz_fdiv_q(k0_z.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
  std::int64_t k0 = k0_z.get_si();

  auto low_band = [&]() -> SetPtr {
    std::vector<SetPtr> parts;
    for (std::int64_t v = 2; v <= std::min<std::int64_t>(k0, 4096); ++v)
      parts.push_back(IndexSet::level_set(e.seq, v));
    return IndexSet::union_of(std::move(parts));
  };

  if (rule.value == DigitValue::One || rule.value == DigitValue::QMinusOne) {
    switch (spec.kind) {
      case LimitKind::NormToZero:
        band = IndexSet::intersection_of({e.supp, low_band()});
        break;
      case LimitKind::RatioToZero:
        if (rule.value == DigitValue::QMinusOne) return std::nullopt;
        band = IndexSet::intersection_of({e.supp, low_band()});
        break;
      case LimitKind::RatioToOne:
        if (eps > make_rat(1, 3)) return std::nullopt;
        if (rule.value == DigitValue::QMinusOne) {
          // (c+1)/q = 1 exactly on the support; off-support (0+1)/q misses 1.
          band = e.supp;
          off_support_exceptional = true;
        } else {
          band = IndexSet::intersection_of(
              {e.supp, IndexSet::complement(IndexSet::level_set(e.seq, 2))});
          off_support_exceptional = true;
        }
        break;
    }
  }
  if (!band) return std::nullopt;

  SetPtr exceptional_at;  // at the digit index
  if (off_support_exceptional) {
    if (spec.kind == LimitKind::RatioToOne && rule.value == DigitValue::QMinusOne)
      exceptional_at = IndexSet::complement(e.supp);
    else
      exceptional_at =
          IndexSet::union_of({band, IndexSet::complement(e.supp)});
  } else {
    exceptional_at = band;
  }
  SetPtr exceptional = IndexSet::intersection_of(
      {S, IndexSet::shift(exceptional_at, -spec.shift)});
  auto d = exceptional->exact_density();
  if (d && *d == 0) return true;
  return std::nullopt;
}

LimitOutcome limit_check(const PreparedElement& e, const SetPtr& S, const LimitSpec& spec,
                         const Rat& eps, const Rat& threshold) {
  LimitOutcome out;
  if (auto fast = structural_limit_zero(e, S, spec, eps); fast == true) {
    out.verdict = Verdict3::Holds;
    out.certain = true;
    out.note = "exceptional set has exact density zero";
    return out;
  }

  std::int64_t N = e.params.N;
  std::vector<std::uint8_t> flags;
  flags.push_back(0);
  std::int64_t bound = std::min(N, S->enumeration_bound());
  for (std::int64_t n = 1; n <= bound; ++n) {
    if (!S->contains(n)) continue;
    flags.push_back(digit_exceptional(e, n + spec.shift, spec.kind, eps));
  }
  out.member_count = static_cast<std::int64_t>(flags.size()) - 1;
  if (out.member_count == 0) {
    out.verdict = Verdict3::Holds;  // nothing to refute along an empty prefix
    out.note = "no members in prefix";
    return out;
  }
  ExceptionalStats st = tally_flags(flags, out.member_count, threshold);
  out.exceptional = st.density;
  if (st.density.window_high <= threshold)
    out.verdict = Verdict3::Holds;
  else if (st.density.window_low > threshold)
    out.verdict = Verdict3::Fails;
  else
    out.verdict = Verdict3::Inconclusive;
  return out;
}

Witness make_witness(std::string condition, const SetPtr& set,
                     std::optional<DensityEstimate> density) {
  Witness w;
  w.condition = std::move(condition);
  w.set_desc = set ? set->describe() : "";
  w.density = std::move(density);
  return w;
}

MembershipVerdict member_verdict(std::string rule, bool certain) {
  MembershipVerdict v;
  v.outcome = Outcome::Member;
  v.certain = certain;
  v.rule_fired = std::move(rule);
  return v;
}

MembershipVerdict nonmember_verdict(std::string rule, Witness w, bool certain) {
  MembershipVerdict v;
  v.outcome = Outcome::NonMember;
  v.certain = certain;
  v.rule_fired = std::move(rule);
  v.witness = std::move(w);
  return v;
}

MembershipVerdict undecided_verdict(std::string rule) {
  MembershipVerdict v;
  v.outcome = Outcome::Undecided;
  v.rule_fired = std::move(rule);
  return v;
}

// Probes for the universally-quantified clauses: residue classes, squares and
// complement, the sequence's heaviest level sets, their small shifts, and the
// L_k closures of the residue classes.
struct Probe {
  SetPtr set;
  std::string desc;
};

std::vector<Probe> standard_probes(const PreparedElement& e) {
  const auto& p = e.params;
  std::vector<Probe> probes;
  for (int m = 2; m <= p.mod_max; ++m)
    for (int r = 1; r <= m; ++r)
      probes.push_back({IndexSet::ap(r, m),
                        "ap(" + std::to_string(r) + "," + std::to_string(m) + ")"});
  std::size_t ap_count = probes.size();
  probes.push_back({IndexSet::squares(), "squares"});
  probes.push_back({IndexSet::complement(IndexSet::squares()), "co(squares)"});

  auto levels = level_sets(e.seq, std::min<std::int64_t>(p.N, 100000));
  std::sort(levels.begin(), levels.end(), [](const LevelSetInfo& a, const LevelSetInfo& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.value < b.value;
  });
  std::vector<SetPtr> level_bases;
  for (std::size_t i = 0; i < levels.size() && i < 6; ++i) {
    probes.push_back({levels[i].set, "level(q=" + std::to_string(levels[i].value) + ")"});
    level_bases.push_back(levels[i].set);
  }
  for (int s = 1; s <= p.shift_max; ++s) {
    probes.push_back({IndexSet::shift(IndexSet::squares(), s), "squares+" + std::to_string(s)});
    for (std::size_t i = 0; i < level_bases.size(); ++i)
      probes.push_back({IndexSet::shift(level_bases[i], s),
                        "level(q=" + std::to_string(levels[i].value) + ")+" + std::to_string(s)});
  }
  for (std::size_t i = 0; i < ap_count; ++i) {
    std::int64_t m = probes[i].set->step();
    for (int k = 1; k <= p.lk_max && k < m - 1; ++k)
      probes.push_back({shift_union(probes[i].set, k),
                        "L" + std::to_string(k) + "(" + probes[i].desc + ")"});
  }
  return probes;
}

bool positive_density(const DensityEstimate& d, const Rat& threshold) {
  return d.exact ? (*d.exact > threshold) : (d.window_low > threshold);
}

}  // namespace

PreparedElement prepare_element(const CircleElement& x, SeqPtr seq, const MembershipParams& p) {
  if (p.N < 4) throw std::invalid_argument("membership prefix must be >= 4");
  PreparedElement e{x, std::move(seq), p, nullptr, nullptr, nullptr, false, false};
  std::int64_t slack = p.lk_max + 8;
  e.digits = std::make_shared<ExpansionPrefix>(digits_prefix(x, e.seq, p.N + slack));
  std::int64_t bound = p.N + slack;

  auto empirical_supports = [&]() {
    auto digits = e.digits;
    auto seq_local = e.seq;
    e.supp = IndexSet::predicate([digits](std::int64_t n) { return digits->digit(n) != 0; },
                                 bound, "supp(x)");
    e.supp_q = IndexSet::predicate(
        [digits, seq_local](std::int64_t n) {
          return digits->digit(n) == seq_local->ratio(n) - 1;
        },
        bound, "supp_q(x)");
  };

  if (x.is_rational()) {
    if (e.digits->terminated) {
      std::vector<std::int64_t> s, sq;
      for (std::int64_t n = 1; n <= e.digits->termination_index; ++n) {
        if (e.digits->digit(n) != 0) s.push_back(n);
        if (e.digits->digit(n) == e.ratio(n) - 1) sq.push_back(n);
      }
      e.supp = IndexSet::finite(std::move(s));
      e.supp_q = IndexSet::finite(std::move(sq));
      e.structural_support = true;
      e.finite_support_certain = true;
    } else {
      empirical_supports();
    }
    return e;
  }

  const DigitRule& rule = x.rule();
  switch (rule.kind) {
    case DigitRule::Kind::Indicator: {
      if (rule.value == DigitValue::Custom) {
        empirical_supports();
        break;
      }
      e.supp = rule.support;
      e.structural_support = true;
      if (rule.support->infinite() == false) e.finite_support_certain = true;
      if (rule.value == DigitValue::QMinusOne) {
        e.supp_q = rule.support;
      } else {
        SetPtr l2 = IndexSet::level_set(e.seq, 2);
        auto sub = rule.support->subset_of(l2);
        if (sub == true)
          e.supp_q = rule.support;
        else if (rule.support->disjoint_with(l2) == true)
          e.supp_q = IndexSet::empty();
        else
          e.supp_q = IndexSet::intersection_of({rule.support, l2});
      }
      break;
    }
    case DigitRule::Kind::PrefixThenZero: {
      std::vector<std::int64_t> s, sq;
      for (std::int64_t n = 1; n <= static_cast<std::int64_t>(rule.prefix.size()); ++n) {
        if (e.digits->digit(n) != 0) s.push_back(n);
        if (e.digits->digit(n) == e.ratio(n) - 1) sq.push_back(n);
      }
      e.supp = IndexSet::finite(std::move(s));
      e.supp_q = IndexSet::finite(std::move(sq));
      e.structural_support = true;
      e.finite_support_certain = true;
      break;
    }
    case DigitRule::Kind::EventuallyPeriodic: {
      std::int64_t nz = 0;
      for (auto c : rule.period)
        if (c != 0) ++nz;
      if (nz == 0) {
        std::vector<std::int64_t> s, sq;
        for (std::int64_t n = 1; n <= static_cast<std::int64_t>(rule.prefix.size()); ++n) {
          if (e.digits->digit(n) != 0) s.push_back(n);
          if (e.digits->digit(n) == e.ratio(n) - 1) sq.push_back(n);
        }
        e.supp = IndexSet::finite(std::move(s));
        e.supp_q = IndexSet::finite(std::move(sq));
        e.structural_support = true;
        e.finite_support_certain = true;
      } else {
        auto digits = e.digits;
        Rat exact = make_rat(nz, static_cast<std::int64_t>(rule.period.size()));
        e.supp = IndexSet::predicate([digits](std::int64_t n) { return digits->digit(n) != 0; },
                                     bound, "supp(x)", exact);
        auto seq_local = e.seq;
        std::optional<Rat> sq_exact;
        if (e.seq->rule().kind == RatioRule::Kind::Constant) {
          std::int64_t q = e.seq->rule().q;
          std::int64_t hits = 0;
          for (auto c : rule.period)
            if (c == q - 1) ++hits;
          sq_exact = make_rat(hits, static_cast<std::int64_t>(rule.period.size()));
        }
        e.supp_q = IndexSet::predicate(
            [digits, seq_local](std::int64_t n) {
              return digits->digit(n) == seq_local->ratio(n) - 1;
            },
            bound, "supp_q(x)", sq_exact);
      }
      break;
    }
    case DigitRule::Kind::Custom:
      empirical_supports();
      break;
  }
  return e;
}

std::optional<MembershipVerdict> check_zero_support(const PreparedElement& e) {
  DensityEstimate d = density_estimate(*e.supp, e.params.N);
  if (d.upper() <= e.params.threshold) {
    MembershipVerdict v =
        member_verdict("thm2.1:zero-support", d.exact.has_value() || e.finite_support_certain);
    v.witness = make_witness("d(supp(x)) = 0 at threshold", e.supp, d);
    return v;
  }
  return std::nullopt;
}

MembershipVerdict check_cor_qbounded(const PreparedElement& e) {
  const auto& p = e.params;
  QBoundedResult qb = is_q_bounded(e.supp, e.seq, p.N, p.bound_cap);
  if (qb.v.verdict == Verdict3::Fails && qb.v.certain)
    throw std::logic_error("dispatcher misuse: support is not q-bounded");
  SetPtr supp_plus1 = IndexSet::shift(e.supp, 1);
  SubsetVerdict c1 = subset_d(supp_plus1, e.supp, p.N, p.threshold);
  if (c1.verdict == Verdict3::Fails)
    return nonmember_verdict(
        "cor2.9:(i)",
        make_witness("(supp+1) \\ supp has positive density",
                     IndexSet::difference(supp_plus1, e.supp), c1.residual),
        c1.residual.exact.has_value());
  SubsetVerdict c2 = subset_d(e.supp, e.supp_q, p.N, p.threshold);
  if (c2.verdict == Verdict3::Fails)
    return nonmember_verdict(
        "cor2.9:(ii)",
        make_witness("supp \\ supp_q has positive density",
                     IndexSet::difference(e.supp, e.supp_q), c2.residual),
        c2.residual.exact.has_value());
  if (c1.verdict == Verdict3::Holds && c2.verdict == Verdict3::Holds)
    return member_verdict("cor2.9",
                          c1.residual.exact.has_value() && c2.residual.exact.has_value());
  return undecided_verdict("cor2.9:inconclusive");
}

MembershipVerdict check_cor_qdivergent(const PreparedElement& e) {
  const auto& p = e.params;
  ClassVerdict qd = is_q_divergent(e.supp, e.seq, p.N);
  if (qd.verdict == Verdict3::Fails && qd.certain)
    throw std::logic_error("dispatcher misuse: support is not q-divergent");

  // Closing-observation shortcut: ratios trapped in a window [r1,r2] ⊂ (0,1).
  {
    std::int64_t bound = std::min(p.N, e.supp->enumeration_bound());
    std::optional<Rat> lo, hi;
    std::int64_t members = 0;
    for (std::int64_t n = 1; n <= bound; ++n) {
      if (!e.supp->contains(n)) continue;
      ++members;
      Rat r = make_rat(e.digit(n), e.ratio(n));
      if (!lo || r < *lo) lo = r;
      if (!hi || r > *hi) hi = r;
    }
    DensityEstimate sd = density_estimate(*e.supp, p.N);
    if (members > 0 && positive_density(sd, p.threshold) && *lo >= p.eps_limit &&
        *hi <= 1 - p.eps_limit) {
      auto w = make_witness("c_n/q_n stays in [" + rat_str(*lo) + "," + rat_str(*hi) +
                                "] on a positive-density support",
                            e.supp, sd);
      return nonmember_verdict("bullet:n2", std::move(w), false);
    }
  }

  LimitOutcome c1 = limit_check(e, e.supp, {LimitKind::NormToZero, 0}, p.eps_limit, p.threshold);
  if (c1.verdict == Verdict3::Fails)
    return nonmember_verdict(
        "cor2.10:(i)",
        make_witness("circle_norm(c_n/q_n) not statistically 0 along supp", e.supp,
                     c1.exceptional),
        c1.certain);
  bool inconclusive = (c1.verdict == Verdict3::Inconclusive);

  for (const auto& probe : standard_probes(e)) {
    DensityEstimate pd = density_estimate(*probe.set, p.N);
    if (!positive_density(pd, p.threshold)) continue;
    SetPtr d_minus1 = IndexSet::shift(probe.set, -1);
    QBoundedResult qb = is_q_bounded(d_minus1, e.seq, p.N, p.bound_cap);
    if (qb.v.verdict != Verdict3::Holds) continue;
    SubsetVerdict inside = subset_d(probe.set, e.supp, p.N, p.threshold);
    if (inside.verdict != Verdict3::Holds) continue;
    LimitOutcome lc = limit_check(e, probe.set, {LimitKind::RatioToZero, 0}, p.eps_limit,
                                  p.threshold);
    if (lc.verdict == Verdict3::Fails)
      return nonmember_verdict(
          "cor2.10:(ii)",
          make_witness("c_n/q_n not -> 0 in R along " + probe.desc + " (D-1 q-bounded)",
                       probe.set, lc.exceptional),
          lc.certain && qb.v.certain);
    if (lc.verdict == Verdict3::Inconclusive) inconclusive = true;
  }
  if (inconclusive) return undecided_verdict("cor2.10:inconclusive");
  return member_verdict("cor2.10", c1.certain);
}

MembershipVerdict check_thm_dsplitting(const PreparedElement& e, const SplitWitness& w) {
  const auto& p = e.params;
  SetPtr b_s = IndexSet::intersection_of({w.B, e.supp});
  SetPtr b_n = IndexSet::difference(w.B, e.supp);
  SetPtr d_s = IndexSet::intersection_of({w.D, e.supp});

  bool inconclusive = false;
  bool certain = true;

  DensityEstimate d_bs = density_estimate(*b_s, p.N);
  if (positive_density(d_bs, p.threshold)) {
    SubsetVerdict s1 = subset_d(IndexSet::shift(b_s, 1), e.supp, p.N, p.threshold);
    if (s1.verdict == Verdict3::Fails)
      return nonmember_verdict("thm2.8:(i)",
                               make_witness("B_S+1 not ⊆^d supp", b_s, s1.residual),
                               s1.residual.exact.has_value());
    SubsetVerdict s2 = subset_d(b_s, e.supp_q, p.N, p.threshold);
    if (s2.verdict == Verdict3::Fails)
      return nonmember_verdict("thm2.8:(i)",
                               make_witness("B_S not ⊆^d supp_q", b_s, s2.residual),
                               s2.residual.exact.has_value());
    LimitOutcome l1 = limit_check(e, b_s, {LimitKind::RatioToOne, 1}, p.eps_limit, p.threshold);
    if (l1.verdict == Verdict3::Fails)
      return nonmember_verdict(
          "thm2.8:(i)",
          make_witness("(c_{n+1}+1)/q_{n+1} not -> 1 along B_S", b_s, l1.exceptional),
          l1.certain);
    if (s1.verdict == Verdict3::Inconclusive || s2.verdict == Verdict3::Inconclusive ||
        l1.verdict == Verdict3::Inconclusive)
      inconclusive = true;
    certain = certain && s1.residual.exact.has_value() && s2.residual.exact.has_value() &&
              l1.certain;
  }

  DensityEstimate d_bn = density_estimate(*b_n, p.N);
  if (positive_density(d_bn, p.threshold)) {
    LimitOutcome l2 = limit_check(e, b_n, {LimitKind::RatioToZero, 1}, p.eps_limit, p.threshold);
    if (l2.verdict == Verdict3::Fails)
      return nonmember_verdict(
          "thm2.8:(ii)",
          make_witness("c_{n+1}/q_{n+1} not -> 0 in R along B_N", b_n, l2.exceptional),
          l2.certain);
    if (l2.verdict == Verdict3::Inconclusive) inconclusive = true;
    certain = certain && l2.certain;
  }

  DensityEstimate d_ds = density_estimate(*d_s, p.N);
  if (positive_density(d_ds, p.threshold)) {
    LimitOutcome l3 = limit_check(e, d_s, {LimitKind::NormToZero, 0}, p.eps_limit, p.threshold);
    if (l3.verdict == Verdict3::Fails)
      return nonmember_verdict(
          "thm2.8:(iii)",
          make_witness("circle_norm(c_n/q_n) not -> 0 along D_S", d_s, l3.exceptional),
          l3.certain);
    if (l3.verdict == Verdict3::Inconclusive) inconclusive = true;
    certain = certain && l3.certain;
  }

  if (inconclusive) return undecided_verdict("thm2.8:inconclusive");
  return member_verdict("thm2.8", certain);
}

namespace {

MembershipVerdict with_oracle(MembershipVerdict v, const PreparedElement& e) {
  if (v.outcome == Outcome::Undecided && !v.oracle_summary) {
    const auto& p = e.params;
    v.oracle_summary = std::make_shared<OracleReport>(
        oracle_membership(e.x, e.seq, p.N, p.eps_grid, p.delta, p.parallelism));
  }
  return v;
}

MembershipVerdict probe_engine(const PreparedElement& e) {
  const auto& p = e.params;
  for (const auto& probe : standard_probes(e)) {
    DensityEstimate pd = density_estimate(*probe.set, p.N);
    if (!positive_density(pd, p.threshold)) continue;

    QBoundedResult qb = is_q_bounded(probe.set, e.seq, p.N, p.bound_cap);
    if (qb.v.verdict == Verdict3::Holds) {
      SubsetVerdict in_supp = subset_d(probe.set, e.supp, p.N, p.threshold);
      DensityEstimate meet = density_estimate(
          *IndexSet::intersection_of({probe.set, e.supp}), p.N);
      if (in_supp.verdict == Verdict3::Holds) {
        // (a1)
        SubsetVerdict a1 = subset_d(IndexSet::shift(probe.set, 1), e.supp, p.N, p.threshold);
        if (a1.verdict == Verdict3::Fails)
          return nonmember_verdict(
              "thm2.1:(a1)",
              make_witness("A+1 not ⊆^d supp for A = " + probe.desc, probe.set, a1.residual),
              a1.residual.exact.has_value() && qb.v.certain);
        SubsetVerdict a1q = subset_d(probe.set, e.supp_q, p.N, p.threshold);
        if (a1q.verdict == Verdict3::Fails)
          return nonmember_verdict(
              "thm2.1:(a1)",
              make_witness("A not ⊆^d supp_q for A = " + probe.desc, probe.set, a1q.residual),
              a1q.residual.exact.has_value() && qb.v.certain);
        LimitOutcome lim = limit_check(e, probe.set, {LimitKind::RatioToOne, 1}, p.eps_limit,
                                       p.threshold);
        if (lim.verdict == Verdict3::Fails)
          return nonmember_verdict(
              "thm2.1:(a1)",
              make_witness("(c_{n+1}+1)/q_{n+1} not -> 1 along A = " + probe.desc, probe.set,
                           lim.exceptional),
              lim.certain && qb.v.certain);
        SetPtr a_plus1 = IndexSet::shift(probe.set, 1);
        if (is_q_bounded(a_plus1, e.seq, p.N, p.bound_cap).v.verdict == Verdict3::Holds) {
          SubsetVerdict mv = subset_d(a_plus1, e.supp_q, p.N, p.threshold);
          if (mv.verdict == Verdict3::Fails)
            return nonmember_verdict(
                "thm2.1:(a1):moreover",
                make_witness("A+1 q-bounded but not ⊆^d supp_q, A = " + probe.desc, a_plus1,
                             mv.residual),
                mv.residual.exact.has_value());
        }
        // Iterated closure clauses.
        for (int k = 1; k <= p.lk_max; ++k) {
          SetPtr lk = shift_union(probe.set, k);
          if (is_q_bounded(lk, e.seq, p.N, p.bound_cap).v.verdict != Verdict3::Holds) break;
          SubsetVerdict cv = subset_d(lk, e.supp_q, p.N, p.threshold);
          if (cv.verdict == Verdict3::Fails)
            return nonmember_verdict(
                "claim2.2:(i)",
                make_witness("L_" + std::to_string(k) + "(A) not ⊆^d supp_q, A = " + probe.desc,
                             lk, cv.residual),
                cv.residual.exact.has_value());
          LimitOutcome il = limit_check(e, probe.set, {LimitKind::RatioToOne, k + 1},
                                        p.eps_limit, p.threshold);
          if (il.verdict == Verdict3::Fails)
            return nonmember_verdict(
                "claim2.2:(i)",
                make_witness("(c_{n+k+1}+1)/q_{n+k+1} not -> 1 along A = " + probe.desc +
                                 ", k = " + std::to_string(k),
                             probe.set, il.exceptional),
                il.certain);
        }
      } else if (meet.upper() <= p.threshold) {
        // (a2)
        LimitOutcome lim = limit_check(e, probe.set, {LimitKind::RatioToZero, 1}, p.eps_limit,
                                       p.threshold);
        if (lim.verdict == Verdict3::Fails)
          return nonmember_verdict(
              "thm2.1:(a2)",
              make_witness("c_{n+1}/q_{n+1} not -> 0 in R along A = " + probe.desc, probe.set,
                           lim.exceptional),
              lim.certain && qb.v.certain);
        SetPtr a_plus1 = IndexSet::shift(probe.set, 1);
        if (is_q_bounded(a_plus1, e.seq, p.N, p.bound_cap).v.verdict == Verdict3::Holds) {
          DensityEstimate m1 = density_estimate(
              *IndexSet::intersection_of({a_plus1, e.supp}), p.N);
          if (positive_density(m1, p.threshold))
            return nonmember_verdict(
                "thm2.1:(a2):moreover",
                make_witness("(A+1) ∩ supp has positive density, A = " + probe.desc, a_plus1,
                             m1),
                m1.exact.has_value());
        }
        for (int k = 1; k <= p.lk_max; ++k) {
          SetPtr lk = shift_union(probe.set, k);
          if (is_q_bounded(lk, e.seq, p.N, p.bound_cap).v.verdict != Verdict3::Holds) break;
          DensityEstimate mk = density_estimate(
              *IndexSet::intersection_of({lk, e.supp}), p.N);
          if (positive_density(mk, p.threshold))
            return nonmember_verdict(
                "claim2.2:(ii)",
                make_witness("L_" + std::to_string(k) + "(A) ∩ supp has positive density, A = " +
                                 probe.desc,
                             lk, mk),
                mk.exact.has_value());
          LimitOutcome il = limit_check(e, probe.set, {LimitKind::RatioToZero, k + 1},
                                        p.eps_limit, p.threshold);
          if (il.verdict == Verdict3::Fails)
            return nonmember_verdict(
                "claim2.2:(ii)",
                make_witness("c_{n+k+1}/q_{n+k+1} not -> 0 along A = " + probe.desc +
                                 ", k = " + std::to_string(k),
                             probe.set, il.exceptional),
                il.certain);
        }
      }
      continue;
    }

    ClassVerdict qd = is_q_divergent(probe.set, e.seq, p.N);
    if (qd.verdict == Verdict3::Holds) {
      // (b), restricted to subsets of the support
      SetPtr meet = IndexSet::intersection_of({probe.set, e.supp});
      DensityEstimate md = density_estimate(*meet, p.N);
      if (!positive_density(md, p.threshold)) continue;
      LimitOutcome lim = limit_check(e, meet, {LimitKind::NormToZero, 0}, p.eps_limit,
                                     p.threshold);
      if (lim.verdict == Verdict3::Fails)
        return nonmember_verdict(
            "thm2.1:(b)",
            make_witness("circle_norm(c_n/q_n) not -> 0 along A ∩ supp, A = " + probe.desc,
                         meet, lim.exceptional),
            lim.certain && qd.certain);
    }
  }
  return undecided_verdict("thm2.1:probes-exhausted");
}

}  // namespace

MembershipVerdict check_thm_main(const PreparedElement& e) {
  const auto& p = e.params;
  if (auto z = check_zero_support(e)) return *z;

  QBoundedResult qb = is_q_bounded(e.supp, e.seq, p.N, p.bound_cap);
  if (qb.v.verdict == Verdict3::Holds) return with_oracle(check_cor_qbounded(e), e);

  ClassVerdict qd = is_q_divergent(e.supp, e.seq, p.N);
  if (qd.verdict == Verdict3::Holds) return with_oracle(check_cor_qdivergent(e), e);

  SplitResult ds = is_d_splitting(e.seq, p.N, p.threshold);
  if (ds.v.verdict == Verdict3::Holds && ds.witness)
    return with_oracle(check_thm_dsplitting(e, *ds.witness), e);

  return with_oracle(probe_engine(e), e);
}

MembershipVerdict check_thm_main(const CircleElement& x, SeqPtr seq, const MembershipParams& p) {
  PreparedElement e = prepare_element(x, std::move(seq), p);
  return check_thm_main(e);
}

std::vector<BulletReport> check_bullets(const PreparedElement& e) {
  const auto& p = e.params;
  std::vector<BulletReport> out;
  ClassVerdict qd = is_q_divergent(e.supp, e.seq, p.N);
  QBoundedResult qb = is_q_bounded(e.supp, e.seq, p.N, p.bound_cap);
  DensityEstimate sd = density_estimate(*e.supp, p.N);

  {  // s1: q-divergent support, c_n/q_n -> 0 in R off density zero
    BulletReport r{"s1", false, Outcome::Undecided, ""};
    if (qd.verdict == Verdict3::Holds) {
      LimitOutcome lc = limit_check(e, e.supp, {LimitKind::RatioToZero, 0}, p.eps_limit,
                                    p.threshold);
      if (lc.verdict == Verdict3::Holds) {
        r.applies = true;
        r.implied = Outcome::Member;
        r.note = "c_n/q_n -> 0 in R along supp";
      }
    }
    out.push_back(std::move(r));
  }
  {  // s2: q-divergent support with bounded digits off density zero
    BulletReport r{"s2", false, Outcome::Undecided, ""};
    if (qd.verdict == Verdict3::Holds) {
      std::int64_t bound = std::min(p.N, e.supp->enumeration_bound());
      std::int64_t half = bound / 2, head = 0, tail = 0, nh = 0, nt = 0;
      for (std::int64_t n = 1; n <= bound; ++n) {
        if (!e.supp->contains(n)) continue;
        std::int64_t c = e.digit(n);
        if (n <= half) {
          head = std::max(head, c);
          ++nh;
        } else {
          tail = std::max(tail, c);
          ++nt;
        }
      }
      if (nh > 0 && nt > 0 && tail <= head) {
        r.applies = true;
        r.implied = Outcome::Member;
        r.note = "digits bounded by " + std::to_string(head) + " along supp";
      }
    }
    out.push_back(std::move(r));
  }
  {  // s3: q-divergent on a density-one set: membership <=> norm(c/q) -> 0
    BulletReport r{"s3", false, Outcome::Undecided, ""};
    SplitResult ds = is_d_splitting(e.seq, p.N, p.threshold);
    if (ds.v.verdict == Verdict3::Holds && ds.witness) {
      DensityEstimate bd = density_estimate(*ds.witness->B, p.N);
      if (bd.upper() <= p.threshold) {
        r.applies = true;
        LimitOutcome lc = limit_check(e, e.supp, {LimitKind::NormToZero, 0}, p.eps_limit,
                                      p.threshold);
        r.implied = lc.verdict == Verdict3::Holds ? Outcome::Member
                    : lc.verdict == Verdict3::Fails ? Outcome::NonMember
                                                    : Outcome::Undecided;
        r.note = "ratios q-divergent off a null set";
      }
    }
    out.push_back(std::move(r));
  }
  {  // n1: q-bounded interval-block support with bounded blocks and gaps
    BulletReport r{"n1", false, Outcome::Undecided, ""};
    if (qb.v.verdict == Verdict3::Holds) {
      std::int64_t bound = std::min(p.N, e.supp->enumeration_bound());
      const std::int64_t cap = 64;
      std::int64_t blocks = 0, max_run = 0, max_gap = 0, run = 0, last = 0, last_member = 0;
      bool ok = true;
      for (std::int64_t n = 1; n <= bound && ok; ++n) {
        if (e.supp->contains(n)) {
          if (run == 0) {
            ++blocks;
            if (last > 0) max_gap = std::max(max_gap, n - last);
          }
          ++run;
          max_run = std::max(max_run, run);
          last_member = n;
        } else {
          if (run > 0) last = n - 1;
          run = 0;
        }
        if (max_run > cap || max_gap > cap) ok = false;
      }
      if (ok && blocks >= 8 && last_member >= bound - 2 * cap && max_gap >= 1) {
        r.applies = true;
        r.implied = Outcome::NonMember;
        r.note = "support is a union of blocks (len <= " + std::to_string(max_run) +
                 ", gap <= " + std::to_string(max_gap) + ")";
      }
    }
    out.push_back(std::move(r));
  }
  {  // n2: q-divergent support with c_n/q_n trapped in [r1,r2] ⊂ (0,1)
    BulletReport r{"n2", false, Outcome::Undecided, ""};
    if (qd.verdict == Verdict3::Holds && positive_density(sd, p.threshold)) {
      std::int64_t bound = std::min(p.N, e.supp->enumeration_bound());
      std::optional<Rat> lo, hi;
      for (std::int64_t n = 1; n <= bound; ++n) {
        if (!e.supp->contains(n)) continue;
        Rat v = make_rat(e.digit(n), e.ratio(n));
        if (!lo || v < *lo) lo = v;
        if (!hi || v > *hi) hi = v;
      }
      if (lo && *lo >= p.eps_limit && *hi <= 1 - p.eps_limit) {
        r.applies = true;
        r.implied = Outcome::NonMember;
        r.note = "c_n/q_n in [" + rat_str(*lo) + "," + rat_str(*hi) + "] on supp";
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

ComparisonReport compare(const CircleElement& x, SeqPtr seq, const MembershipParams& p) {
  PreparedElement e = prepare_element(x, seq, p);
  ComparisonReport r;
  r.symbolic = check_thm_main(e);
  if (r.symbolic.oracle_summary)
    r.oracle = *r.symbolic.oracle_summary;
  else
    r.oracle = oracle_membership(x, seq, p.N, p.eps_grid, p.delta, p.parallelism);

  std::string case_alarms;
  if (p.run_all_cases && r.symbolic.outcome != Outcome::Undecided) {
    // Every applicable closed-form case must reach the same decision.
    std::vector<MembershipVerdict> others;
    if (auto z = check_zero_support(e)) others.push_back(*z);
    if (is_q_bounded(e.supp, e.seq, p.N, p.bound_cap).v.verdict == Verdict3::Holds)
      others.push_back(check_cor_qbounded(e));
    if (is_q_divergent(e.supp, e.seq, p.N).verdict == Verdict3::Holds)
      others.push_back(check_cor_qdivergent(e));
    SplitResult ds = is_d_splitting(e.seq, p.N, p.threshold);
    if (ds.v.verdict == Verdict3::Holds && ds.witness)
      others.push_back(check_thm_dsplitting(e, *ds.witness));
    for (const auto& other : others) {
      if (other.outcome == Outcome::Undecided) continue;
      if (other.outcome != r.symbolic.outcome)
        case_alarms += std::string(case_alarms.empty() ? "" : "; ") + "case " +
                       other.rule_fired + " decided " + to_string(other.outcome) + " against " +
                       r.symbolic.rule_fired;
    }
  }

  bool decided = r.symbolic.outcome != Outcome::Undecided;
  bool oracle_decided = r.oracle.overall != StatVerdict::Inconclusive;
  r.comparable = decided && oracle_decided;
  if (r.comparable) {
    bool member = r.symbolic.outcome == Outcome::Member;
    bool converges = r.oracle.overall == StatVerdict::ConvergesEvidence;
    r.agree = member == converges;
    if (!r.agree) {
      r.diagnostics = "symbolic " + std::string(to_string(r.symbolic.outcome)) + " via " +
                      r.symbolic.rule_fired + " vs oracle " + to_string(r.oracle.overall);
      for (const auto& entry : r.oracle.entries)
        if (entry.verdict == StatVerdict::DivergesEvidence)
          r.diagnostics += "; diverges at eps = " + rat_str(entry.eps);
    }
  } else {
    r.agree = true;  // nothing to contradict
    r.diagnostics = decided ? "oracle inconclusive" : "symbolic undecided";
  }
  if (!case_alarms.empty()) {
    r.agree = false;
    r.diagnostics += std::string(r.diagnostics.empty() ? "" : "; ") + case_alarms;
  }
  return r;
}

json verdict_to_json(const MembershipVerdict& v) {
  json j{{"outcome", to_string(v.outcome)},
         {"certain", v.certain},
         {"rule_fired", v.rule_fired}};
  if (v.witness) {
    json w{{"condition", v.witness->condition}, {"set", v.witness->set_desc}};
    if (v.witness->density) w["density"] = density_to_json(*v.witness->density);
    j["witness"] = w;
  }
  if (v.oracle_summary) j["oracle"] = oracle_report_to_json(*v.oracle_summary);
  return j;
}

json comparison_to_json(const ComparisonReport& r) {
  return json{{"symbolic", verdict_to_json(r.symbolic)},
              {"oracle", oracle_report_to_json(r.oracle)},
              {"comparable", r.comparable},
              {"agree", r.agree},
              {"diagnostics", r.diagnostics}};
}

json bullets_to_json(const std::vector<BulletReport>& bs) {
  json arr = json::array();
  for (const auto& b : bs)
    arr.push_back(json{{"id", b.id},
                       {"applies", b.applies},
                       {"implied", to_string(b.implied)},
                       {"note", b.note}});
  return arr;
}

}  // namespace storsion
