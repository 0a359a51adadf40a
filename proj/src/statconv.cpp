#include "statconv.hpp"

#include <algorithm>
#include <thread>

namespace storsion {

const char* to_string(StatVerdict v) {
  switch (v) {
    case StatVerdict::ConvergesEvidence:
      return "converges_evidence";
    case StatVerdict::DivergesEvidence:
      return "diverges_evidence";
    case StatVerdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

NormBracket norm_bracket(const Rat& vlo, const Rat& vhi) {
  if (vlo > vhi || vlo < 0 || vhi >= 2 || vhi - vlo >= 1)
    throw std::invalid_argument("norm_bracket needs 0 <= lo <= hi < lo+1, hi < 2");
  NormBracket out;
  out.exact = (vlo == vhi);
  Rat half = make_rat(1, 2);
  if (vhi < 1) {
    Rat nlo = circle_norm(vlo);
    Rat nhi = circle_norm(vhi);
    out.lo = std::min(nlo, nhi);
    out.hi = (vlo <= half && half <= vhi) ? half : std::max(nlo, nhi);
  } else {
    // interval crosses 1: norm dips to 0 there
    out.lo = Rat(0);
    out.exact = false;
    if (vlo <= half)
      out.hi = half;
    else
      out.hi = std::max(Rat(1 - vlo), Rat(vhi - 1));
  }
  return out;
}

ExceptionalStats tally_flags(const std::vector<std::uint8_t>& flags, std::int64_t N,
                             const Rat& delta) {
  if (N < 1 || static_cast<std::int64_t>(flags.size()) < N + 1)
    throw std::invalid_argument("tally_flags: bad prefix");
  ExceptionalStats out;
  out.N = N;
  std::int64_t n2 = N / 2;
  std::int64_t n3 = n2 + (N - n2) / 2;

  std::int64_t cnt = 0, lo_num = 0, lo_den = 1, hi_num = 0, hi_den = 1;
  bool seen = false;
  std::int64_t q3 = 0, q4 = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (flags[static_cast<std::size_t>(n)]) {
      ++cnt;
      if (n > n3)
        ++q4;
      else if (n > n2)
        ++q3;
    }
    if (n >= std::max<std::int64_t>(1, n2)) {
      if (!seen) {
        lo_num = hi_num = cnt;
        lo_den = hi_den = n;
        seen = true;
      } else {
        if (cnt * lo_den < lo_num * n) {
          lo_num = cnt;
          lo_den = n;
        }
        if (hi_num * n < cnt * hi_den) {
          hi_num = cnt;
          hi_den = n;
        }
      }
    }
  }
  out.count = cnt;
  out.density.N = N;
  out.density.count = cnt;
  out.density.point = make_rat(cnt, N);
  out.density.window_low = make_rat(lo_num, lo_den);
  out.density.window_high = make_rat(hi_num, hi_den);

  std::int64_t len3 = n3 - n2, len4 = N - n3;
  if (len3 <= 0 || len4 <= 0) {
    out.tail_q3 = out.tail_q4 = out.density.point;
  } else {
    out.tail_q3 = make_rat(q3, len3);
    out.tail_q4 = make_rat(q4, len4);
  }
  Rat tail_high = std::max(out.tail_q3, out.tail_q4);
  Rat tail_low = std::min(out.tail_q3, out.tail_q4);
  if (tail_high <= delta)
    out.verdict = StatVerdict::ConvergesEvidence;
  else if (tail_low > delta)
    out.verdict = StatVerdict::DivergesEvidence;
  else
    out.verdict = StatVerdict::Inconclusive;
  return out;
}

namespace {

Rat abs_rat(const Rat& x) { return x < 0 ? Rat(-x) : x; }

}  // namespace

StatVerdict stat_limit_zero(const std::vector<Rat>& values, const Rat& eps, const Rat& delta) {
  if (values.empty()) throw std::invalid_argument("stat_limit_zero: empty prefix");
  if (eps <= 0 || delta <= 0 || delta >= 1)
    throw std::invalid_argument("stat_limit_zero: need eps > 0, delta in (0,1)");
  auto N = static_cast<std::int64_t>(values.size());
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(N) + 1, 0);
  for (std::int64_t n = 1; n <= N; ++n)
    flags[static_cast<std::size_t>(n)] = abs_rat(values[static_cast<std::size_t>(n - 1)]) >= eps;
  return tally_flags(flags, N, delta).verdict;
}

SetPtr density_one_witness(const std::vector<Rat>& values, const Rat& eps) {
  std::vector<std::int64_t> good;
  for (std::int64_t n = 1; n <= static_cast<std::int64_t>(values.size()); ++n)
    if (abs_rat(values[static_cast<std::size_t>(n - 1)]) < eps) good.push_back(n);
  return IndexSet::finite(std::move(good));
}

json oracle_report_to_json(const OracleReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back(json{{"eps", rat_to_json(e.eps)},
                           {"exceptional_count", e.exceptional_count},
                           {"density", density_to_json(e.density)},
                           {"tail_low", rat_to_json(e.tail_low)},
                           {"tail_high", rat_to_json(e.tail_high)},
                           {"verdict", to_string(e.verdict)}});
  return json{{"prefix", r.N},
              {"delta", rat_to_json(r.delta)},
              {"entries", entries},
              {"overall", to_string(r.overall)},
              {"witness_count", r.witness_count}};
}

namespace {

struct BracketSource {
  // For digit elements: sliding exact enclosure of {a_n x}. K window digits.
  const ExpansionPrefix* digits = nullptr;
  std::int64_t K = 0;

  NormBracket at(std::int64_t n) const {
    // {a_n x} in [H/D, (H+1)/D] with H the Horner numerator over c_{n+1}..c_{n+1+K}.
    std::int64_t m = n + 1;
    Int num = digits->digit(m);
    Int den = digits->seq->ratio(m);
    for (std::int64_t i = m + 1; i <= m + K; ++i) {
      std::int64_t q = digits->seq->ratio(i);
      num = num * q + digits->digit(i);
      den *= q;
    }
    Rat lo = make_rat(num, den);
    Rat hi = make_rat(num + 1, den);
    return norm_bracket(lo, hi);
  }
};

}  // namespace

OracleReport oracle_membership(const CircleElement& x, SeqPtr seq, std::int64_t N,
                               std::vector<Rat> eps_grid, Rat delta, int parallelism,
                               const std::function<void(std::int64_t, const NormBracket&)>& trace) {
  if (N < 2) throw std::invalid_argument("oracle_membership needs N >= 2");
  if (eps_grid.empty()) throw std::invalid_argument("oracle_membership needs an eps grid");
  for (const auto& e : eps_grid)
    if (e <= 0) throw std::invalid_argument("eps values must be positive");
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("delta must lie in (0,1)");

  Rat eps_min = *std::min_element(eps_grid.begin(), eps_grid.end());
  const auto G = eps_grid.size();
  // One flag byte per (n, eps); bit per eps would also do, G is tiny.
  std::vector<std::vector<std::uint8_t>> flags(G);
  for (auto& f : flags) f.assign(static_cast<std::size_t>(N) + 1, 0);

  auto classify = [&](std::int64_t n, const NormBracket& nb) {
    for (std::size_t g = 0; g < G; ++g)
      // conservative: a bracket straddling eps counts as exceptional
      flags[g][static_cast<std::size_t>(n)] = !(nb.hi < eps_grid[g]);
  };

  if (x.is_rational()) {
    FracScanner scan(x.value(), seq);
    for (std::int64_t n = 1; n <= N; ++n) {
      Rat v = scan.next();
      Rat nv = circle_norm(v);
      NormBracket nb{nv, nv, true};
      classify(n, nb);
      if (trace) trace(n, nb);
    }
  } else {
    // Bracket width 1/prod <= 2^{-(K+1)}; keep it under eps_min/128 so that
    // straddles add at most a sliver to the exceptional count.
    std::int64_t K = 1;
    Rat target = eps_min / 128;
    Rat width = make_rat(1, 4);
    while (width > target && K < 256) {
      ++K;
      width /= 2;
    }
    ExpansionPrefix digits = digits_prefix(x, seq, N + K + 1);
    BracketSource src{&digits, K};
    int threads = std::max(1, parallelism);
    if (threads > 1 && !trace) {
      std::vector<std::thread> pool;
      std::int64_t chunk = (N + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        std::int64_t lo = 1 + t * chunk;
        std::int64_t hi = std::min<std::int64_t>(N, lo + chunk - 1);
        if (lo > hi) continue;
        pool.emplace_back([&, lo, hi] {
          for (std::int64_t n = lo; n <= hi; ++n) classify(n, src.at(n));
        });
      }
      for (auto& th : pool) th.join();
    } else {
      for (std::int64_t n = 1; n <= N; ++n) {
        NormBracket nb = src.at(n);
        classify(n, nb);
        if (trace) trace(n, nb);
      }
    }
  }

  OracleReport report;
  report.N = N;
  report.delta = delta;
  bool all_conv = true, any_div = false;
  std::size_t min_idx = 0;
  for (std::size_t g = 0; g < G; ++g) {
    if (eps_grid[g] == eps_min) min_idx = g;
    ExceptionalStats st = tally_flags(flags[g], N, delta);
    EpsEntry e;
    e.eps = eps_grid[g];
    e.exceptional_count = st.count;
    e.density = st.density;
    e.tail_low = std::min(st.tail_q3, st.tail_q4);
    e.tail_high = std::max(st.tail_q3, st.tail_q4);
    e.verdict = st.verdict;
    if (e.verdict != StatVerdict::ConvergesEvidence) all_conv = false;
    if (e.verdict == StatVerdict::DivergesEvidence) any_div = true;
    report.entries.push_back(std::move(e));
  }
  report.overall = all_conv ? StatVerdict::ConvergesEvidence
                            : (any_div ? StatVerdict::DivergesEvidence : StatVerdict::Inconclusive);

  std::vector<std::int64_t> good;
  for (std::int64_t n = 1; n <= N; ++n)
    if (!flags[min_idx][static_cast<std::size_t>(n)]) good.push_back(n);
  report.witness_count = static_cast<std::int64_t>(good.size());
  report.witness = IndexSet::finite(std::move(good));
  return report;
}

RestrictedReport restricted_oracle(const CircleElement& x, SeqPtr seq, const SetPtr& B,
                                   std::int64_t N, const Rat& eps, const Rat& delta) {
  if (N < 1) throw std::invalid_argument("restricted_oracle needs N >= 1");
  if (N > B->enumeration_bound())
    throw std::out_of_range("restricted_oracle: prefix exceeds the set's enumeration bound");

  std::vector<std::uint8_t> member_flags;  // exceptional flags, member-indexed
  member_flags.push_back(0);               // index 0 unused

  if (x.is_rational()) {
    FracScanner scan(x.value(), seq);
    for (std::int64_t n = 1; n <= N; ++n) {
      Rat v = scan.next();
      if (!B->contains(n)) continue;
      member_flags.push_back(circle_norm(v) >= eps);
    }
  } else {
    std::int64_t K = 1;
    Rat target = eps / 128;
    Rat width = make_rat(1, 4);
    while (width > target && K < 256) {
      ++K;
      width /= 2;
    }
    ExpansionPrefix digits = digits_prefix(x, seq, N + K + 1);
    BracketSource src{&digits, K};
    for (std::int64_t n = 1; n <= N; ++n) {
      if (!B->contains(n)) continue;
      member_flags.push_back(!(src.at(n).hi < eps));
    }
  }

  RestrictedReport out;
  out.members = static_cast<std::int64_t>(member_flags.size()) - 1;
  if (out.members == 0) throw std::runtime_error("restricted_oracle: B ∩ [1,N] is empty");
  out.stats = tally_flags(member_flags, out.members, delta);
  out.exceptional = out.stats.count;
  out.verdict = out.stats.verdict;
  return out;
}

std::vector<Rat> exact_norms(const Rat& x, SeqPtr seq, std::int64_t N) {
  std::vector<Rat> out;
  out.reserve(static_cast<std::size_t>(N));
  FracScanner scan(x, seq);
  for (std::int64_t n = 1; n <= N; ++n) out.push_back(circle_norm(scan.next()));
  return out;
}

}  // namespace storsion
