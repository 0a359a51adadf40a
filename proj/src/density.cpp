#include "density.hpp"

#include <algorithm>
#include <stdexcept>

namespace storsion {

const char* to_string(Verdict3 v) {
  switch (v) {
    case Verdict3::Holds:
      return "holds";
    case Verdict3::Fails:
      return "fails";
    case Verdict3::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

json density_to_json(const DensityEstimate& d) {
  json j{{"prefix", d.N},
         {"count", d.count},
         {"point", rat_to_json(d.point)},
         {"window_low", rat_to_json(d.window_low)},
         {"window_high", rat_to_json(d.window_high)}};
  if (d.exact) j["exact"] = rat_to_json(*d.exact);
  return j;
}

namespace {

// a/b < c/d for prefix ratios (products stay well under 2^63 for N <= 1e7).
inline bool frac_less(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return a * d < c * b;
}

struct WindowTracker {
  std::int64_t lo_num = 0, lo_den = 1;
  std::int64_t hi_num = 0, hi_den = 1;
  bool seen = false;

  void offer(std::int64_t count, std::int64_t n) {
    if (!seen) {
      lo_num = hi_num = count;
      lo_den = hi_den = n;
      seen = true;
      return;
    }
    if (frac_less(count, n, lo_num, lo_den)) {
      lo_num = count;
      lo_den = n;
    }
    if (frac_less(hi_num, hi_den, count, n)) {
      hi_num = count;
      hi_den = n;
    }
  }
};

}  // namespace

std::int64_t count_members(const IndexSet& A, std::int64_t N) {
  if (N < 1) throw std::invalid_argument("count needs N >= 1");
  if (N > A.enumeration_bound())
    throw std::out_of_range("prefix exceeds the set's declared enumeration bound");
  std::int64_t cnt = 0;
  for (std::int64_t n = 1; n <= N; ++n)
    if (A.contains(n)) ++cnt;
  return cnt;
}

DensityEstimate density_estimate(const IndexSet& A, std::int64_t N) {
  if (N < 2) throw std::invalid_argument("density_estimate needs N >= 2");
  if (N > A.enumeration_bound())
    throw std::out_of_range("prefix exceeds the set's declared enumeration bound");
  DensityEstimate d;
  d.N = N;
  d.exact = A.exact_density();
  std::int64_t n0 = std::max<std::int64_t>(1, N / 2);
  WindowTracker w;
  std::int64_t cnt = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (A.contains(n)) ++cnt;
    if (n >= n0) w.offer(cnt, n);
  }
  d.count = cnt;
  d.point = make_rat(cnt, N);
  d.window_low = make_rat(w.lo_num, w.lo_den);
  d.window_high = make_rat(w.hi_num, w.hi_den);
  return d;
}

DensityEstimate density_estimate_from_members(const std::vector<std::int64_t>& members,
                                              std::int64_t N) {
  if (N < 2) throw std::invalid_argument("density_estimate needs N >= 2");
  DensityEstimate d;
  d.N = N;
  std::int64_t n0 = std::max<std::int64_t>(1, N / 2);
  WindowTracker w;
  std::int64_t cnt = 0;
  // Ratios only move at members; between members |A∩[1,n]|/n decays, so each
  // constant-count stretch contributes its two endpoints.
  std::size_t i = 0;
  while (i < members.size() && members[i] < n0) {
    ++cnt;
    ++i;
  }
  std::int64_t last = n0 - 1;
  for (; i < members.size() && members[i] <= N; ++i) {
    std::int64_t m = members[i];
    std::int64_t stretch_lo = std::max(n0, last + 1);
    if (stretch_lo <= m - 1) {
      w.offer(cnt, stretch_lo);
      w.offer(cnt, m - 1);
    }
    ++cnt;
    w.offer(cnt, m);
    last = m;
  }
  std::int64_t stretch_lo = std::max(n0, last + 1);
  if (stretch_lo <= N) {
    w.offer(cnt, stretch_lo);
    w.offer(cnt, N);
  }
  if (!w.seen) w.offer(cnt, N);
  d.count = cnt;
  d.point = make_rat(cnt, N);
  d.window_low = make_rat(w.lo_num, w.lo_den);
  d.window_high = make_rat(w.hi_num, w.hi_den);
  return d;
}

SubsetVerdict subset_d(const SetPtr& A, const SetPtr& B, std::int64_t N, const Rat& threshold) {
  if (threshold <= 0 || threshold >= 1)
    throw std::invalid_argument("subset_d threshold must lie in (0,1)");
  SubsetVerdict out;
  out.residual = density_estimate(*IndexSet::difference(A, B), N);
  if (out.residual.upper() <= threshold)
    out.verdict = Verdict3::Holds;
  else if (out.residual.lower() > threshold)
    out.verdict = Verdict3::Fails;
  else
    out.verdict = Verdict3::Inconclusive;
  return out;
}

SetPtr shift_union(const SetPtr& A, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("shift_union needs k >= 0");
  std::vector<SetPtr> parts;
  parts.reserve(static_cast<std::size_t>(k) + 1);
  for (std::int64_t i = 0; i <= k; ++i) parts.push_back(IndexSet::shift(A, i));
  return IndexSet::union_of(std::move(parts));
}

DiagonalCover diagonal_cover(const std::vector<SetPtr>& cells, std::int64_t N,
                             const Rat& budget) {
  if (N < 2) throw std::invalid_argument("diagonal_cover needs N >= 2");
  if (budget <= 0 || budget >= 1) throw std::invalid_argument("budget must lie in (0,1)");
  DiagonalCover out;
  if (cells.empty()) {
    out.cover = IndexSet::empty();
    return out;
  }

  Rat share = budget;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    share /= 2;  // budget * 2^{-(j+1)}
    const auto& cell = cells[j];

    std::vector<std::int64_t> members;
    for (std::int64_t n = 1; n <= N; ++n)
      if (cell->contains(n)) members.push_back(n);

    auto exact = cell->exact_density();
    if (exact && *exact > 0)
      throw std::runtime_error("diagonal_cover: cell " + std::to_string(j) +
                               " has positive exact density " + rat_str(*exact));
    if (!exact && !members.empty()) {
      auto est = density_estimate_from_members(members, N);
      if (est.window_low > budget)
        throw std::runtime_error("diagonal_cover: budget unachievable, cell " +
                                 std::to_string(j) + " shows positive density evidence " +
                                 rat_str(est.window_low));
    }

    // Keep at most floor(share * N/2) members in the cover tail.
    Rat cap = share * Rat(N) / 2;
    Int cap_floor;
    mpz_fdiv_q(cap_floor.get_mpz_t(), cap.get_num_mpz_t(), cap.get_den_mpz_t());
    std::int64_t allowed = cap_floor.fits_slong_p() ? cap_floor.get_si()
                                                    : static_cast<std::int64_t>(members.size());
    allowed = std::min<std::int64_t>(allowed, static_cast<std::int64_t>(members.size()));

    std::int64_t t;
    if (allowed >= static_cast<std::int64_t>(members.size())) {
      t = 0;  // whole observed cell fits the budget
    } else if (allowed == 0) {
      t = members.empty() ? 0 : members.back();  // no share left, keep the cell out of C
    } else {
      t = members[members.size() - static_cast<std::size_t>(allowed) - 1];
    }
    out.thresholds.emplace_back(j, t);
    for (auto m : members)
      if (m > t) out.cover_members.push_back(m);
  }

  std::sort(out.cover_members.begin(), out.cover_members.end());
  out.cover_members.erase(std::unique(out.cover_members.begin(), out.cover_members.end()),
                          out.cover_members.end());
  out.cover = out.cover_members.empty() ? IndexSet::empty() : IndexSet::finite(out.cover_members);
  return out;
}

}  // namespace storsion
