#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "classify.hpp"

using namespace storsion;

namespace {

SeqPtr const2() { return std::make_shared<ArithmeticSequence>(RatioRule::constant(2)); }
SeqPtr const3() { return std::make_shared<ArithmeticSequence>(RatioRule::constant(3)); }
SeqPtr periodic23() { return std::make_shared<ArithmeticSequence>(RatioRule::periodic({2, 3})); }
SeqPtr affine1() { return std::make_shared<ArithmeticSequence>(RatioRule::affine(1)); }

// ratio rule with q = 2 off the squares and q = 7 on them: d-splitting with a
// dense bounded part, used to exercise the empirical paths
SeqPtr sparse_seven() {
  auto sq = IndexSet::predicate(
      [](std::int64_t n) {
        std::int64_t r = isqrt64(n);
        return r * r == n;
      },
      std::int64_t{1} << 40, "squares?");
  auto co = IndexSet::predicate(
      [](std::int64_t n) {
        std::int64_t r = isqrt64(n);
        return r * r != n;
      },
      std::int64_t{1} << 40, "co-squares?");
  return std::make_shared<ArithmeticSequence>(RatioRule::level_sets({{co, 2}, {sq, 7}}));
}

}  // namespace

TEST_CASE("q-boundedness of supports") {
  auto r1 = is_q_bounded(IndexSet::all(), const2(), 1000, 1 << 20);
  CHECK(r1.v.verdict == Verdict3::Holds);
  CHECK(r1.v.certain);
  CHECK(r1.observed_max == 2);

  auto r2 = is_q_bounded(IndexSet::all(), affine1(), 1000, 1 << 20);
  CHECK(r2.v.verdict == Verdict3::Fails);
  CHECK(r2.v.certain);

  auto r3 = is_q_bounded(IndexSet::ap(1, 2), make_example_2_7(), 1000000, 1 << 20);
  CHECK(r3.v.verdict == Verdict3::Holds);
  CHECK(r3.v.certain);
  CHECK(r3.observed_max == 2);

  // squares carry constant ratio 2 under the squares partition
  auto r4 = is_q_bounded(IndexSet::squares(), make_example_2_6(), 100000, 1 << 20);
  CHECK(r4.v.verdict == Verdict3::Holds);
  CHECK(r4.v.certain);
}

TEST_CASE("q-divergence of supports") {
  auto d1 = is_q_divergent(IndexSet::all(), affine1(), 1000);
  CHECK(d1.verdict == Verdict3::Holds);
  CHECK(d1.certain);

  auto d2 = is_q_divergent(IndexSet::all(), const2(), 1000);
  CHECK(d2.verdict == Verdict3::Fails);
  CHECK(d2.certain);

  auto d3 = is_q_divergent(IndexSet::all(), make_example_2_7(), 100000);
  CHECK(d3.verdict == Verdict3::Fails);  // q = 2 recurs on the odds

  // the extracted high-ratio part of the squares partition diverges (evidence)
  auto ex = extract_q_divergent(IndexSet::all(), make_example_2_6(), 1000000, make_rat(1, 100));
  auto d4 = is_q_divergent(ex.B, make_example_2_6(), 1000000);
  CHECK(d4.verdict == Verdict3::Holds);
  CHECK_FALSE(d4.certain);
}

TEST_CASE("splitting classification") {
  auto s1 = is_splitting(const3(), 10000, 1 << 20);
  CHECK(s1.v.verdict == Verdict3::Holds);
  CHECK(s1.v.certain);
  REQUIRE(s1.witness.has_value());
  CHECK(s1.witness->B->kind() == IndexSet::Kind::All);

  auto s2 = is_splitting(affine1(), 10000, 1 << 20);
  CHECK(s2.v.verdict == Verdict3::Holds);
  CHECK(s2.v.certain);
  CHECK(s2.witness->B->kind() == IndexSet::Kind::Empty);

  auto s3 = is_splitting(make_example_2_6(), 1000000, 1 << 20);
  CHECK(s3.v.verdict == Verdict3::Fails);
  CHECK(s3.v.certain);

  auto s4 = is_splitting(make_example_2_7(), 1000000, 1 << 20);
  CHECK(s4.v.verdict == Verdict3::Fails);
  CHECK(s4.v.certain);
}

TEST_CASE("d-splitting classification") {
  auto d1 = is_d_splitting(make_example_2_6(), 1000000, make_rat(1, 100));
  CHECK(d1.v.verdict == Verdict3::Holds);
  CHECK(d1.v.certain);
  REQUIRE(d1.witness.has_value());
  CHECK(d1.witness->M == 2);
  CHECK(d1.witness->B->kind() == IndexSet::Kind::Empty);

  auto d2 = is_d_splitting(make_example_2_7(), 1000000, make_rat(1, 100));
  CHECK(d2.v.verdict == Verdict3::Fails);
  CHECK(d2.v.certain);

  auto d3 = is_d_splitting(const2(), 10000, make_rat(1, 100));
  CHECK(d3.v.verdict == Verdict3::Holds);
  CHECK(d3.v.certain);
  CHECK(d3.witness->D->kind() == IndexSet::Kind::Empty);
}

TEST_CASE("splitting implies d-splitting on every tested rule") {
  std::vector<SeqPtr> rules = {const2(),  const3(),           periodic23(),        affine1(),
                               make_example_2_6(), make_example_2_7(), sparse_seven()};
  for (const auto& seq : rules) {
    auto sp = is_splitting(seq, 100000, 1 << 20);
    auto dsp = is_d_splitting(seq, 100000, make_rat(1, 100));
    if (sp.v.verdict == Verdict3::Holds) CHECK(dsp.v.verdict == Verdict3::Holds);
  }
}

TEST_CASE("level-set rules with any cells are bounded, hence d-splitting") {
  // even with sampled cells of unknown density, finitely many values force a
  // certain verdict
  auto seq = sparse_seven();
  auto d = is_d_splitting(seq, 100000, make_rat(1, 100));
  CHECK(d.v.verdict == Verdict3::Holds);
  CHECK(d.v.certain);
  REQUIRE(d.witness.has_value());
  CHECK(d.witness->M == 8);
  CHECK(d.witness->B->kind() == IndexSet::Kind::All);

  // witness stability across prefixes: symmetric difference stays null
  auto d2 = is_d_splitting(seq, 50000, make_rat(1, 100));
  REQUIRE(d2.witness.has_value());
  auto sym_diff = IndexSet::union_of({IndexSet::difference(d.witness->B, d2.witness->B),
                                      IndexSet::difference(d2.witness->B, d.witness->B)});
  auto est = density_estimate(*sym_diff, 50000);
  CHECK(est.upper() <= make_rat(2, 100));
}

TEST_CASE("finite tables inherit the tail's splitting behavior") {
  auto t26 = std::make_shared<ArithmeticSequence>(
      RatioRule::table_with_tail({5, 9}, RatioRule::squares_partition()));
  auto sp = is_splitting(t26, 100000, 1 << 20);
  CHECK(sp.v.verdict == Verdict3::Fails);
  CHECK(sp.v.certain);
  auto dsp = is_d_splitting(t26, 100000, make_rat(1, 100));
  CHECK(dsp.v.verdict == Verdict3::Holds);
  CHECK(dsp.v.certain);
  CHECK(dsp.witness->M == 2);

  auto t27 = std::make_shared<ArithmeticSequence>(
      RatioRule::table_with_tail({5, 9}, RatioRule::dyadic_partition()));
  auto dsp27 = is_d_splitting(t27, 100000, make_rat(1, 100));
  CHECK(dsp27.v.verdict == Verdict3::Fails);
  CHECK(dsp27.v.certain);
}

TEST_CASE("level sets of the worked examples") {
  auto l1 = level_sets(const2(), 100);
  REQUIRE(l1.size() == 1);
  CHECK(l1[0].value == 2);
  CHECK(l1[0].count == 100);
  CHECK(l1[0].density.exact == Rat(1));

  auto l2 = level_sets(make_example_2_7(), 1000000);
  for (const auto& info : l2) {
    if (info.value > 6) continue;
    double expected = std::pow(2.0, -(static_cast<double>(info.value) - 1));
    CHECK(std::abs(info.density.point.get_d() - expected) <= 0.02);
    REQUIRE(info.density.exact.has_value());
  }

  auto l3 = level_sets(periodic23(), 10000);
  REQUIRE(l3.size() == 2);
  CHECK(l3[0].density.exact == make_rat(1, 2));
  CHECK(l3[1].density.exact == make_rat(1, 2));
}

TEST_CASE("extraction: already divergent sequences pass through") {
  auto ex = extract_q_divergent(IndexSet::all(), affine1(), 10000, make_rat(1, 100));
  CHECK(ex.B->kind() == IndexSet::Kind::All);
  CHECK(ex.residual.count == 0);
  CHECK(ex.thresholds.empty());
}

TEST_CASE("extraction over the squares partition") {
  const std::int64_t N = 1000000;
  auto e26 = make_example_2_6();
  auto ex = extract_q_divergent(IndexSet::all(), e26, N, make_rat(1, 100));
  CHECK(ex.residual.upper() <= make_rat(2, 100));

  // B ⊆ A pointwise and the cover accounts for the entire residual
  std::int64_t cover_count = 0;
  for (std::int64_t n = 1; n <= 2000; ++n) {
    if (ex.cover->contains(n)) ++cover_count;
    CHECK(ex.B->contains(n) == !ex.cover->contains(n));
  }
  CHECK(ex.residual.count == count_members(*ex.cover, N));

  // beyond the thresholds the minimum ratio on B climbs past every bound <= 10
  for (std::int64_t l = 2; l <= 10; ++l) {
    std::int64_t nl = 0;
    for (auto& [v, t] : ex.thresholds)
      if (v <= l) nl = std::max(nl, t);
    std::int64_t mn = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t n = nl + 1; n <= N; ++n)
      if (ex.B->contains(n)) mn = std::min(mn, e26->ratio(n));
    CHECK(mn > l);
  }
}

TEST_CASE("extraction rejects positive-density level sets") {
  bool threw = false;
  try {
    extract_q_divergent(IndexSet::ap(1, 2), make_example_2_7(), 10000, make_rat(1, 100));
  } catch (const std::runtime_error& ex) {
    threw = true;
    CHECK(std::string(ex.what()).find("value 2") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("classify report shape") {
  auto j = classify_report(make_example_2_7(), 100000, make_rat(1, 100), 1 << 20);
  CHECK(j["splitting"]["verdict"] == "fails");
  CHECK(j["d_splitting"]["verdict"] == "fails");
  CHECK(j["level_sets"].is_array());
  CHECK(!j["level_sets"].empty());

  auto j2 = classify_report(make_example_2_6(), 100000, make_rat(1, 100), 1 << 20);
  CHECK(j2["splitting"]["verdict"] == "fails");
  CHECK(j2["d_splitting"]["verdict"] == "holds");
  CHECK(j2["witness"]["M"] == 2);
}
