#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "index_set.hpp"
#include "sequences.hpp"

using namespace storsion;

namespace {

std::vector<std::pair<std::string, SeqPtr>> rule_variants() {
  return {
      {"constant2", std::make_shared<ArithmeticSequence>(RatioRule::constant(2))},
      {"constant3", std::make_shared<ArithmeticSequence>(RatioRule::constant(3))},
      {"periodic23", std::make_shared<ArithmeticSequence>(RatioRule::periodic({2, 3}))},
      {"affine1", std::make_shared<ArithmeticSequence>(RatioRule::affine(1))},
      {"table_tail", std::make_shared<ArithmeticSequence>(RatioRule::table_with_tail(
                         {5, 7, 2}, RatioRule::periodic({3, 4})))},
      {"example_2_6", make_example_2_6()},
      {"example_2_7", make_example_2_7()},
  };
}

}  // namespace

TEST_CASE("ratio values for the basic rules") {
  ArithmeticSequence c2(RatioRule::constant(2));
  CHECK(c2.ratio(7) == 2);
  ArithmeticSequence af(RatioRule::affine(1));
  CHECK(af.ratio(5) == 6);
  ArithmeticSequence p23(RatioRule::periodic({2, 3}));
  CHECK(p23.ratio(1) == 2);
  CHECK(p23.ratio(2) == 3);
  CHECK(p23.ratio(4) == 3);
  ArithmeticSequence tt(RatioRule::table_with_tail({5, 7}, RatioRule::constant(2)));
  CHECK(tt.ratio(1) == 5);
  CHECK(tt.ratio(2) == 7);
  CHECK(tt.ratio(3) == 2);
}

TEST_CASE("squares-partition ratios come from the offset above the last square") {
  auto seq = make_example_2_6();
  CHECK(seq->ratio(4) == 2);   // 4 = 2^2, offset 0
  CHECK(seq->ratio(5) == 3);   // 5 = 4 + 1
  CHECK(seq->ratio(12) == 5);  // 12 = 9 + 3
  CHECK(seq->ratio(1) == 2);
  CHECK(seq->ratio(3) == 4);
}

TEST_CASE("dyadic-partition ratios come from the 2-adic valuation") {
  auto seq = make_example_2_7();
  CHECK(seq->ratio(1) == 2);  // odd
  CHECK(seq->ratio(4) == 4);  // v2 = 2
  // v2(12) = v2(4) = 2 forces q_12 = q_4 under any valuation rule.
  CHECK(seq->ratio(12) == 4);
  CHECK(seq->ratio(2) == 3);
  CHECK(seq->ratio(96) == 7);  // 96 = 2^5 * 3
}

TEST_CASE("terms are exact products of the ratios") {
  ArithmeticSequence c2(RatioRule::constant(2));
  CHECK(c2.term(10) == 1024);
  CHECK(c2.term(0) == 1);
  ArithmeticSequence af(RatioRule::affine(1));
  CHECK(af.term(4) == 120);  // 2*3*4*5
  ArithmeticSequence p23(RatioRule::periodic({2, 3}));
  CHECK(p23.term(4) == 36);  // 2*3*2*3
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS(RatioRule::constant(1), std::invalid_argument);
  CHECK_THROWS_AS(RatioRule::affine(0), std::invalid_argument);
  CHECK_THROWS_AS(RatioRule::periodic({}), std::invalid_argument);
  CHECK_THROWS_AS(RatioRule::periodic({2, 1}), std::invalid_argument);
  ArithmeticSequence c2(RatioRule::constant(2));
  CHECK_THROWS_AS(c2.ratio(0), std::invalid_argument);
}

TEST_CASE("level-set rule evaluates cells and flags gaps") {
  auto cells = RatioRule::level_sets({{IndexSet::ap(1, 2), 2}, {IndexSet::ap(2, 2), 3}});
  ArithmeticSequence seq(cells);
  CHECK(seq.ratio(1) == 2);
  CHECK(seq.ratio(2) == 3);
  CHECK(seq.ratio(11) == 2);

  auto gappy = RatioRule::level_sets({{IndexSet::ap(1, 2), 2}});
  ArithmeticSequence bad(gappy);
  CHECK(bad.ratio(3) == 2);
  CHECK_THROWS_AS(bad.ratio(2), std::runtime_error);
}

TEST_CASE("every variant keeps q_n >= 2 and the term recurrence exact") {
  for (auto& [name, seq] : rule_variants()) {
    CAPTURE(name);
    bool ok = true;
    for (std::int64_t n = 1; n <= 10000; ++n) ok = ok && seq->ratio(n) >= 2;
    CHECK(ok);
    for (std::int64_t n = 1; n <= 500; ++n)
      REQUIRE(seq->term(n) == seq->term(n - 1) * seq->ratio(n));
  }
}

TEST_CASE("ratio product identity q_n...q_{n+k} = a_{n+k}/a_{n-1}") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> nd(1, 50), kd(0, 20);
  for (auto& [name, seq] : rule_variants()) {
    CAPTURE(name);
    for (int i = 0; i < 200; ++i) {
      std::int64_t n = nd(rng), k = kd(rng);
      Int prod = 1;
      for (std::int64_t j = n; j <= n + k; ++j) prod *= seq->ratio(j);
      REQUIRE(prod * seq->term(n - 1) == seq->term(n + k));
    }
  }
}

TEST_CASE("dyadic level sets have density 2^-i, checked against a direct scan") {
  auto seq = make_example_2_7();
  const std::int64_t N = 1000000;
  // independent tally straight from the valuation
  std::vector<std::int64_t> counts(10, 0);
  for (std::int64_t n = 1; n <= N; ++n) {
    int i = v2_of(n) + 1;  // the level index before the +1 value shift
    if (i < 10) ++counts[static_cast<std::size_t>(i)];
  }
  double scale = 1.0;
  for (int i = 1; i <= 6; ++i) {
    scale /= 2;
    double emp = static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(N);
    CHECK(std::abs(emp - scale) <= 0.01);
    auto set = IndexSet::level_set(seq, i + 1);
    for (std::int64_t n = 1; n <= 64; ++n) REQUIRE(set->contains(n) == (v2_of(n) + 1 == i));
  }
}

TEST_CASE("sequence specs round-trip through json") {
  std::vector<std::string> specs = {
      R"({"type":"constant_ratio","q":2})",
      R"({"type":"affine_ratio","offset":1})",
      R"({"type":"periodic_ratio","pattern":[2,3]})",
      R"({"type":"table_tail","prefix":[5,7],"tail":{"type":"constant_ratio","q":2}})",
      R"({"type":"example_2_6"})",
      R"({"type":"example_2_7"})",
  };
  for (const auto& s : specs) {
    auto parsed = json::parse(s);
    auto seq = seq_from_json(parsed);
    CHECK(seq_to_json(*seq) == parsed);
    CHECK(seq->ratio(1) >= 2);
  }
  CHECK_THROWS_AS(seq_from_json(json::parse(R"({"type":"nope"})")), std::invalid_argument);
}
