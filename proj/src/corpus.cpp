#include "corpus.hpp"

#include <numeric>
#include <random>

namespace storsion {

namespace {

json seq_spec(int rule, std::uint64_t salt) {
  switch (rule) {
    case 0:
      return json{{"type", "constant_ratio"}, {"q", salt % 2 == 0 ? 2 : 3}};
    case 1:
      return json{{"type", "periodic_ratio"}, {"pattern", std::vector<int>{2, 3}}};
    case 2:
      return json{{"type", "affine_ratio"}, {"offset", 1}};
    case 3:
      return json{{"type", "example_2_6"}};
    default:
      return json{{"type", "example_2_7"}};
  }
}

json support_spec(int shape, const json& seq, std::mt19937_64& rng) {
  switch (shape) {
    case 0: {  // small random finite set
      std::uniform_int_distribution<int> count(3, 8), elem(1, 60);
      std::vector<std::int64_t> elems;
      int k = count(rng);
      for (int i = 0; i < k; ++i) elems.push_back(elem(rng));
      std::sort(elems.begin(), elems.end());
      elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
      return json{{"type", "finite"}, {"elems", elems}};
    }
    case 1:
      return json{{"type", "ap"}, {"start", 2}, {"step", 2}};  // evens
    case 2:
      return json{{"type", "ap"}, {"start", 1}, {"step", 2}};  // odds
    case 3:
      return json{{"type", "squares"}};
    default: {
      // level-set values stay in {2,3,4}: far from the estimator resolution.
      // For constant rules, half the draws use the rule's own q so the grid
      // also covers full support (and, with q_minus_one, maximal digits).
      std::int64_t v;
      if (seq.at("type") == "constant_ratio" && rng() % 2 == 0)
        v = seq.at("q").get<std::int64_t>();
      else
        v = 2 + static_cast<std::int64_t>(rng() % 3);
      return json{{"type", "level_set"}, {"seq", seq}, {"value", v}};
    }
  }
}

}  // namespace

std::vector<CorpusEntry> generate_corpus(std::uint64_t seed, int size) {
  if (size < 1) throw std::invalid_argument("corpus size must be positive");
  std::mt19937_64 rng(seed);
  std::vector<CorpusEntry> all;

  for (int pass = 0; pass < 3; ++pass) {
    for (int rule = 0; rule < 5; ++rule) {
      for (int shape = 0; shape < 5; ++shape) {
        for (int value = 0; value < 2; ++value) {
          json seq = seq_spec(rule, rng());
          json support = support_spec(shape, seq, rng);
          json elem{{"type", "digit_element"},
                    {"rule", json{{"type", "indicator"},
                                  {"support", support},
                                  {"value", value == 0 ? "one" : "q_minus_one"}}}};
          CorpusEntry e;
          e.id = "structured_" + std::to_string(all.size());
          e.seq_spec = std::move(seq);
          e.elem_spec = std::move(elem);
          all.push_back(std::move(e));
        }
      }
    }
  }
  std::uniform_int_distribution<std::int64_t> den_d(2, 40);
  std::uniform_int_distribution<int> rule_d(0, 4);
  for (int i = 0; i < 50; ++i) {
    std::int64_t den = den_d(rng);
    std::uniform_int_distribution<std::int64_t> num_d(1, den - 1);
    std::int64_t num = num_d(rng);
    std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
    CorpusEntry e;
    e.id = "rational_" + std::to_string(all.size());
    e.seq_spec = seq_spec(rule_d(rng), rng());
    e.elem_spec = json{{"type", "rational"},
                       {"num", std::to_string(num)},
                       {"den", std::to_string(den)}};
    all.push_back(std::move(e));
  }

  std::vector<CorpusEntry> out;
  out.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) out.push_back(all[static_cast<std::size_t>(i) % all.size()]);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].id = "e" + std::to_string(i) + "_" + out[i].id;
  return out;
}

json corpus_manifest(const std::vector<CorpusEntry>& entries, std::uint64_t seed) {
  json items = json::array();
  for (const auto& e : entries)
    items.push_back(json{{"id", e.id}, {"seq", e.seq_spec}, {"element", e.elem_spec}});
  return json{{"seed", seed}, {"count", entries.size()}, {"entries", items}};
}

}  // namespace storsion
