#include "storsion.h"

#include <cstring>
#include <sstream>
#include <string>

#include "classify.hpp"
#include "corpus.hpp"
#include "density.hpp"
#include "expansion.hpp"
#include "membership.hpp"
#include "statconv.hpp"

using namespace storsion;

struct st_sequence {
  SeqPtr seq;
};
struct st_element {
  CircleElement elem;
};
struct st_index_set {
  SetPtr set;
};
struct st_result {
  std::string payload;
  int32_t exit_hint = 0;
};

namespace {

thread_local std::string g_last_error;

st_status fail(st_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
st_status guarded(Fn&& fn) {
  try {
    fn();
    return ST_OK;
  } catch (const nlohmann::json::exception& ex) {
    return fail(ST_ERR_PARSE, ex.what());
  } catch (const std::invalid_argument& ex) {
    return fail(ST_ERR_PARSE, ex.what());
  } catch (const std::out_of_range& ex) {
    return fail(ST_ERR_INVALID, ex.what());
  } catch (const std::exception& ex) {
    return fail(ST_ERR_INVALID, ex.what());
  } catch (...) {
    return fail(ST_ERR_INTERNAL, "unknown error");
  }
}

st_result* make_result(std::string payload, int32_t exit_hint = 0) {
  auto* r = new st_result;
  r->payload = std::move(payload);
  r->exit_hint = exit_hint;
  return r;
}

std::vector<Rat> parse_eps_grid(const char* csv) {
  if (!csv || !*csv) throw std::invalid_argument("empty eps grid");
  std::vector<Rat> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_rat(item));
  }
  if (out.empty()) throw std::invalid_argument("empty eps grid");
  return out;
}

MembershipParams params_from_json_text(const char* params_json) {
  MembershipParams p;
  if (!params_json || !*params_json) return p;
  json j = json::parse(params_json);
  if (j.contains("prefix")) p.N = j.at("prefix").get<std::int64_t>();
  if (j.contains("threshold")) p.threshold = rat_from_json(j.at("threshold"));
  if (j.contains("delta")) p.delta = rat_from_json(j.at("delta"));
  if (j.contains("eps_limit")) p.eps_limit = rat_from_json(j.at("eps_limit"));
  if (j.contains("eps_grid")) {
    p.eps_grid.clear();
    for (const auto& e : j.at("eps_grid")) p.eps_grid.push_back(rat_from_json(e));
  }
  if (j.contains("parallelism")) p.parallelism = j.at("parallelism").get<int>();
  if (j.contains("mod_max")) p.mod_max = j.at("mod_max").get<int>();
  if (j.contains("shift_max")) p.shift_max = j.at("shift_max").get<int>();
  if (j.contains("lk_max")) p.lk_max = j.at("lk_max").get<int>();
  if (j.contains("run_all_cases")) p.run_all_cases = j.at("run_all_cases").get<bool>();
  return p;
}

}  // namespace

extern "C" {

const char* st_last_error(void) { return g_last_error.c_str(); }

st_status st_sequence_parse(const char* spec_json, st_sequence** out) {
  if (!spec_json || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] { *out = new st_sequence{seq_from_json(json::parse(spec_json))}; });
}

void st_sequence_free(st_sequence* seq) { delete seq; }

st_status st_sequence_ratio(const st_sequence* seq, int64_t n, int64_t* out) {
  if (!seq || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] { *out = seq->seq->ratio(n); });
}

st_status st_sequence_term(const st_sequence* seq, int64_t n, st_result** out) {
  if (!seq || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] { *out = make_result(seq->seq->term(n).get_str()); });
}

st_status st_element_parse(const char* spec_json, st_element** out) {
  if (!spec_json || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] { *out = new st_element{element_from_json(json::parse(spec_json))}; });
}

void st_element_free(st_element* elem) { delete elem; }

st_status st_index_set_parse(const char* spec_json, st_index_set** out) {
  if (!spec_json || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] { *out = new st_index_set{set_from_json(json::parse(spec_json))}; });
}

void st_index_set_free(st_index_set* set) { delete set; }

st_status st_expand(const st_sequence* seq, const st_element* elem, int64_t prefix,
                    st_result** out) {
  if (!seq || !elem || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    ExpansionPrefix p = digits_prefix(elem->elem, seq->seq, prefix);
    auto [supp, supp_q] = support_sets(p);
    Rat partial = reconstruct(p);
    json j{{"prefix", p.N},
           {"digits", p.digits},
           {"terminated", p.terminated},
           {"termination_index", p.termination_index},
           {"supp", supp->members()},
           {"supp_q", supp_q->members()},
           {"reconstruct", rat_to_json(partial)},
           {"diagnostics", p.diagnostics}};
    *out = make_result(j.dump(2));
  });
}

st_status st_density(const st_index_set* set, int64_t prefix, st_result** out) {
  if (!set || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    DensityEstimate d = density_estimate(*set->set, prefix);
    *out = make_result(density_to_json(d).dump(2));
  });
}

st_status st_classify(const st_sequence* seq, int64_t prefix, const char* threshold,
                      st_result** out) {
  if (!seq || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    Rat t = threshold && *threshold ? parse_rat(threshold) : make_rat(1, 100);
    json j = classify_report(seq->seq, prefix, t, 1 << 20);
    bool inconclusive =
        j["splitting"]["verdict"] == "inconclusive" || j["d_splitting"]["verdict"] == "inconclusive";
    *out = make_result(j.dump(2), inconclusive ? 2 : 0);
  });
}

st_status st_oracle(const st_sequence* seq, const st_element* elem, int64_t prefix,
                    const char* eps_grid, const char* delta, int parallelism, st_result** out) {
  if (!seq || !elem || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    std::vector<Rat> grid = eps_grid && *eps_grid
                                ? parse_eps_grid(eps_grid)
                                : std::vector<Rat>{make_rat(1, 10), make_rat(1, 20),
                                                   make_rat(1, 100)};
    Rat d = delta && *delta ? parse_rat(delta) : make_rat(1, 100);
    OracleReport r = oracle_membership(elem->elem, seq->seq, prefix, grid, d, parallelism);
    *out = make_result(oracle_report_to_json(r).dump(2),
                       r.overall == StatVerdict::Inconclusive ? 2 : 0);
  });
}

st_status st_oracle_trace_csv(const st_sequence* seq, const st_element* elem, int64_t prefix,
                              const char* eps_grid, st_result** out) {
  if (!seq || !elem || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    std::vector<Rat> grid = eps_grid && *eps_grid
                                ? parse_eps_grid(eps_grid)
                                : std::vector<Rat>{make_rat(1, 10), make_rat(1, 20),
                                                   make_rat(1, 100)};
    std::ostringstream csv;
    csv << "n,norm_lo,norm_hi,exact";
    for (const auto& e : grid) csv << ",exc_" << rat_str(e);
    csv << "\n";
    auto trace = [&](std::int64_t n, const NormBracket& nb) {
      csv << n << "," << rat_str(nb.lo) << "," << rat_str(nb.hi) << "," << (nb.exact ? 1 : 0);
      for (const auto& e : grid) csv << "," << (!(nb.hi < e) ? 1 : 0);
      csv << "\n";
    };
    oracle_membership(elem->elem, seq->seq, prefix, grid, make_rat(1, 100), 1, trace);
    *out = make_result(csv.str());
  });
}

st_status st_check(const st_sequence* seq, const st_element* elem, const char* params_json,
                   st_result** out) {
  if (!seq || !elem || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    MembershipParams p = params_from_json_text(params_json);
    MembershipVerdict v = check_thm_main(elem->elem, seq->seq, p);
    *out = make_result(verdict_to_json(v).dump(2), v.outcome == Outcome::Undecided ? 2 : 0);
  });
}

st_status st_compare(const st_sequence* seq, const st_element* elem, const char* params_json,
                     st_result** out) {
  if (!seq || !elem || !out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    MembershipParams p = params_from_json_text(params_json);
    ComparisonReport r = compare(elem->elem, seq->seq, p);
    bool undecided = r.symbolic.outcome == Outcome::Undecided ||
                     r.oracle.overall == StatVerdict::Inconclusive;
    *out = make_result(comparison_to_json(r).dump(2), undecided ? 2 : 0);
  });
}

st_status st_corpus(uint64_t seed, int32_t size, st_result** out) {
  if (!out) return fail(ST_ERR_PARSE, "null argument");
  return guarded([&] {
    auto entries = generate_corpus(seed, size);
    *out = make_result(corpus_manifest(entries, seed).dump(2));
  });
}

const char* st_result_payload(const st_result* result) {
  return result ? result->payload.c_str() : "";
}

int32_t st_result_exit_hint(const st_result* result) { return result ? result->exit_hint : 0; }

void st_result_free(st_result* result) { delete result; }

}  // extern "C"
