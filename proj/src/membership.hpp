#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "classify.hpp"
#include "density.hpp"
#include "expansion.hpp"
#include "statconv.hpp"

namespace storsion {

enum class Outcome { Member, NonMember, Undecided };

const char* to_string(Outcome o);

struct Witness {
  std::string condition;
  std::string set_desc;
  std::optional<DensityEstimate> density;
};

/// Decision record. NonMember always carries the violated condition as a
/// witness; Undecided always carries the empirical oracle's report.
struct MembershipVerdict {
  Outcome outcome = Outcome::Undecided;
  bool certain = false;
  std::string rule_fired;
  std::optional<Witness> witness;
  std::shared_ptr<OracleReport> oracle_summary;
};

struct MembershipParams {
  std::int64_t N = 100000;
  Rat threshold = make_rat(1, 100);   // density-zero threshold
  std::vector<Rat> eps_grid = {make_rat(1, 10), make_rat(1, 20), make_rat(1, 100)};
  Rat delta = make_rat(1, 100);       // oracle exceptional-density tolerance
  Rat eps_limit = make_rat(1, 20);    // tolerance for the in-R / in-T limit checks
  std::int64_t bound_cap = 1 << 20;
  int mod_max = 8;
  int shift_max = 4;
  int lk_max = 4;
  int parallelism = 1;
  bool run_all_cases = false;  // compare() cross-checks every applicable case
};

/// Digits, supports and their structural descriptions, computed once.
struct PreparedElement {
  CircleElement x;
  SeqPtr seq;
  MembershipParams params;
  std::shared_ptr<ExpansionPrefix> digits;  // to N + slack
  SetPtr supp;
  SetPtr supp_q;
  bool structural_support = false;   // supports are exact set descriptions
  bool finite_support_certain = false;

  std::int64_t digit(std::int64_t n) const { return digits->digit(n); }
  std::int64_t ratio(std::int64_t n) const { return seq->ratio(n); }
};

PreparedElement prepare_element(const CircleElement& x, SeqPtr seq, const MembershipParams& p);

/// Case (1): d(supp(x)) = 0 at the threshold implies membership.
std::optional<MembershipVerdict> check_zero_support(const PreparedElement& e);

/// q-bounded support: member iff (supp+1) ⊆^d supp and supp ⊆^d supp_q.
MembershipVerdict check_cor_qbounded(const PreparedElement& e);

/// q-divergent support: member iff c_n/q_n -> 0 in T along supp (off density
/// zero) and, for every probed D ⊆^d supp with D-1 q-bounded, in R along D.
MembershipVerdict check_cor_qdivergent(const PreparedElement& e);

/// d-splitting ratios: the three-part support-decomposition criterion.
MembershipVerdict check_thm_dsplitting(const PreparedElement& e, const SplitWitness& w);

/// Dispatcher over the closed-form cases plus the probe-family refutation
/// engine; sound for NonMember via an exhibited witness, sound for Member via
/// the closed-form cases, Undecided (with the oracle attached) otherwise.
MembershipVerdict check_thm_main(const PreparedElement& e);
MembershipVerdict check_thm_main(const CircleElement& x, SeqPtr seq, const MembershipParams& p);

struct BulletReport {
  std::string id;  // s1, s2, s3, n1, n2
  bool applies = false;
  Outcome implied = Outcome::Undecided;
  std::string note;
};

/// The five closing observations, evaluated as applicability detectors.
std::vector<BulletReport> check_bullets(const PreparedElement& e);

struct ComparisonReport {
  MembershipVerdict symbolic;
  OracleReport oracle;
  bool comparable = false;  // symbolic decided and oracle not inconclusive
  bool agree = false;
  std::string diagnostics;
};

ComparisonReport compare(const CircleElement& x, SeqPtr seq, const MembershipParams& p);

json verdict_to_json(const MembershipVerdict& v);
json comparison_to_json(const ComparisonReport& r);
json bullets_to_json(const std::vector<BulletReport>& bs);

}  // namespace storsion
