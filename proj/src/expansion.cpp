#include "expansion.hpp"

#include <algorithm>

namespace storsion {

DigitRule DigitRule::indicator(SetPtr support, DigitValue value) {
  if (!support) throw std::invalid_argument("indicator rule needs a support set");
  if (value == DigitValue::Custom)
    throw std::invalid_argument("use indicator_custom for function-valued digits");
  DigitRule r;
  r.kind = Kind::Indicator;
  r.support = std::move(support);
  r.value = value;
  return r;
}

DigitRule DigitRule::indicator_custom(SetPtr support,
                                      std::function<std::int64_t(std::int64_t, std::int64_t)> fn) {
  if (!support || !fn) throw std::invalid_argument("indicator_custom needs a set and a function");
  DigitRule r;
  r.kind = Kind::Indicator;
  r.support = std::move(support);
  r.value = DigitValue::Custom;
  r.custom = std::move(fn);
  return r;
}

DigitRule DigitRule::custom_digits(std::function<std::int64_t(std::int64_t, std::int64_t)> fn) {
  if (!fn) throw std::invalid_argument("custom digit rule needs a function");
  DigitRule r;
  r.kind = Kind::Custom;
  r.value = DigitValue::Custom;
  r.custom = std::move(fn);
  return r;
}

DigitRule DigitRule::eventually_periodic(std::vector<std::int64_t> prefix,
                                         std::vector<std::int64_t> period) {
  if (period.empty()) throw std::invalid_argument("eventually_periodic needs a non-empty period");
  DigitRule r;
  r.kind = Kind::EventuallyPeriodic;
  r.prefix = std::move(prefix);
  r.period = std::move(period);
  return r;
}

DigitRule DigitRule::prefix_then_zero(std::vector<std::int64_t> prefix) {
  DigitRule r;
  r.kind = Kind::PrefixThenZero;
  r.prefix = std::move(prefix);
  return r;
}

std::int64_t DigitRule::digit(std::int64_t n, std::int64_t q) const {
  std::int64_t c = 0;
  switch (kind) {
    case Kind::Indicator:
      if (support->contains(n)) {
        switch (value) {
          case DigitValue::One:
            c = 1;
            break;
          case DigitValue::QMinusOne:
            c = q - 1;
            break;
          case DigitValue::Custom:
            c = custom(n, q);
            break;
        }
      }
      break;
    case Kind::Custom:
      c = custom(n, q);
      break;
    case Kind::EventuallyPeriodic: {
      auto plen = static_cast<std::int64_t>(prefix.size());
      if (n <= plen)
        c = prefix[static_cast<std::size_t>(n - 1)];
      else
        c = period[static_cast<std::size_t>((n - 1 - plen) %
                                            static_cast<std::int64_t>(period.size()))];
      break;
    }
    case Kind::PrefixThenZero: {
      auto plen = static_cast<std::int64_t>(prefix.size());
      c = n <= plen ? prefix[static_cast<std::size_t>(n - 1)] : 0;
      break;
    }
  }
  if (c < 0 || c >= q)
    throw std::out_of_range("digit rule produced c_" + std::to_string(n) + " = " +
                            std::to_string(c) + " outside [0, q_n) with q_n = " +
                            std::to_string(q));
  return c;
}

CircleElement CircleElement::rational(Rat x) {
  if (x < 0 || x >= 1) x = frac(x);
  CircleElement e;
  e.rational_ = std::move(x);
  return e;
}

CircleElement CircleElement::rational(std::int64_t num, std::int64_t den) {
  return rational(make_rat(num, den));
}

CircleElement CircleElement::digits(DigitRule rule) {
  CircleElement e;
  e.rule_ = std::move(rule);
  return e;
}

const Rat& CircleElement::value() const {
  if (!rational_) throw std::logic_error("element is not rational");
  return *rational_;
}

const DigitRule& CircleElement::rule() const {
  if (!rule_) throw std::logic_error("element is not digit-defined");
  return *rule_;
}

ExpansionPrefix expand(const Rat& x, SeqPtr seq, std::int64_t N) {
  if (x < 0 || x >= 1) throw std::invalid_argument("expand needs x in [0,1)");
  if (N < 1) throw std::invalid_argument("expand needs N >= 1");
  ExpansionPrefix out;
  out.seq = seq;
  out.N = N;
  out.digits.reserve(static_cast<std::size_t>(N));
  Rat r = x;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (r == 0) {
      if (!out.terminated) {
        out.terminated = true;
        out.termination_index = n - 1;
      }
      out.digits.push_back(0);
      continue;
    }
    std::int64_t q = seq->ratio(n);
    Rat t = r * q;
    Int c;
    mpz_fdiv_q(c.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    out.digits.push_back(c.get_si());
    r = t - Rat(c);
  }
  if (r == 0 && !out.terminated) {
    out.terminated = true;
    out.termination_index = N;
  }
  return out;
}

ExpansionPrefix digits_prefix(const CircleElement& x, SeqPtr seq, std::int64_t N,
                              std::int64_t canon_window) {
  if (x.is_rational()) return expand(x.value(), seq, N);
  const DigitRule& rule = x.rule();
  if (rule.kind == DigitRule::Kind::Indicator && rule.support->enumeration_bound() < N)
    throw std::out_of_range("digit rule not evaluable to the requested prefix");
  ExpansionPrefix out;
  out.seq = seq;
  out.N = N;
  out.digits.reserve(static_cast<std::size_t>(N));
  std::int64_t run_max = 0;  // consecutive maximal digits
  bool warned = false;
  for (std::int64_t n = 1; n <= N; ++n) {
    std::int64_t q = seq->ratio(n);
    std::int64_t c = rule.digit(n, q);
    out.digits.push_back(c);
    if (c == q - 1) {
      if (++run_max >= canon_window && !warned) {
        out.diagnostics.push_back(
            "canonicality: digits are maximal on a window of length " +
            std::to_string(canon_window) + " ending at n = " + std::to_string(n));
        warned = true;
      }
    } else {
      run_max = 0;
    }
  }
  return out;
}

Rat frac_part(const Rat& x, const ArithmeticSequence& seq, std::int64_t n) {
  if (x < 0 || x >= 1) throw std::invalid_argument("frac_part needs x in [0,1)");
  if (n < 0) throw std::invalid_argument("frac_part needs n >= 0");
  const Int& p = x.get_num();
  const Int& q = x.get_den();
  Int a_mod = 1 % q;
  for (std::int64_t i = 1; i <= n; ++i) {
    a_mod *= seq.ratio(i);
    a_mod %= q;
  }
  Int num = (a_mod * p) % q;
  return make_rat(num, q);
}

FracScanner::FracScanner(const Rat& x, SeqPtr seq)
    : seq_(std::move(seq)), num_(x.get_num()), den_(x.get_den()), a_mod_(1 % x.get_den()) {
  if (x < 0 || x >= 1) throw std::invalid_argument("FracScanner needs x in [0,1)");
}

Rat FracScanner::next() {
  ++n_;
  a_mod_ *= seq_->ratio(n_);
  a_mod_ %= den_;
  Int num = (a_mod_ * num_) % den_;
  return make_rat(num, den_);
}

Rat sigma(const ExpansionPrefix& p, std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 0) throw std::invalid_argument("sigma needs n >= 1, k >= 0");
  if (n + k > p.N) throw std::out_of_range("sigma: digit prefix too short");
  Int num = p.digit(n);
  Int den = p.seq->ratio(n);
  for (std::int64_t i = n + 1; i <= n + k; ++i) {
    std::int64_t q = p.seq->ratio(i);
    num = num * q + p.digit(i);
    den *= q;
  }
  return make_rat(num, den);
}

bool verify_identities(const Rat& x, SeqPtr seq, std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 0) throw std::invalid_argument("verify_identities needs n >= 1, k >= 0");
  ExpansionPrefix p = expand(x, seq, n + k + 1);

  // i) q_n ... q_{n+k} = a_{n+k} / a_{n-1}
  Int prod = 1;
  for (std::int64_t i = n; i <= n + k; ++i) prod *= seq->ratio(i);
  if (prod * seq->term(n - 1) != seq->term(n + k)) return false;

  Rat fa_prev = frac_part(x, *seq, n - 1);
  Rat fa_n = frac_part(x, *seq, n);
  Rat fa_tail = frac_part(x, *seq, n + k);
  Rat s = sigma(p, n, k);
  Rat prod_r(prod);

  // ii)/iv)/v) {a_{n-1}x} = sigma_{n,k} + {a_{n+k}x} / (q_n ... q_{n+k})
  if (fa_prev != s + fa_tail / prod_r) return false;

  // iii) {a_{n+k}x} = (q_n ... q_{n+k}) * ({a_{n-1}x} - sigma_{n,k})
  if (fa_tail != prod_r * (fa_prev - s)) return false;

  // vi) {a_{n-1}x} = c_n/q_n + {a_n x}/q_n
  Rat qn(seq->ratio(n));
  if (fa_prev != Rat(p.digit(n)) / qn + fa_n / qn) return false;

  // sigma recursion: sigma_{n,k+1} = sigma_{n,k} + c_{n+k+1} / (q_n ... q_{n+k+1})
  std::int64_t q_next = seq->ratio(n + k + 1);
  Rat step = Rat(p.digit(n + k + 1)) / (prod_r * q_next);
  if (sigma(p, n, k + 1) != s + step) return false;

  // tail bracket: sigma_{n,k} <= {a_{n-1}x} < sigma_{n,k} + step + 2^{-(k+2)}
  if (s > fa_prev) return false;
  Int pw = 1;
  mpz_mul_2exp(pw.get_mpz_t(), pw.get_mpz_t(), static_cast<mp_bitcnt_t>(k + 2));
  if (fa_prev >= s + step + make_rat(Int(1), pw)) return false;

  return true;
}

std::pair<SetPtr, SetPtr> support_sets(const ExpansionPrefix& p) {
  std::vector<std::int64_t> supp, supp_q;
  for (std::int64_t n = 1; n <= p.N; ++n) {
    std::int64_t c = p.digit(n);
    if (c != 0) supp.push_back(n);
    if (c == p.seq->ratio(n) - 1) supp_q.push_back(n);
  }
  return {IndexSet::finite(std::move(supp)), IndexSet::finite(std::move(supp_q))};
}

Rat reconstruct(const ExpansionPrefix& p) {
  Rat value(0);
  for (std::int64_t n = p.N; n >= 1; --n) {
    value += p.digit(n);
    value /= p.seq->ratio(n);
  }
  return value;
}

CircleElement element_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("type"))
    throw std::invalid_argument("element spec must be an object with a \"type\"");
  const std::string type = spec.at("type").get<std::string>();
  if (type == "rational") {
    Rat x = make_rat(Int(spec.at("num").is_string() ? Int(spec.at("num").get<std::string>())
                                                    : Int(spec.at("num").get<long>())),
                     Int(spec.at("den").is_string() ? Int(spec.at("den").get<std::string>())
                                                    : Int(spec.at("den").get<long>())));
    if (x < 0 || x >= 1) throw std::invalid_argument("rational element must lie in [0,1)");
    return CircleElement::rational(std::move(x));
  }
  if (type == "digit_element") {
    const json& rule = spec.at("rule");
    const std::string rt = rule.at("type").get<std::string>();
    if (rt == "indicator") {
      const std::string v = rule.at("value").get<std::string>();
      DigitValue dv;
      if (v == "one")
        dv = DigitValue::One;
      else if (v == "q_minus_one")
        dv = DigitValue::QMinusOne;
      else
        throw std::invalid_argument("indicator value must be \"one\" or \"q_minus_one\"");
      return CircleElement::digits(DigitRule::indicator(set_from_json(rule.at("support")), dv));
    }
    if (rt == "eventually_periodic")
      return CircleElement::digits(
          DigitRule::eventually_periodic(rule.at("prefix").get<std::vector<std::int64_t>>(),
                                         rule.at("period").get<std::vector<std::int64_t>>()));
    if (rt == "prefix_then_zero")
      return CircleElement::digits(
          DigitRule::prefix_then_zero(rule.at("prefix").get<std::vector<std::int64_t>>()));
    throw std::invalid_argument("unknown digit rule type: " + rt);
  }
  throw std::invalid_argument("unknown element spec type: " + type);
}

json element_to_json(const CircleElement& x) {
  if (x.is_rational())
    return json{{"type", "rational"},
                {"num", x.value().get_num().get_str()},
                {"den", x.value().get_den().get_str()}};
  const DigitRule& r = x.rule();
  switch (r.kind) {
    case DigitRule::Kind::Indicator: {
      if (r.value == DigitValue::Custom)
        throw std::invalid_argument("custom digit rules have no file representation");
      return json{{"type", "digit_element"},
                  {"rule", json{{"type", "indicator"},
                                {"support", set_to_json(*r.support)},
                                {"value", r.value == DigitValue::One ? "one" : "q_minus_one"}}}};
    }
    case DigitRule::Kind::EventuallyPeriodic:
      return json{{"type", "digit_element"},
                  {"rule", json{{"type", "eventually_periodic"},
                                {"prefix", r.prefix},
                                {"period", r.period}}}};
    case DigitRule::Kind::PrefixThenZero:
      return json{{"type", "digit_element"},
                  {"rule", json{{"type", "prefix_then_zero"}, {"prefix", r.prefix}}}};
    case DigitRule::Kind::Custom:
      throw std::invalid_argument("custom digit rules have no file representation");
  }
  throw std::logic_error("unreachable digit rule kind");
}

}  // namespace storsion
