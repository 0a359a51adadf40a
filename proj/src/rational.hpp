#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace storsion {

using Int = mpz_class;
using Rat = mpq_class;
using json = nlohmann::ordered_json;

inline Rat make_rat(Int num, Int den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(std::move(num), std::move(den));
  r.canonicalize();
  return r;
}

inline Rat make_rat(std::int64_t num, std::int64_t den) {
  return make_rat(Int(num), Int(den));
}

/// Fractional part x - [x], always in [0,1).
inline Rat frac(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return x - Rat(q);
}

/// Distance from r in [0,1) to the nearest integer: min(r, 1-r) in [0, 1/2].
inline Rat circle_norm(const Rat& r) {
  if (r < 0 || r >= 1) throw std::invalid_argument("circle_norm: input outside [0,1)");
  Rat other = 1 - r;
  return r < other ? r : other;
}

/// Circle norm of an arbitrary rational (reduces mod 1 first).
inline Rat circle_norm_mod1(const Rat& x) { return circle_norm(frac(x)); }

inline json rat_to_json(const Rat& r) {
  return json{{"num", r.get_num().get_str()}, {"den", r.get_den().get_str()}};
}

inline Rat rat_from_json(const json& j) {
  if (j.is_string()) {
    // "p/q" or "p"
    const std::string s = j.get<std::string>();
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
  }
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (!j.is_object() || !j.contains("num") || !j.contains("den"))
    throw std::invalid_argument("rational json must be {num,den} or a \"p/q\" string");
  auto field = [&](const char* k) {
    const auto& v = j.at(k);
    if (v.is_string()) return Int(v.get<std::string>());
    return Int(static_cast<long>(v.get<std::int64_t>()));
  };
  return make_rat(field("num"), field("den"));
}

inline Rat parse_rat(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (r.get_den() == 0) throw std::invalid_argument("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace storsion
