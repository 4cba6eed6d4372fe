#pragma once

#include <string>
#include <vector>

#include "mintime/rat.hpp"

namespace mintime {

// Points, directions and dual vectors are all plain rational coordinate vectors.
using Vec = std::vector<Rat>;

inline void check_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size()) throw InputError(std::string(what) + ": dimension mismatch");
}

inline void check_dim(const Vec& a, size_t dim, const char* what = "vector") {
  if (a.size() != dim) throw InputError(std::string(what) + ": dimension mismatch");
}

inline Rat dot(const Vec& a, const Vec& b) {
  check_dim(a, b, "dot");
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec add(const Vec& a, const Vec& b) {
  check_dim(a, b, "add");
  Vec out(a);
  for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

inline Vec sub(const Vec& a, const Vec& b) {
  check_dim(a, b, "sub");
  Vec out(a);
  for (size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

inline Vec scale(const Rat& c, const Vec& a) {
  Vec out(a);
  for (auto& x : out) x *= c;
  return out;
}

inline Vec negate(const Vec& a) { return scale(Rat(-1), a); }

inline Rat norm_sq(const Vec& a) { return dot(a, a); }

inline bool is_zero(const Vec& a) {
  for (const auto& x : a) {
    if (!x.is_zero()) return false;
  }
  return true;
}

inline Vec zero_vec(size_t dim) { return Vec(dim, Rat(0)); }

// Lexicographic order; used wherever a canonical representative is needed.
inline bool lex_less(const Vec& a, const Vec& b) {
  check_dim(a, b, "lex_less");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

inline std::string vec_str(const Vec& a) {
  std::string s = "(";
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += ", ";
    s += a[i].str();
  }
  return s + ")";
}

// Scales a nonzero vector so coordinates are coprime integers and the first
// nonzero coordinate is positive when sign_normalize is set. Canonical form for
// ray directions (sign preserved) and line directions (sign normalized).
inline Vec primitive(const Vec& a, bool sign_normalize = false) {
  mpz_class num_gcd = 0, den_lcm = 1;
  for (const auto& x : a) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), mpz_class(x.num()).get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), mpz_class(x.den()).get_mpz_t());
  }
  if (num_gcd == 0) return a;  // zero vector stays put
  Vec out = scale(Rat(den_lcm, num_gcd), a);
  if (sign_normalize) {
    for (const auto& x : out) {
      if (x.is_zero()) continue;
      if (x.sign() < 0) out = negate(out);
      break;
    }
  }
  return out;
}

inline std::vector<double> to_doubles(const Vec& a) {
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(x.to_double());
  return out;
}

}  // namespace mintime
