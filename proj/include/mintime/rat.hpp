#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "mintime/errors.hpp"

namespace mintime {

// Arbitrary-precision rational, always in lowest terms with positive denominator.
// Thin wrapper over GMP's mpq_class; exists so the rest of the library has a single
// place for canonicalization, parsing and printing conventions.
class Rat {
 public:
  Rat() : q_(0) {}
  Rat(long n) : q_(n) {}  // NOLINT: implicit by design, mirrors integer literals
  // Routed through mpz so a negative denominator never hits GMP's unsigned ctor.
  Rat(long n, long d) : q_(mpz_class(n), mpz_class(d)) { canonical_check(d != 0); }
  explicit Rat(const mpq_class& q) : q_(q) { canonical_check(q.get_den() != 0); }
  explicit Rat(const mpz_class& n) : q_(n) {}
  Rat(const mpz_class& n, const mpz_class& d) : q_(n, d) { canonical_check(d != 0); }

  // Parses "p", "p/q", or decimal-free signed integers with optional whitespace.
  static Rat parse(const std::string& text) {
    std::string s;
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (!s.empty() && s[0] == '+') s.erase(0, 1);  // GMP rejects a leading '+'
    if (s.empty()) throw ParseError("empty rational literal");
    if (s.find_first_not_of("-/0123456789") != std::string::npos) {
      throw ParseError("bad rational literal: '" + text + "'");
    }
    try {
      mpq_class q(s, 10);
      if (q.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
      q.canonicalize();
      return Rat(q);
    } catch (const std::invalid_argument&) {
      throw ParseError("bad rational literal: '" + text + "'");
    }
  }

  const mpq_class& raw() const { return q_; }
  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }

  bool is_zero() const { return sgn(q_) == 0; }
  int sign() const { return sgn(q_); }
  double to_double() const { return q_.get_d(); }

  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  Rat operator-() const { return Rat(mpq_class(-q_)); }
  Rat& operator+=(const Rat& o) { q_ += o.q_; return *this; }
  Rat& operator-=(const Rat& o) { q_ -= o.q_; return *this; }
  Rat& operator*=(const Rat& o) { q_ *= o.q_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw InputError("rational division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    const int c = cmp(a.q_, b.q_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  void canonical_check(bool den_ok) {
    if (!den_ok) throw InputError("zero denominator");
    q_.canonicalize();  // mpq_class constructors do not canonicalize on their own
  }

  mpq_class q_;
};

inline Rat abs(const Rat& a) { return a.sign() < 0 ? -a : a; }
inline Rat min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

inline std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

// Rational with a single point at +infinity. Minimal time values and gauges live
// here: they are never negative-infinite.
class ExtRat {
 public:
  ExtRat() : finite_(true), value_(0) {}
  ExtRat(Rat v) : finite_(true), value_(std::move(v)) {}  // NOLINT: implicit by design
  static ExtRat infinity() { ExtRat e; e.finite_ = false; return e; }

  bool is_finite() const { return finite_; }
  const Rat& value() const {
    if (!finite_) throw InputError("value() on infinite quantity");
    return value_;
  }

  std::string str() const { return finite_ ? value_.str() : "inf"; }
  double to_double() const {
    return finite_ ? value_.to_double() : std::numeric_limits<double>::infinity();
  }

  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend bool operator<(const ExtRat& a, const ExtRat& b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const ExtRat& a, const ExtRat& b) { return a == b || a < b; }

 private:
  bool finite_;
  Rat value_;
};

inline std::ostream& operator<<(std::ostream& os, const ExtRat& r) { return os << r.str(); }

// Closed interval [lo, hi] with rational endpoints; certifies an irrational scalar.
struct RatInterval {
  Rat lo;
  Rat hi;

  Rat width() const { return hi - lo; }
  bool contains(const Rat& x) const { return lo <= x && x <= hi; }
  double mid_double() const { return (lo.to_double() + hi.to_double()) / 2.0; }
};

// Square root of a nonnegative rational: exact when the input is a perfect rational
// square, otherwise a certified enclosure of width <= 2^-precision_bits.
struct SqrtValue {
  bool exact = false;
  Rat exact_value;      // meaningful when exact
  RatInterval enclosure;  // always valid (degenerate when exact)

  Rat lower() const { return exact ? exact_value : enclosure.lo; }
  Rat upper() const { return exact ? exact_value : enclosure.hi; }
};

inline SqrtValue sqrt_rational(const Rat& s, unsigned precision_bits = 48) {
  if (s.sign() < 0) throw InputError("sqrt of negative rational");
  SqrtValue out;
  if (s.is_zero()) {
    out.exact = true;
    out.exact_value = Rat(0);
    out.enclosure = {Rat(0), Rat(0)};
    return out;
  }
  // sqrt(p/q) = sqrt(p*q)/q; scale by 4^k so the integer sqrt window gives the
  // requested rational precision.
  const mpz_class p = s.num(), q = s.den();
  mpz_class radicand = p * q;
  if (mpz_perfect_square_p(radicand.get_mpz_t())) {
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());
    out.exact = true;
    out.exact_value = Rat(root, q);
    out.enclosure = {out.exact_value, out.exact_value};
    return out;
  }
  mpz_class scale = 1;
  mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), precision_bits);
  mpz_class scaled = radicand * scale * scale;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  const mpz_class denom = q * scale;
  out.exact = false;
  out.enclosure = {Rat(root, denom), Rat(root + 1, denom)};
  return out;
}

}  // namespace mintime
