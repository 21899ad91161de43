#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>

#include "artinhodge/error.hpp"

namespace ah {

// All arithmetic in the library is exact. The base field is either the
// rationals Q or the Gaussian rationals Q(i); these stand in for the real
// and complex coefficient fields of the theory, every construction being
// algebraic over the prime field.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

enum class Field { rationals, gaussian_rationals };

inline const char* field_name(Field f) {
  return f == Field::rationals ? "Q" : "Qi";
}

// An element re + im*i of Q(i), tagged with the field it is meant to live
// in. The tag promotes under mixed arithmetic; a rationals-tagged scalar
// always has im == 0.
struct Scalar {
  Rat re{0};
  Rat im{0};
  Field tag = Field::rationals;

  Scalar() = default;
  Scalar(long n) : re(n) {}  // implicit: integer literals occur in matrix data
  Scalar(Rat r, Field t = Field::rationals) : re(std::move(r)), tag(t) {}
  Scalar(Rat r, Rat i)
      : re(std::move(r)), im(std::move(i)), tag(Field::gaussian_rationals) {}

  static Scalar zero(Field t = Field::rationals) { return Scalar(Rat(0), t); }
  static Scalar one(Field t = Field::rationals) { return Scalar(Rat(1), t); }
  static Scalar i() { return Scalar(Rat(0), Rat(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_rational() const { return im == 0; }

  Scalar conj() const {
    Scalar r = *this;
    r.im = -r.im;
    return r;
  }

  Scalar operator-() const {
    Scalar r = *this;
    r.re = -r.re;
    r.im = -r.im;
    return r;
  }

  Scalar& operator+=(const Scalar& o) {
    re += o.re;
    if (o.im != 0) im += o.im;
    tag = std::max(tag, o.tag);
    return *this;
  }
  Scalar& operator-=(const Scalar& o) {
    re -= o.re;
    if (o.im != 0) im -= o.im;
    tag = std::max(tag, o.tag);
    return *this;
  }
  Scalar& operator*=(const Scalar& o) {
    if (im == 0 && o.im == 0) {
      re *= o.re;
    } else {
      Rat r = re * o.re - im * o.im;
      Rat i = re * o.im + im * o.re;
      re = std::move(r);
      im = std::move(i);
    }
    tag = std::max(tag, o.tag);
    return *this;
  }

  Scalar inv() const {
    require(!is_zero(), Errc::internal_inconsistency, "division by zero");
    Rat n = re * re + im * im;
    Scalar r = *this;
    r.re = re / n;
    r.im = -im / n;
    return r;
  }

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    return a * b.inv();
  }
  // Equality compares values, not tags: 1 in Q equals 1 in Q(i).
  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) {
    return !(a == b);
  }
};

// "p/q" in lowest terms; bare "p" for integers.
inline std::string rat_to_string(const Rat& r) {
  std::string s = boost::multiprecision::numerator(r).str();
  if (boost::multiprecision::denominator(r) != 1)
    s += "/" + boost::multiprecision::denominator(r).str();
  return s;
}

inline Rat rat_from_string(const std::string& s) {
  try {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    require(den != 0, Errc::parse_error, "zero denominator in '" + s + "'");
    return Rat(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::parse_error, "bad rational literal '" + s + "'");
  }
}

inline std::string scalar_to_string(const Scalar& s) {
  if (s.im == 0) return rat_to_string(s.re);
  return rat_to_string(s.re) + (s.im > 0 ? "+" : "") + rat_to_string(s.im) +
         "i";
}

}  // namespace ah
