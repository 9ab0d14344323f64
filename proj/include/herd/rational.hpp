#pragma once

#include <gmpxx.h>

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace herd {

// Arbitrary-precision rational, always kept in canonical form (reduced
// fraction, positive denominator). This is the exact scalar used by the
// verifier and the cascade DP; the solver path uses double.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}            // NOLINT: implicit by design
  Rational(long n) : v_(static_cast<long int>(n)) {}
  Rational(long long n) { set_ll(n); }
  Rational(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    Rational n(num), d(den);
    v_ = n.v_ / d.v_;
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  const mpq_class& raw() const { return v_; }

  double to_double() const { return v_.get_d(); }
  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }

  std::string str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ + b.v_)); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ - b.v_)); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.v_ * b.v_)); }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::invalid_argument("Rational: division by zero");
    return Rational(mpq_class(a.v_ / b.v_));
  }
  Rational operator-() const { return Rational(mpq_class(-v_)); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  // q^e for integer e (e may be negative; base must be nonzero then).
  static Rational pow(const Rational& base, int e) {
    if (e == 0) return Rational(1);
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-(long long)e) : static_cast<unsigned long>(e);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), base.v_.get_num().get_mpz_t(), k);
    mpz_pow_ui(den.get_mpz_t(), base.v_.get_den().get_mpz_t(), k);
    if (inv) {
      if (num == 0) throw std::invalid_argument("Rational::pow: 0 to negative power");
      std::swap(num, den);
    }
    mpq_class q(num, den);
    q.canonicalize();
    return Rational(q);
  }

 private:
  void set_ll(long long n) {
    if (n >= INT64_C(-2147483648) && n <= INT64_C(2147483647)) {
      v_ = static_cast<long int>(n);
    } else {
      // portable path for values outside long int range
      bool neg = n < 0;
      unsigned long long m = neg ? 0ULL - static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n);
      mpz_class z;
      mpz_import(z.get_mpz_t(), 1, 1, sizeof(m), 0, 0, &m);
      if (neg) z = -z;
      v_ = mpq_class(z);
    }
  }

  mpq_class v_;
};

inline Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

// Parses "a/b" (integers) or a plain decimal like "0.999" into an exact
// rational; decimals are read base-10 exactly, never through binary floats.
inline Rational parse_rational(std::string_view s) {
  auto fail = [&] { throw std::invalid_argument("invalid rational: '" + std::string(s) + "'"); };
  if (s.empty()) fail();
  std::string str(s);
  auto slash = str.find('/');
  if (slash != std::string::npos) {
    std::string num = str.substr(0, slash), den = str.substr(slash + 1);
    if (num.empty() || den.empty()) fail();
    try {
      mpz_class n(num, 10), d(den, 10);
      if (d == 0) fail();
      mpq_class q(n, d);
      q.canonicalize();
      return Rational(q);
    } catch (const std::invalid_argument&) {
      fail();
    }
  }
  auto dot = str.find('.');
  std::string ipart = dot == std::string::npos ? str : str.substr(0, dot);
  std::string fpart = dot == std::string::npos ? "" : str.substr(dot + 1);
  bool neg = false;
  if (!ipart.empty() && (ipart[0] == '+' || ipart[0] == '-')) {
    neg = ipart[0] == '-';
    ipart.erase(0, 1);
  }
  if (ipart.empty() && fpart.empty()) fail();
  for (char c : ipart) if (c < '0' || c > '9') fail();
  for (char c : fpart) if (c < '0' || c > '9') fail();
  try {
    mpz_class n(ipart.empty() ? "0" : ipart, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fpart.size());
    n *= scale;
    if (!fpart.empty()) n += mpz_class(fpart, 10);
    if (neg) n = -n;
    mpq_class q(n, scale);
    q.canonicalize();
    return Rational(q);
  } catch (const std::invalid_argument&) {
    fail();
  }
  return Rational(0);  // unreachable
}

}  // namespace herd

namespace Eigen {

template <>
struct NumTraits<herd::Rational> : GenericNumTraits<herd::Rational> {
  typedef herd::Rational Real;
  typedef herd::Rational NonInteger;
  typedef herd::Rational Nested;
  static inline Real epsilon() { return herd::Rational(0); }
  static inline Real dummy_precision() { return herd::Rational(0); }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 30,
    MulCost = 30
  };
};

}  // namespace Eigen
