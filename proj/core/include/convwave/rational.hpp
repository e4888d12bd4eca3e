#pragma once
// Exact rational arithmetic over 128-bit integers. Wide enough for the
// bootstrap sequences out to j ~ 40 with dyadic parameters. Every
// operation is overflow-checked and throws instead of wrapping.

#include <cmath>
#include <stdexcept>
#include <string>

namespace convwave {

class Rational {
 public:
  using Int = __int128;

  Rational() = default;
  Rational(long long n) : num_(n) {}
  Rational(long long n, long long d) { *this = make(Int(n), Int(d)); }

  static Rational make(Int n, Int d) {
    if (d == 0) throw std::domain_error("rational: zero denominator");
    if (d < 0) {
      n = neg(n);
      d = neg(d);
    }
    Int g = gcd_i(n < 0 ? neg(n) : n, d);
    Rational r;
    r.num_ = n / g;
    r.den_ = d / g;
    return r;
  }

  // Exact value of a finite double (every finite double is dyadic).
  static Rational from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rational: non-finite");
    if (x == 0.0) return Rational();
    int e = 0;
    double m = std::frexp(x, &e);
    long long mant = static_cast<long long>(std::ldexp(m, 53));
    int shift = 53 - e;
    if (shift <= 0) {
      if (-shift > 70) throw std::overflow_error("rational: double too large");
      return make(Int(mant) << -shift, 1);
    }
    if (shift > 126) throw std::overflow_error("rational: double too small");
    return make(Int(mant), Int(1) << shift);
  }

  Int num() const { return num_; }
  Int den() const { return den_; }

  double to_double() const {
    return static_cast<double>(static_cast<long double>(num_) /
                               static_cast<long double>(den_));
  }

  std::string str() const {
    std::string s = int_str(num_);
    if (den_ != 1) s += "/" + int_str(den_);
    return s;
  }

  Rational operator-() const {
    Rational r;
    r.num_ = neg(num_);
    r.den_ = den_;
    return r;
  }

  Rational operator+(const Rational& o) const {
    Int g = gcd_i(den_, o.den_);
    Int lhs = mul_ck(num_, o.den_ / g);
    Int rhs = mul_ck(o.num_, den_ / g);
    return make(add_ck(lhs, rhs), mul_ck(den_, o.den_ / g));
  }
  Rational operator-(const Rational& o) const { return *this + (-o); }

  Rational operator*(const Rational& o) const {
    Int g1 = gcd_i(num_ < 0 ? neg(num_) : num_, o.den_);
    Int g2 = gcd_i(o.num_ < 0 ? neg(o.num_) : o.num_, den_);
    Rational r;
    r.num_ = mul_ck(num_ / g1, o.num_ / g2);
    r.den_ = mul_ck(den_ / g2, o.den_ / g1);
    return r;
  }

  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("rational: division by zero");
    Rational inv;
    inv.num_ = o.den_;
    inv.den_ = o.num_;
    if (inv.den_ < 0) {
      inv.num_ = neg(inv.num_);
      inv.den_ = neg(inv.den_);
    }
    return *this * inv;
  }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return mul_ck(num_, o.den_) < mul_ck(o.num_, den_);
  }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>=(const Rational& o) const { return !(*this < o); }

 private:
  static Int neg(Int v) {
    if (v == kMin) throw std::overflow_error("rational overflow");
    return -v;
  }
  static Int add_ck(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r))
      throw std::overflow_error("rational overflow");
    return r;
  }
  static Int mul_ck(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r))
      throw std::overflow_error("rational overflow");
    return r;
  }
  static Int gcd_i(Int a, Int b) {
    while (b != 0) {
      Int t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
  static std::string int_str(Int v) {
    if (v == 0) return "0";
    bool negv = v < 0;
    unsigned __int128 u =
        negv ? static_cast<unsigned __int128>(neg(v)) : static_cast<unsigned __int128>(v);
    std::string s;
    while (u != 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
      u /= 10;
    }
    return negv ? "-" + s : s;
  }

  static constexpr Int kMin = Int(1) << 127;

  Int num_ = 0;
  Int den_ = 1;
};

}
