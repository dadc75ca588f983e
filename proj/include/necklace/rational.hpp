#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace necklace {

namespace detail {

inline unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
  while (b != 0) {
    unsigned __int128 r = a % b;
    a = b;
    b = r;
  }
  return a;
}

inline long long narrow128(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw std::overflow_error("rational overflow");
  return static_cast<long long>(v);
}

}  // namespace detail

// Exact rational arithmetic on 64-bit numerator/denominator. Denominator is
// always positive and the fraction is reduced. Every operation goes through
// 128-bit intermediates and throws std::overflow_error on narrowing failure;
// the computations in this project keep coefficients tiny, so an overflow
// indicates a bug rather than a capacity limit.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    __int128 nn = n, dd = d;
    if (dd < 0) {
      nn = -nn;
      dd = -dd;
    }
    reduce_assign(nn, dd);
  }

  long long num() const { return num_; }
  long long den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(__int128(a.num_) * b.den_ + __int128(b.num_) * a.den_,
                __int128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(__int128(a.num_) * b.den_ - __int128(b.num_) * a.den_,
                __int128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    __int128 nn = __int128(a.num_) * b.den_;
    __int128 dd = __int128(a.den_) * b.num_;
    if (dd < 0) {
      nn = -nn;
      dd = -dd;
    }
    return make(nn, dd);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = detail::narrow128(-__int128(num_));
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }
  Rational& operator*=(const Rational& b) { return *this = *this * b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    __int128 l = __int128(a.num_) * b.den_;
    __int128 r = __int128(b.num_) * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  // "0", "2", "-1/2"
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

 private:
  static Rational make(__int128 n, __int128 d) {
    Rational r;
    r.reduce_assign(n, d);
    return r;
  }
  void reduce_assign(__int128 n, __int128 d) {
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      return;
    }
    unsigned __int128 an = n < 0 ? -(unsigned __int128)n : (unsigned __int128)n;
    unsigned __int128 g = detail::gcd128(an, (unsigned __int128)d);
    num_ = detail::narrow128(n / (__int128)g);
    den_ = detail::narrow128(d / (__int128)g);
  }

  long long num_;
  long long den_;
};

inline Rational half() { return Rational(1, 2); }

}  // namespace necklace
