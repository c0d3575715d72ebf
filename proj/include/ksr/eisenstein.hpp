#pragma once

// Exact arithmetic in the Eisenstein integers Z[w], w = exp(2 pi i / 3).
//
// An element is stored as a + b*w. Products reduce with w^2 = -1 - w, so the
// pair (a, b) is unique for every complex value in the ring.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

namespace ksr {

using bigint = boost::multiprecision::cpp_int;

template <class Int> class basic_eisenstein {
public:
  using int_type = Int;

  basic_eisenstein() = default;
  basic_eisenstein(Int a, Int b = 0) : a_(std::move(a)), b_(std::move(b)) {}
  basic_eisenstein(int a) : a_(a), b_(0) {}

  /// a + b*w + c*w^2, reduced to (a - c) + (b - c)*w.
  static basic_eisenstein from_abc(const Int &a, const Int &b, const Int &c) {
    return {a - c, b - c};
  }
  static basic_eisenstein omega() { return {0, 1}; }
  static basic_eisenstein omega2() { return {-1, -1}; }

  const Int &a() const noexcept { return a_; }
  const Int &b() const noexcept { return b_; }

  bool is_zero() const { return a_ == 0 && b_ == 0; }
  /// Re(a + b*w) = a - b/2 vanishes.
  bool is_imaginary() const { return 2 * a_ == b_; }
  bool is_real() const { return b_ == 0; }

  basic_eisenstein conj() const { return {a_ - b_, -b_}; }
  Int norm() const { return a_ * a_ - a_ * b_ + b_ * b_; }

  basic_eisenstein operator-() const { return {-a_, -b_}; }
  basic_eisenstein &operator+=(const basic_eisenstein &o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  basic_eisenstein &operator-=(const basic_eisenstein &o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  basic_eisenstein &operator*=(const basic_eisenstein &o) {
    // (a + bw)(c + dw) = ac + (ad + bc)w + bd w^2
    Int bd = b_ * o.b_;
    Int na = a_ * o.a_ - bd;
    Int nb = a_ * o.b_ + b_ * o.a_ - bd;
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
  }
  basic_eisenstein &operator*=(const Int &k) {
    a_ *= k;
    b_ *= k;
    return *this;
  }

  friend basic_eisenstein operator+(basic_eisenstein x, const basic_eisenstein &y) { return x += y; }
  friend basic_eisenstein operator-(basic_eisenstein x, const basic_eisenstein &y) { return x -= y; }
  friend basic_eisenstein operator*(basic_eisenstein x, const basic_eisenstein &y) { return x *= y; }

  friend bool operator==(const basic_eisenstein &x, const basic_eisenstein &y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  /// Lexicographic on (a, b); only used to order canonical forms.
  friend std::strong_ordering operator<=>(const basic_eisenstein &x, const basic_eisenstein &y) {
    if (x.a_ != y.a_)
      return x.a_ < y.a_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (x.b_ != y.b_)
      return x.b_ < y.b_ ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// Serialized as "a,b" (the ray file coordinate syntax).
  std::string str() const {
    std::ostringstream os;
    os << a_ << ',' << b_;
    return os.str();
  }
  friend std::ostream &operator<<(std::ostream &os, const basic_eisenstein &z) {
    return os << z.str();
  }

private:
  Int a_{0};
  Int b_{0};
};

using eisenstein = basic_eisenstein<bigint>;

/// True when z is k, k*w or k*w^2 for an integer |k| <= bound.
template <class Int> bool is_small_unit_multiple(const basic_eisenstein<Int> &z, int bound) {
  auto small = [bound](const Int &v) { return v >= -bound && v <= bound; };
  if (z.b() == 0)
    return small(z.a());
  if (z.a() == 0)
    return small(z.b());
  return z.a() == z.b() && small(z.a());
}

/// Element of Q(w): num / den with den > 0 and gcd(num.a, num.b, den) = 1.
class eis_rational {
public:
  eis_rational() = default;
  eis_rational(eisenstein num, bigint den = 1) : num_(std::move(num)), den_(std::move(den)) {
    reduce();
  }

  const eisenstein &num() const noexcept { return num_; }
  const bigint &den() const noexcept { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  eis_rational conj() const { return {num_.conj(), den_}; }

  /// Exact inverse; x / y = x * conj(y) / norm(y).
  eis_rational inverse() const {
    if (num_.is_zero())
      throw std::domain_error("eis_rational: division by zero");
    eisenstein n = num_.conj();
    n *= den_;
    return {std::move(n), num_.norm()};
  }

  friend eis_rational operator*(const eis_rational &x, const eis_rational &y) {
    return {x.num_ * y.num_, x.den_ * y.den_};
  }
  friend eis_rational operator+(const eis_rational &x, const eis_rational &y) {
    eisenstein l = x.num_;
    l *= y.den_;
    eisenstein r = y.num_;
    r *= x.den_;
    return {l + r, x.den_ * y.den_};
  }
  friend bool operator==(const eis_rational &x, const eis_rational &y) = default;

private:
  void reduce() {
    if (den_ == 0)
      throw std::domain_error("eis_rational: zero denominator");
    if (den_ < 0) {
      den_ = -den_;
      num_ = -num_;
    }
    bigint g = gcd(gcd(num_.a(), num_.b()), den_);
    if (g > 1) {
      num_ = eisenstein(num_.a() / g, num_.b() / g);
      den_ /= g;
    }
  }

  eisenstein num_{};
  bigint den_{1};
};

} // namespace ksr

template <class Int> struct std::hash<ksr::basic_eisenstein<Int>> {
  std::size_t operator()(const ksr::basic_eisenstein<Int> &z) const {
    std::size_t h = std::hash<Int>{}(z.a());
    return h * 1000003u ^ std::hash<Int>{}(z.b());
  }
};
