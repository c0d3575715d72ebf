#pragma once

// Exact real numbers p + q*sqrt(3) with rational p, q.

#include <boost/multiprecision/cpp_int.hpp>

#include <ostream>
#include <sstream>
#include <string>

namespace ksr {

using rational = boost::multiprecision::cpp_rational;

class quad_real {
public:
  quad_real() = default;
  quad_real(rational p, rational q = 0) : p_(std::move(p)), q_(std::move(q)) {}
  quad_real(int p) : p_(p), q_(0) {}

  static quad_real sqrt3() { return {0, 1}; }

  const rational &p() const noexcept { return p_; }
  const rational &q() const noexcept { return q_; }

  bool is_zero() const { return p_ == 0 && q_ == 0; }

  /// -1, 0 or 1.
  int sign() const {
    int sp = p_.sign();
    int sq = q_.sign();
    if (sq == 0)
      return sp;
    if (sp == 0 || sp == sq)
      return sq;
    // opposite signs: compare p^2 with 3 q^2
    rational lhs = p_ * p_;
    rational rhs = 3 * q_ * q_;
    if (lhs == rhs)
      return 0; // unreachable: sqrt(3) is irrational
    return lhs > rhs ? sp : sq;
  }

  quad_real operator-() const { return {-p_, -q_}; }
  quad_real &operator+=(const quad_real &o) {
    p_ += o.p_;
    q_ += o.q_;
    return *this;
  }
  quad_real &operator-=(const quad_real &o) {
    p_ -= o.p_;
    q_ -= o.q_;
    return *this;
  }
  quad_real &operator*=(const quad_real &o) {
    rational np = p_ * o.p_ + 3 * q_ * o.q_;
    rational nq = p_ * o.q_ + q_ * o.p_;
    p_ = std::move(np);
    q_ = std::move(nq);
    return *this;
  }

  friend quad_real operator+(quad_real x, const quad_real &y) { return x += y; }
  friend quad_real operator-(quad_real x, const quad_real &y) { return x -= y; }
  friend quad_real operator*(quad_real x, const quad_real &y) { return x *= y; }
  friend bool operator==(const quad_real &x, const quad_real &y) {
    return x.p_ == y.p_ && x.q_ == y.q_;
  }

  /// Numeric value in any boost.multiprecision (or builtin) float type.
  template <class Float> Float to() const {
    using std::sqrt;
    Float p = Float(numerator(p_)) / Float(denominator(p_));
    if (q_ == 0)
      return p;
    Float q = Float(numerator(q_)) / Float(denominator(q_));
    return p + q * sqrt(Float(3));
  }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }
  friend std::ostream &operator<<(std::ostream &os, const quad_real &x) {
    if (x.q_ == 0)
      return os << x.p_;
    if (x.p_ != 0)
      os << x.p_ << (x.q_ > 0 ? " + " : " - ") << abs(x.q_);
    else
      os << x.q_;
    return os << "*sqrt3";
  }

private:
  rational p_{0};
  rational q_{0};
};

} // namespace ksr
