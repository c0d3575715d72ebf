#pragma once

// Vectors in C^3 over Z[w], their realifications in R^6, and the identities
// relating the two inner products.

#include "ksr/eisenstein.hpp"
#include "ksr/error.hpp"
#include "ksr/quad_real.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <utility>
#include <vector>

namespace ksr {

struct vec_c3 {
  std::array<eisenstein, 3> c{};

  eisenstein &operator[](std::size_t i) { return c[i]; }
  const eisenstein &operator[](std::size_t i) const { return c[i]; }
  bool is_zero() const { return c[0].is_zero() && c[1].is_zero() && c[2].is_zero(); }

  friend bool operator==(const vec_c3 &, const vec_c3 &) = default;
  friend auto operator<=>(const vec_c3 &, const vec_c3 &) = default;
  friend std::ostream &operator<<(std::ostream &os, const vec_c3 &v) {
    return os << v.c[0] << ' ' << v.c[1] << ' ' << v.c[2];
  }
};

/// Coordinates ordered (Re z1, Re z2, Re z3, Im z1, Im z2, Im z3).
struct vec_r6 {
  std::array<quad_real, 6> x{};

  quad_real &operator[](std::size_t i) { return x[i]; }
  const quad_real &operator[](std::size_t i) const { return x[i]; }
  friend bool operator==(const vec_r6 &, const vec_r6 &) = default;
};

/// (Re z, Im z) for z = a + b w + c w^2.
inline std::pair<quad_real, quad_real> re_im(const bigint &a, const bigint &b, const bigint &c) {
  rational re = rational(a) - rational(b + c, 2);
  rational im = rational(b - c, 2);
  return {quad_real(re), quad_real(0, im)};
}

inline std::pair<quad_real, quad_real> re_im(const eisenstein &z) {
  return re_im(z.a(), z.b(), 0);
}

/// sum_i conj(u_i) v_i, conjugate-linear in the first argument.
inline eisenstein hermitian_inner(const vec_c3 &u, const vec_c3 &v) {
  eisenstein s;
  for (std::size_t i = 0; i < 3; ++i)
    s += u[i].conj() * v[i];
  return s;
}

/// Hermitian squared norm; always a nonnegative rational integer.
inline bigint sq_norm(const vec_c3 &u) { return hermitian_inner(u, u).a(); }

inline vec_c3 cross(const vec_c3 &u, const vec_c3 &v) {
  return {{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]}};
}

inline bool is_parallel(const vec_c3 &u, const vec_c3 &v) { return cross(u, v).is_zero(); }

/// conj(u x v): Hermitian-orthogonal to both u and v.
inline vec_c3 conj_cross(const vec_c3 &u, const vec_c3 &v) {
  vec_c3 w = cross(u, v);
  if (w.is_zero())
    throw parallel_input();
  for (auto &z : w.c)
    z = z.conj();
  return w;
}

inline vec_r6 phi0(const vec_c3 &u) {
  vec_r6 r;
  for (std::size_t i = 0; i < 3; ++i) {
    auto [re, im] = re_im(u[i]);
    r[i] = std::move(re);
    r[i + 3] = std::move(im);
  }
  return r;
}

inline quad_real dot6(const vec_r6 &x, const vec_r6 &y) {
  quad_real s;
  for (std::size_t i = 0; i < 6; ++i)
    s += x[i] * y[i];
  return s;
}

/// A permutation of the six real coordinates, stored 0-based. Applying it maps
/// x to y with y[i] = x[image[i]].
struct permutation6 {
  std::array<std::size_t, 6> image{0, 1, 2, 3, 4, 5};

  static permutation6 identity() { return {}; }

  /// Builds sigma from 1-based cycles, e.g. {{2, 4, 5, 3}} for (2 4 5 3).
  static permutation6 from_cycles(std::initializer_list<std::initializer_list<std::size_t>> cycles) {
    permutation6 p;
    for (auto cyc : cycles) {
      std::vector<std::size_t> c(cyc);
      for (std::size_t k = 0; k < c.size(); ++k)
        p.image[c[k] - 1] = c[(k + 1) % c.size()] - 1;
    }
    return p;
  }

  bool is_bijection() const {
    std::array<bool, 6> seen{};
    for (auto i : image) {
      if (i >= 6 || seen[i])
        return false;
      seen[i] = true;
    }
    return true;
  }

  vec_r6 apply(const vec_r6 &x) const {
    vec_r6 y;
    for (std::size_t i = 0; i < 6; ++i)
      y[i] = x[image[i]];
    return y;
  }

  friend bool operator==(const permutation6 &, const permutation6 &) = default;
};

inline bool permutation_equivalent(const vec_r6 &x, const vec_r6 &y, const permutation6 &sigma) {
  if (!sigma.is_bijection())
    throw error("permutation_equivalent: sigma is not a bijection");
  return sigma.apply(x) == y;
}

/// The 3! * 2^3 = 48 coordinate permutations that reorder the complex entries
/// and optionally swap the real and imaginary part of each.
inline std::vector<permutation6> realification_symmetries() {
  std::vector<permutation6> out;
  std::array<std::size_t, 3> order{0, 1, 2};
  do {
    for (unsigned swaps = 0; swaps < 8; ++swaps) {
      permutation6 p;
      for (std::size_t slot = 0; slot < 3; ++slot) {
        std::size_t src = order[slot];
        bool sw = (swaps >> slot) & 1u;
        p.image[slot] = sw ? src + 3 : src;
        p.image[slot + 3] = sw ? src : src + 3;
      }
      out.push_back(p);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

} // namespace ksr
