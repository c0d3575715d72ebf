#pragma once

// Phase-adjusted realification: per-ray phases theta_k = n_k pi / K, the exact
// test for spurious orthogonality, phase searches and faithfulness checks.
//
// For rays u, v with c = <u, v> the rotated images satisfy
//   Phi0(e^{i t_u} u) . Phi0(e^{i t_v} v) = Re(e^{i (t_v - t_u)} c).
// With gcd(K, 6) = 1 the only K-th root of unity in Q(w) is 1, so for c != 0
// the right-hand side vanishes iff c is purely imaginary and
// n_v - n_u = 0 (mod K).

#include "ksr/configuration.hpp"
#include "ksr/error.hpp"
#include "ksr/parallel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ksr {

/// 100 significant decimal digits.
using hp_float =
    boost::multiprecision::number<boost::multiprecision::cpp_dec_float<100>,
                                  boost::multiprecision::et_off>;
/// 200 significant decimal digits.
using xhp_float =
    boost::multiprecision::number<boost::multiprecision::cpp_dec_float<200>,
                                  boost::multiprecision::et_off>;

inline constexpr long long default_k = 1009;

inline bool valid_k(long long k) { return k > 0 && std::gcd(k, 6LL) == 1; }

inline void require_valid_k(long long k) {
  if (!valid_k(k))
    throw invalid_k(k);
}

/// theta_k = n[k] * pi / K with every n[k] reduced into [0, 2K).
struct phase_assignment {
  long long k = default_k;
  std::vector<long long> n;

  static long long reduce(long long value, long long k) {
    long long m = 2 * k;
    return ((value % m) + m) % m;
  }

  friend bool operator==(const phase_assignment &, const phase_assignment &) = default;
};

struct faithfulness_report {
  std::vector<edge> spurious; // non-orthogonal in C^3, orthogonal images
  std::vector<edge> missing;  // orthogonal in C^3, non-orthogonal images
  std::size_t pairs_checked = 0;
  /// min |R_i . R_j| / (|R_i| |R_j|) over non-orthogonal pairs (numeric route).
  double min_normalized_dot = 0;

  bool faithful() const { return spurious.empty() && missing.empty(); }
};

// ---------------------------------------------------------------------------
// Forbidden phases

/// arg(c) in (-pi, pi] for c = a + b w.
inline double arg(const eisenstein &c) {
  double re = c.a().convert_to<double>() - c.b().convert_to<double>() / 2.0;
  double im = c.b().convert_to<double>() * std::numbers::sqrt3 / 2.0;
  return std::atan2(im, re);
}

inline double wrap_angle(double t) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  t = std::fmod(t, two_pi);
  return t < 0 ? t + two_pi : t;
}

/// theta_l values that make the images of a pair with inner product c
/// orthogonal, given theta_k: theta_k - arg(c) + q pi / 2 for q in {1, 3}.
struct forbidden_phases {
  eisenstein c;
  double theta_k = 0;
  std::array<int, 2> quarter_turns{1, 3};
  std::array<double, 2> values{};
};

inline forbidden_phases forbidden_phase_pair(const eisenstein &c, double theta_k) {
  if (c.is_zero())
    throw zero_inner_product();
  forbidden_phases f{c, theta_k, {1, 3}, {}};
  const double base = theta_k - arg(c);
  f.values[0] = wrap_angle(base + std::numbers::pi / 2);
  f.values[1] = wrap_angle(base + 3 * std::numbers::pi / 2);
  return f;
}

/// Circular distance between two angles.
inline double angular_distance(double x, double y) {
  double d = std::fabs(wrap_angle(x) - wrap_angle(y));
  return std::min(d, 2.0 * std::numbers::pi - d);
}

/// Inductive construction: theta_0 = 0, each later phase taken from the
/// circle minus an eps-neighbourhood of its forbidden set (0 if allowed,
/// else a uniform draw).
inline std::vector<double> greedy_continuous_phases(const configuration &cfg,
                                                    std::uint64_t seed, double eps = 1e-6) {
  const std::size_t n = cfg.size();
  std::vector<double> theta(n, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> circle(0.0, 2.0 * std::numbers::pi);
  std::vector<double> forbidden;
  for (std::size_t m = 1; m < n; ++m) {
    forbidden.clear();
    for (std::size_t k = 0; k < m; ++k) {
      eisenstein c = hermitian_inner(cfg.rays[k].vec, cfg.rays[m].vec);
      if (c.is_zero())
        continue;
      auto f = forbidden_phase_pair(c, theta[k]);
      forbidden.push_back(f.values[0]);
      forbidden.push_back(f.values[1]);
    }
    // theta = 0 is kept when allowed; otherwise sample. At most 2m points of
    // width 2 eps are excluded; eps halves if sampling keeps failing.
    double margin = eps;
    for (int attempt = 0;; ++attempt) {
      double t = attempt == 0 ? 0.0 : circle(rng);
      bool ok = true;
      for (double f : forbidden)
        if (angular_distance(t, f) <= margin) {
          ok = false;
          break;
        }
      if (ok) {
        theta[m] = t;
        break;
      }
      if (attempt % 1000 == 999)
        margin /= 2;
    }
  }
  return theta;
}

struct continuous_check {
  double min_nonorthogonal = 0; // normalized |dot| over non-orthogonal pairs
  double max_orthogonal = 0;    // normalized |dot| over orthogonal pairs
};

/// Double-precision evaluation of all pairwise normalized image dots.
inline continuous_check check_continuous_phases(const configuration &cfg,
                                                const std::vector<double> &theta) {
  const std::size_t n = cfg.size();
  continuous_check out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      eisenstein c = hermitian_inner(cfg.rays[i].vec, cfg.rays[j].vec);
      double re = c.a().convert_to<double>() - c.b().convert_to<double>() / 2.0;
      double im = c.b().convert_to<double>() * std::numbers::sqrt3 / 2.0;
      double d = theta[j] - theta[i];
      double dot = std::cos(d) * re - std::sin(d) * im;
      double scale = std::sqrt(cfg.rays[i].sq_norm.convert_to<double>() *
                               cfg.rays[j].sq_norm.convert_to<double>());
      double v = std::fabs(dot) / scale;
      if (c.is_zero())
        out.max_orthogonal = std::max(out.max_orthogonal, v);
      else
        out.min_nonorthogonal = std::min(out.min_nonorthogonal, v);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Exact and numeric zero tests

/// True iff Re(e^{i dn pi / K} c) = 0 exactly.
inline bool is_spurious_exact(const eisenstein &c, long long dn, long long k) {
  require_valid_k(k);
  if (c.is_zero())
    throw zero_inner_product();
  return c.is_imaginary() && dn % k == 0;
}

template <class Float> Float pi_over(long long k) {
  return boost::math::constants::pi<Float>() / Float(k);
}

/// (cos, sin) of n pi / K; exact at multiples of pi.
template <class Float> std::pair<Float, Float> unit_phase(long long n, long long k) {
  long long r = phase_assignment::reduce(n, k);
  if (r == 0)
    return {Float(1), Float(0)};
  if (r == k)
    return {Float(-1), Float(0)};
  Float t = pi_over<Float>(k) * Float(r);
  return {cos(t), sin(t)};
}

/// Re(e^{i dn pi / K} c) / |c| evaluated in Float.
template <class Float> Float rotated_real_part(const eisenstein &c, long long dn, long long k) {
  auto [re, im] = re_im(c);
  auto [co, si] = unit_phase<Float>(dn, k);
  Float value = co * re.to<Float>() - si * im.to<Float>();
  return value / sqrt(Float(c.norm()));
}

/// Numeric verdict: |value| below 1e-50 counts as zero.
inline bool is_spurious_numeric(const eisenstein &c, long long dn, long long k) {
  return abs(rotated_real_part<xhp_float>(c, dn, k)) < xhp_float("1e-50");
}

// ---------------------------------------------------------------------------
// Rational phase search

enum class phase_strategy { distinct, backtracking, greedy_random };

inline std::string_view to_string(phase_strategy s) {
  switch (s) {
  case phase_strategy::distinct:
    return "distinct";
  case phase_strategy::backtracking:
    return "backtracking";
  case phase_strategy::greedy_random:
    return "greedy-random";
  }
  return "?";
}

inline phase_strategy parse_strategy(std::string_view s) {
  if (s == "distinct")
    return phase_strategy::distinct;
  if (s == "backtracking")
    return phase_strategy::backtracking;
  if (s == "greedy-random")
    return phase_strategy::greedy_random;
  throw error("unknown strategy '" + std::string(s) + "'");
}

/// Pairs whose inner product is nonzero and purely imaginary: the only pairs
/// a rational phase choice can make spurious.
inline std::vector<edge> imaginary_pairs(const configuration &cfg, unsigned threads = 1) {
  const std::size_t n = cfg.size();
  std::vector<std::vector<std::size_t>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      eisenstein c = hermitian_inner(cfg.rays[i].vec, cfg.rays[j].vec);
      if (!c.is_zero() && c.is_imaginary())
        rows[i].push_back(j);
    }
  });
  std::vector<edge> out;
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : rows[i])
      out.emplace_back(i, j);
  return out;
}

/// Exact check of every non-orthogonal pair; returns the spurious ones.
inline std::vector<edge> exact_spurious_pairs(const configuration &cfg, const phase_assignment &pa,
                                              unsigned threads = 1) {
  require_valid_k(pa.k);
  if (pa.n.size() != cfg.size())
    throw size_mismatch("phase assignment covers " + std::to_string(pa.n.size()) + " of " +
                        std::to_string(cfg.size()) + " rays");
  const std::size_t n = cfg.size();
  std::vector<std::vector<std::size_t>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      eisenstein c = hermitian_inner(cfg.rays[i].vec, cfg.rays[j].vec);
      if (!c.is_zero() && is_spurious_exact(c, pa.n[j] - pa.n[i], pa.k))
        rows[i].push_back(j);
    }
  });
  std::vector<edge> out;
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : rows[i])
      out.emplace_back(i, j);
  return out;
}

struct search_options {
  std::uint64_t seed = 0;
  std::size_t node_limit = 50'000'000; // backtracking only
  unsigned threads = 1;
};

struct search_stats {
  std::size_t nodes = 0;
};

inline phase_assignment rational_phase_search(const configuration &cfg, long long k,
                                              phase_strategy strategy,
                                              const search_options &opt = {},
                                              search_stats *stats = nullptr) {
  require_valid_k(k);
  const std::size_t n = cfg.size();
  phase_assignment pa{k, std::vector<long long>(n, 0)};
  auto exhausted = [&] { return search_exhausted(k, std::string(to_string(strategy))); };

  // conflicts[m]: earlier rays whose residue mod K must differ from ray m's
  std::vector<std::vector<std::size_t>> conflicts(n);
  for (auto [i, j] : imaginary_pairs(cfg, opt.threads))
    conflicts[j].push_back(i);

  std::size_t nodes = 0;
  switch (strategy) {
  case phase_strategy::distinct:
    for (std::size_t m = 0; m < n; ++m)
      pa.n[m] = phase_assignment::reduce(static_cast<long long>(m), k);
    nodes = n;
    break;

  case phase_strategy::backtracking: {
    // residue of each ray mod K; next candidate to try on backtrack
    std::vector<long long> next(n, 0);
    std::size_t m = 0;
    while (m < n) {
      if (++nodes > opt.node_limit)
        throw exhausted();
      long long r = next[m];
      for (; r < k; ++r) {
        bool clash = false;
        for (auto j : conflicts[m])
          if (pa.n[j] == r) {
            clash = true;
            break;
          }
        if (!clash)
          break;
      }
      if (r == k) {
        if (m == 0)
          throw exhausted();
        next[m] = 0;
        --m;
        continue;
      }
      pa.n[m] = r;
      next[m] = r + 1;
      ++m;
    }
    break;
  }

  case phase_strategy::greedy_random: {
    std::mt19937_64 rng(opt.seed);
    std::vector<char> used(static_cast<std::size_t>(k));
    std::vector<long long> allowed;
    for (std::size_t m = 0; m < n; ++m) {
      ++nodes;
      std::fill(used.begin(), used.end(), 0);
      for (auto j : conflicts[m])
        used[static_cast<std::size_t>(pa.n[j] % k)] = 1;
      allowed.clear();
      for (long long r = 0; r < k; ++r)
        if (!used[static_cast<std::size_t>(r)])
          allowed.push_back(r);
      if (allowed.empty())
        throw exhausted();
      std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
      std::uniform_int_distribution<int> half(0, 1);
      pa.n[m] = allowed[pick(rng)] + (half(rng) ? k : 0);
    }
    break;
  }
  }
  if (stats)
    stats->nodes = nodes;
  if (!exact_spurious_pairs(cfg, pa, opt.threads).empty())
    throw exhausted();
  return pa;
}

/// Smallest valid K in [1, k_max] for which the strategy succeeds, or 0.
inline long long smallest_working_k(const configuration &cfg, phase_strategy strategy,
                                    long long k_max, const search_options &opt = {}) {
  for (long long k = 1; k <= k_max; ++k) {
    if (!valid_k(k))
      continue;
    try {
      rational_phase_search(cfg, k, strategy, opt);
      return k;
    } catch (const search_exhausted &) {
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Numeric images and faithfulness

/// Phi0(e^{i n pi / K} psi) in Float, unnormalized.
template <class Float>
std::array<Float, 6> phase_adjusted_image(const vec_c3 &v, long long n, long long k) {
  auto [co, si] = unit_phase<Float>(n, k);
  std::array<Float, 6> out;
  for (std::size_t i = 0; i < 3; ++i) {
    auto [re, im] = re_im(v[i]);
    Float x = re.to<Float>();
    Float y = im.to<Float>();
    out[i] = x * co - y * si;
    out[i + 3] = x * si + y * co;
  }
  return out;
}

struct verify_options {
  unsigned threads = 1;
  /// Numeric cross-check of every pair at hp_float (100 digits).
  bool numeric_cross_check = true;
};

/// Classifies all unordered pairs. The exact route uses the algebraic
/// criterion; the numeric route evaluates the rotated images' dot products
/// directly and must agree pair by pair.
inline faithfulness_report verify_faithful(const configuration &cfg, const phase_assignment &pa,
                                           const verify_options &opt = {}) {
  require_valid_k(pa.k);
  const std::size_t n = cfg.size();
  if (pa.n.size() != n)
    throw size_mismatch("phase assignment covers " + std::to_string(pa.n.size()) + " of " +
                        std::to_string(n) + " rays");

  std::vector<std::array<hp_float, 6>> images;
  std::vector<hp_float> lengths;
  if (opt.numeric_cross_check) {
    images.resize(n);
    lengths.resize(n);
    parallel_for(n, opt.threads, [&](std::size_t i) {
      images[i] = phase_adjusted_image<hp_float>(cfg.rays[i].vec, pa.n[i], pa.k);
      lengths[i] = sqrt(hp_float(cfg.rays[i].sq_norm));
    });
  }
  const hp_float zero_threshold("1e-50");

  struct row {
    std::vector<std::size_t> spurious, missing;
    double min_dot = std::numeric_limits<double>::infinity();
    std::string disagreement;
  };
  std::vector<row> rows(n);
  parallel_for(n, opt.threads, [&](std::size_t i) {
    row &r = rows[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      eisenstein c = hermitian_inner(cfg.rays[i].vec, cfg.rays[j].vec);
      // Re(e^{i dt} * 0) = 0 for every phase: orthogonality is never lost
      bool exact_zero = c.is_zero() || is_spurious_exact(c, pa.n[j] - pa.n[i], pa.k);
      if (!c.is_zero() && exact_zero)
        r.spurious.push_back(j);
      if (!opt.numeric_cross_check)
        continue;
      hp_float dot = 0;
      for (std::size_t t = 0; t < 6; ++t)
        dot += images[i][t] * images[j][t];
      hp_float normalized = abs(dot) / (lengths[i] * lengths[j]);
      bool numeric_zero = normalized < zero_threshold;
      if (c.is_zero() && !numeric_zero)
        r.missing.push_back(j);
      if (numeric_zero != exact_zero && r.disagreement.empty())
        r.disagreement = "pair (" + std::to_string(i) + "," + std::to_string(j) +
                         "): exact and numeric zero tests disagree";
      if (!c.is_zero())
        r.min_dot = std::min(r.min_dot, normalized.convert_to<double>());
    }
  });

  faithfulness_report rep;
  rep.pairs_checked = n * (n - 1) / 2;
  rep.min_normalized_dot = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].disagreement.empty())
      throw precision_disagreement(rows[i].disagreement);
    for (auto j : rows[i].spurious)
      rep.spurious.emplace_back(i, j);
    for (auto j : rows[i].missing)
      rep.missing.emplace_back(i, j);
    rep.min_normalized_dot = std::min(rep.min_normalized_dot, rows[i].min_dot);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Export and phase files

/// Decimal string with `digits` significant digits, trailing zeros removed.
inline std::string format_decimal(const hp_float &x, int digits) {
  if (x.is_zero())
    return "0";
  return x.str(digits);
}

/// Phase-adjusted images as decimal 6-tuples. Coordinates whose magnitude is
/// below 1e-80 are exact zeros (rotations of algebraic coordinates by
/// nontrivial K-th roots of unity cannot cancel exactly).
inline std::vector<std::array<std::string, 6>>
phase_apply_export(const configuration &cfg, const phase_assignment &pa, int precision = 20) {
  if (precision < 15 || precision > 90)
    throw error("export precision must lie in [15, 90]");
  if (pa.n.size() != cfg.size())
    throw size_mismatch("phase assignment does not cover the configuration");
  const hp_float tiny("1e-80");
  std::vector<std::array<std::string, 6>> out;
  out.reserve(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    auto img = phase_adjusted_image<hp_float>(cfg.rays[i].vec, pa.n[i], pa.k);
    std::array<std::string, 6> row;
    for (std::size_t t = 0; t < 6; ++t)
      row[t] = format_decimal(abs(img[t]) < tiny ? hp_float(0) : img[t], precision);
    out.push_back(std::move(row));
  }
  return out;
}

inline std::string format_vectors(const std::vector<std::array<std::string, 6>> &rows,
                                  int precision) {
  std::ostringstream os;
  os << "# precision=" << precision << '\n';
  for (const auto &r : rows)
    os << r[0] << ' ' << r[1] << ' ' << r[2] << ' ' << r[3] << ' ' << r[4] << ' ' << r[5] << '\n';
  return os.str();
}

inline std::string format_phases(const phase_assignment &pa) {
  std::ostringstream os;
  os << "K " << pa.k << '\n';
  for (std::size_t i = 0; i < pa.n.size(); ++i)
    os << i << ' ' << pa.n[i] << '\n';
  return os.str();
}

inline phase_assignment parse_phases(std::string_view text, std::size_t ray_count) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  phase_assignment pa{0, {}};
  std::vector<char> seen(ray_count, 0);
  bool have_k = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first))
      continue;
    if (!have_k) {
      long long k = 0;
      if (first != "K" || !(ls >> k))
        throw parse_error(line_no, "expected header 'K <value>'");
      require_valid_k(k);
      pa.k = k;
      pa.n.assign(ray_count, 0);
      have_k = true;
      continue;
    }
    long long id = 0, value = 0;
    std::istringstream idstream(first);
    if (!(idstream >> id) || !(ls >> value))
      throw parse_error(line_no, "expected 'ray_id n_k'");
    if (id < 0 || static_cast<std::size_t>(id) >= ray_count)
      throw parse_error(line_no, "ray id out of range");
    if (seen[static_cast<std::size_t>(id)])
      throw parse_error(line_no, "ray id repeated");
    seen[static_cast<std::size_t>(id)] = 1;
    pa.n[static_cast<std::size_t>(id)] = phase_assignment::reduce(value, pa.k);
  }
  if (!have_k)
    throw parse_error(line_no, "missing 'K <value>' header");
  for (std::size_t i = 0; i < ray_count; ++i)
    if (!seen[i])
      throw parse_error(line_no, "no phase for ray " + std::to_string(i));
  return pa;
}

} // namespace ksr
