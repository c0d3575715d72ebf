#pragma once

// Rays, orthogonality graph and contexts of a finite configuration in C^3,
// including the MUB seed and the closure that grows it to the full set.

#include "ksr/error.hpp"
#include "ksr/parallel.hpp"
#include "ksr/vectors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ksr {

struct ray {
  std::size_t id = 0;
  vec_c3 vec;
  bigint sq_norm = 0;
};

/// Sorted triple of pairwise orthogonal ray ids.
struct context {
  std::array<std::size_t, 3> ray_ids{};
  friend bool operator==(const context &, const context &) = default;
  friend auto operator<=>(const context &, const context &) = default;
};

using edge = std::pair<std::size_t, std::size_t>;

struct configuration {
  std::vector<ray> rays;
  std::vector<edge> edges; // i < j, sorted
  std::vector<context> contexts;

  std::size_t size() const noexcept { return rays.size(); }

  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(rays.size());
    for (auto [i, j] : edges) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
    for (auto &a : adj)
      std::sort(a.begin(), a.end());
    return adj;
  }

  friend bool operator==(const configuration &x, const configuration &y) {
    if (x.rays.size() != y.rays.size() || x.edges != y.edges || x.contexts != y.contexts)
      return false;
    for (std::size_t i = 0; i < x.rays.size(); ++i)
      if (x.rays[i].id != y.rays[i].id || x.rays[i].vec != y.rays[i].vec)
        return false;
    return true;
  }
};

/// Projective representative of v: divide by the first nonzero coordinate,
/// clear denominators, then remove the rational-integer content. The first
/// nonzero coordinate of the result is a positive integer.
inline vec_c3 canonicalize(const vec_c3 &v) {
  std::size_t lead = 0;
  while (lead < 3 && v[lead].is_zero())
    ++lead;
  if (lead == 3)
    throw zero_vector();

  eis_rational inv = eis_rational(v[lead]).inverse();
  std::array<eis_rational, 3> q;
  bigint l = 1;
  for (std::size_t i = 0; i < 3; ++i) {
    q[i] = eis_rational(v[i]) * inv;
    l = lcm(l, q[i].den());
  }
  vec_c3 w;
  bigint g = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    w[i] = q[i].num();
    w[i] *= bigint(l / q[i].den());
    g = gcd(g, gcd(w[i].a(), w[i].b()));
  }
  for (auto &z : w.c)
    z = eisenstein(z.a() / g, z.b() / g);
  return w;
}

/// The computational basis and the three w-phase bases of C^3, canonicalized.
inline std::array<std::array<vec_c3, 3>, 4> mub_bases() {
  const eisenstein o = 1, z = 0, w = eisenstein::omega(), w2 = eisenstein::omega2();
  std::array<std::array<vec_c3, 3>, 4> b{{
      {{{{o, z, z}}, {{z, o, z}}, {{z, z, o}}}},
      {{{{o, o, o}}, {{o, w, w2}}, {{o, w2, w}}}},
      {{{{o, o, w}}, {{o, w, o}}, {{w, o, o}}}},
      {{{{o, o, w2}}, {{o, w2, o}}, {{w2, o, o}}}},
  }};
  for (auto &basis : b)
    for (auto &v : basis)
      v = canonicalize(v);
  return b;
}

inline std::vector<vec_c3> mub_seed() {
  std::vector<vec_c3> seed;
  for (auto &basis : mub_bases())
    seed.insert(seed.end(), basis.begin(), basis.end());
  return seed;
}

/// Orthogonal pairs by exhaustive scan, in (i, j) order.
inline std::vector<edge> orthogonality_edges(std::span<const ray> rays, unsigned threads = 1) {
  const std::size_t n = rays.size();
  std::vector<std::vector<std::size_t>> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      if (hermitian_inner(rays[i].vec, rays[j].vec).is_zero())
        rows[i].push_back(j);
  });
  std::vector<edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : rows[i])
      edges.emplace_back(i, j);
  return edges;
}

/// All triangles of the graph. With `strict`, also checks that every maximal
/// clique is a triangle: no triangle has a common fourth neighbour and every
/// edge lies in some triangle.
inline std::vector<context> build_contexts(std::size_t n, std::span<const edge> edges,
                                           bool strict = true) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [i, j] : edges) {
    if (i >= n || j >= n || i == j)
      throw error("build_contexts: bad edge");
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto &a : adj)
    std::sort(a.begin(), a.end());
  auto adjacent = [&](std::size_t i, std::size_t j) {
    return std::binary_search(adj[i].begin(), adj[i].end(), j);
  };

  std::vector<context> out;
  std::vector<std::size_t> in_triangle(edges.size(), 0);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [i, j] = edges[e];
    std::vector<std::size_t> common;
    std::set_intersection(adj[i].begin(), adj[i].end(), adj[j].begin(), adj[j].end(),
                          std::back_inserter(common));
    in_triangle[e] = common.size();
    for (auto k : common)
      if (k > j)
        out.push_back({{i, j, k}});
  }
  std::sort(out.begin(), out.end());

  if (strict) {
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (in_triangle[e] == 0)
        throw non_triangle_clique("edge (" + std::to_string(edges[e].first) + "," +
                                  std::to_string(edges[e].second) +
                                  ") is a maximal clique of size 2");
    for (const auto &c : out) {
      auto [i, j, k] = c.ray_ids;
      for (auto m : adj[i])
        if (m != j && m != k && adjacent(m, j) && adjacent(m, k))
          throw non_triangle_clique("context (" + std::to_string(i) + "," + std::to_string(j) +
                                    "," + std::to_string(k) + ") extends to a 4-clique");
    }
  }
  return out;
}

/// Assigns ids in the given order, scans edges and enumerates contexts.
inline configuration make_configuration(std::span<const vec_c3> vecs, bool strict = true,
                                        unsigned threads = 1) {
  configuration cfg;
  cfg.rays.reserve(vecs.size());
  for (std::size_t i = 0; i < vecs.size(); ++i)
    cfg.rays.push_back({i, vecs[i], sq_norm(vecs[i])});
  cfg.edges = orthogonality_edges(cfg.rays, threads);
  cfg.contexts = build_contexts(cfg.size(), cfg.edges, strict);
  return cfg;
}

/// Induced sub-configuration on `ids` (renumbered densely in the given order).
/// Keeps the edges among the chosen rays and the contexts fully inside them;
/// no maximal-clique check.
inline configuration sub_configuration(const configuration &cfg, std::span<const std::size_t> ids) {
  std::vector<std::size_t> remap(cfg.size(), cfg.size());
  configuration sub;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    remap[ids[k]] = k;
    sub.rays.push_back({k, cfg.rays[ids[k]].vec, cfg.rays[ids[k]].sq_norm});
  }
  auto inside = [&](std::size_t i) { return remap[i] != cfg.size(); };
  for (auto [i, j] : cfg.edges)
    if (inside(i) && inside(j))
      sub.edges.emplace_back(std::min(remap[i], remap[j]), std::max(remap[i], remap[j]));
  std::sort(sub.edges.begin(), sub.edges.end());
  for (const auto &c : cfg.contexts) {
    auto [i, j, k] = c.ray_ids;
    if (inside(i) && inside(j) && inside(k)) {
      context n{{remap[i], remap[j], remap[k]}};
      std::sort(n.ray_ids.begin(), n.ray_ids.end());
      sub.contexts.push_back(n);
    }
  }
  std::sort(sub.contexts.begin(), sub.contexts.end());
  return sub;
}

struct closure_options {
  /// Conjugate cross products of arbitrary pairs are kept only when their
  /// canonical squared norm is at most this bound; nullopt keeps all.
  std::optional<bigint> generator_norm_bound = bigint(3);
  /// Complete every orthogonal pair to its context (no norm bound).
  bool complete_contexts = true;
  std::size_t cap = 10000;
  bool strict = true;
  unsigned threads = 1;
};

/// Grows the seed to a fixed point of two rules:
///   generate: conj_cross(u, v) for non-parallel u, v, subject to the norm bound;
///   complete: conj_cross(u, v) for orthogonal u, v.
/// The result is sorted by (squared norm, coefficients) and ids follow that order.
inline configuration closure_generate(std::span<const vec_c3> seed,
                                      const closure_options &opt = {}) {
  if (seed.empty())
    throw error("closure_generate: empty seed");
  std::vector<vec_c3> rays;
  std::set<vec_c3> known;
  auto insert = [&](const vec_c3 &v) {
    if (known.insert(v).second) {
      rays.push_back(v);
      if (rays.size() > opt.cap)
        throw divergence_guard(opt.cap);
      return true;
    }
    return false;
  };
  for (const auto &v : seed)
    insert(canonicalize(v));

  // Semi-naive: each sweep only visits pairs touching rays added since the
  // previous sweep of the same rule.
  std::size_t gen_done = 0, comp_done = 0;
  for (bool grew = true; grew;) {
    grew = false;
    while (gen_done < rays.size()) {
      const std::size_t n = rays.size();
      for (std::size_t j = gen_done; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) {
          if (is_parallel(rays[i], rays[j]))
            continue;
          vec_c3 w = canonicalize(conj_cross(rays[i], rays[j]));
          if (opt.generator_norm_bound && sq_norm(w) > *opt.generator_norm_bound)
            continue;
          grew |= insert(w);
        }
      gen_done = n;
    }
    if (!opt.complete_contexts)
      break;
    while (comp_done < rays.size()) {
      const std::size_t n = rays.size();
      for (std::size_t j = comp_done; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i)
          if (hermitian_inner(rays[i], rays[j]).is_zero())
            grew |= insert(canonicalize(conj_cross(rays[i], rays[j])));
      comp_done = n;
    }
  }

  std::vector<std::pair<bigint, vec_c3>> keyed;
  keyed.reserve(rays.size());
  for (auto &v : rays)
    keyed.emplace_back(sq_norm(v), v);
  std::sort(keyed.begin(), keyed.end());
  std::vector<vec_c3> sorted;
  sorted.reserve(keyed.size());
  for (auto &kv : keyed)
    sorted.push_back(std::move(kv.second));
  return make_configuration(sorted, opt.strict, opt.threads);
}

inline configuration closure_generate(std::initializer_list<vec_c3> seed,
                                      const closure_options &opt = {}) {
  return closure_generate(std::span<const vec_c3>(seed.begin(), seed.size()), opt);
}

// ---------------------------------------------------------------------------
// Ray files: one ray per line, three coordinates "a,b" (a + b*w), '#' comments.

struct ingest_result {
  configuration cfg;
  std::vector<std::string> warnings;
};

namespace detail {

inline bigint parse_int(std::string_view s, std::size_t line) {
  if (s.empty())
    throw parse_error(line, "empty integer");
  std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (k == s.size())
    throw parse_error(line, "bad integer '" + std::string(s) + "'");
  for (std::size_t i = k; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9')
      throw parse_error(line, "bad integer '" + std::string(s) + "'");
  return bigint(std::string(s[0] == '+' ? s.substr(1) : s));
}

inline eisenstein parse_coord(std::string_view tok, std::size_t line) {
  auto comma = tok.find(',');
  if (comma == std::string_view::npos || tok.find(',', comma + 1) != std::string_view::npos)
    throw parse_error(line, "coordinate '" + std::string(tok) + "' is not of the form a,b");
  return {parse_int(tok.substr(0, comma), line), parse_int(tok.substr(comma + 1), line)};
}

} // namespace detail

/// Coordinates outside {0, +-1, +-2} x {1, w, w^2}; one message per ray.
inline std::vector<std::string> coefficient_warnings(const configuration &cfg) {
  std::vector<std::string> out;
  for (const auto &r : cfg.rays)
    for (const auto &z : r.vec.c)
      if (!is_small_unit_multiple(z, 2)) {
        std::ostringstream os;
        os << "ray " << r.id << " (" << r.vec << ") has coordinate " << z
           << " outside the {0,+-1,+-2}x{1,w,w^2} alphabet";
        out.push_back(os.str());
        break;
      }
  return out;
}

/// Parses a ray file; rays keep file order and are canonicalized.
inline ingest_result ingest_rays(std::string_view text, bool strict = true, unsigned threads = 1) {
  std::vector<vec_c3> vecs;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;)
      toks.push_back(t);
    if (toks.empty())
      continue;
    if (toks.size() != 3)
      throw parse_error(line_no, "expected 3 coordinates, got " + std::to_string(toks.size()));
    vec_c3 v;
    for (std::size_t i = 0; i < 3; ++i)
      v[i] = detail::parse_coord(toks[i], line_no);
    if (v.is_zero())
      throw parse_error(line_no, "zero vector");
    vec_c3 c = canonicalize(v);
    for (std::size_t k = 0; k < vecs.size(); ++k)
      if (vecs[k] == c)
        throw duplicate_ray(line_no, k);
    vecs.push_back(c);
  }
  ingest_result res{make_configuration(vecs, strict, threads), {}};
  res.warnings = coefficient_warnings(res.cfg);
  return res;
}

inline std::string export_rays(const configuration &cfg) {
  std::ostringstream os;
  os << "# rays=" << cfg.size() << " edges=" << cfg.edges.size()
     << " contexts=" << cfg.contexts.size() << '\n';
  for (const auto &r : cfg.rays)
    os << r.vec << '\n';
  return os.str();
}

inline std::string format_edges(const configuration &cfg) {
  std::ostringstream os;
  os << "# edges " << cfg.edges.size() << '\n';
  for (auto [i, j] : cfg.edges)
    os << i << ' ' << j << '\n';
  return os.str();
}

inline std::string format_contexts(const configuration &cfg) {
  std::ostringstream os;
  os << "# contexts " << cfg.contexts.size() << '\n';
  for (const auto &c : cfg.contexts)
    os << c.ray_ids[0] << ' ' << c.ray_ids[1] << ' ' << c.ray_ids[2] << '\n';
  return os.str();
}

} // namespace ksr
