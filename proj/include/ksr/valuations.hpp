#pragma once

// Two-valued states on a configuration: admissibility checks, a propagation
// and backtracking engine, KS-colourability, and certified maximization of
// the number of contexts that keep the value 1.

#include "ksr/configuration.hpp"
#include "ksr/error.hpp"
#include "ksr/parallel.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace ksr {

/// complex_maximal: every context carries exactly one 1.
/// real_embedded: no orthogonal pair carries two 1s; contexts carry at most one.
enum class model_kind { complex_maximal, real_embedded };

inline std::string_view to_string(model_kind m) {
  return m == model_kind::complex_maximal ? "COMPLEX_MAXIMAL" : "REAL_EMBEDDED";
}

struct valuation {
  std::vector<std::uint8_t> bits;

  static valuation zeros(std::size_t n) { return {std::vector<std::uint8_t>(n, 0)}; }
  std::size_t size() const noexcept { return bits.size(); }
  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i])
        out.push_back(i);
    return out;
  }
  friend bool operator==(const valuation &, const valuation &) = default;
};

struct violation {
  enum class kind { exclusivity, overfull_context, empty_context };
  kind what;
  std::size_t index; // edge index or context index

  friend bool operator==(const violation &, const violation &) = default;
};

inline std::vector<violation> check_valuation(const configuration &cfg, const valuation &val,
                                              model_kind model) {
  if (val.size() != cfg.size())
    throw size_mismatch("valuation has " + std::to_string(val.size()) + " entries for " +
                        std::to_string(cfg.size()) + " rays");
  std::vector<violation> out;
  for (std::size_t e = 0; e < cfg.edges.size(); ++e)
    if (val.bits[cfg.edges[e].first] && val.bits[cfg.edges[e].second])
      out.push_back({violation::kind::exclusivity, e});
  for (std::size_t c = 0; c < cfg.contexts.size(); ++c) {
    int sum = 0;
    for (auto r : cfg.contexts[c].ray_ids)
      sum += val.bits[r] ? 1 : 0;
    if (sum > 1)
      out.push_back({violation::kind::overfull_context, c});
    else if (sum == 0 && model == model_kind::complex_maximal)
      out.push_back({violation::kind::empty_context, c});
  }
  return out;
}

/// Contexts with exactly one 1.
inline std::size_t covered_contexts(const configuration &cfg, const valuation &val) {
  std::size_t n = 0;
  for (const auto &c : cfg.contexts) {
    int sum = 0;
    for (auto r : c.ray_ids)
      sum += val.bits[r] ? 1 : 0;
    n += sum == 1;
  }
  return n;
}

struct engine_stats {
  std::size_t nodes = 0;
  std::size_t propagations = 0;
  std::size_t conflicts = 0;
  friend bool operator==(const engine_stats &, const engine_stats &) = default;
};

/// Branching order: descending orthogonality degree, ties by ray id.
inline std::vector<std::size_t> branching_order(const configuration &cfg) {
  std::vector<std::size_t> degree(cfg.size(), 0);
  for (auto [i, j] : cfg.edges) {
    ++degree[i];
    ++degree[j];
  }
  std::vector<std::size_t> order(cfg.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return degree[x] > degree[y]; });
  return order;
}

/// Backtracking search over rays with unit propagation. Setting a ray to 1
/// zeroes all its orthogonal neighbours; in a context that must be covered,
/// two zeros force the third ray to 1 and three zeros are a conflict.
/// Branches try 1 before 0 in branching_order, so runs are reproducible.
class propagation_engine {
public:
  /// must_cover[c] marks contexts that need exactly one 1.
  propagation_engine(const configuration &cfg, std::vector<char> must_cover)
      : cfg_(cfg), adj_(cfg.adjacency()), ray_contexts_(cfg.size()),
        must_(std::move(must_cover)), order_(branching_order(cfg)) {
    if (must_.size() != cfg.contexts.size())
      throw size_mismatch("must_cover mask does not match the context count");
    for (std::size_t c = 0; c < cfg.contexts.size(); ++c)
      for (auto r : cfg.contexts[c].ray_ids)
        ray_contexts_[r].push_back(c);
  }

  struct result {
    std::optional<valuation> witness; // nullopt: unsatisfiable
    engine_stats stats;
  };

  result solve() {
    stats_ = {};
    found_.reset();
    if (search(initial()))
      return {found_, stats_};
    return {std::nullopt, stats_};
  }

  const std::vector<std::size_t> &order() const noexcept { return order_; }

private:
  struct state {
    std::vector<std::int8_t> val; // -1 unassigned
    std::vector<std::uint8_t> zeros, ones;
  };
  struct pending {
    std::size_t ray;
    std::int8_t value;
  };

  state initial() const {
    return {std::vector<std::int8_t>(cfg_.size(), -1),
            std::vector<std::uint8_t>(cfg_.contexts.size(), 0),
            std::vector<std::uint8_t>(cfg_.contexts.size(), 0)};
  }

  bool assign(state &s, std::size_t ray, std::int8_t value) {
    std::vector<pending> queue{{ray, value}};
    bool decision = true;
    while (!queue.empty()) {
      auto [r, v] = queue.back();
      queue.pop_back();
      if (s.val[r] == v)
        continue;
      if (s.val[r] != -1)
        return ++stats_.conflicts, false;
      s.val[r] = v;
      if (!decision)
        ++stats_.propagations;
      decision = false;
      if (v == 1) {
        for (auto c : ray_contexts_[r])
          if (++s.ones[c] > 1)
            return ++stats_.conflicts, false;
        for (auto nb : adj_[r])
          queue.push_back({nb, 0});
      } else {
        for (auto c : ray_contexts_[r]) {
          ++s.zeros[c];
          if (!must_[c] || s.ones[c] != 0)
            continue;
          if (s.zeros[c] == 3)
            return ++stats_.conflicts, false;
          if (s.zeros[c] == 2)
            for (auto t : cfg_.contexts[c].ray_ids)
              if (s.val[t] == -1)
                queue.push_back({t, 1});
        }
      }
    }
    return true;
  }

  bool search(state s) {
    ++stats_.nodes;
    auto it = std::find_if(order_.begin(), order_.end(),
                           [&](std::size_t r) { return s.val[r] == -1; });
    if (it == order_.end()) {
      valuation w = valuation::zeros(cfg_.size());
      for (std::size_t r = 0; r < cfg_.size(); ++r)
        w.bits[r] = s.val[r] == 1;
      found_ = std::move(w);
      return true;
    }
    for (std::int8_t v : {std::int8_t{1}, std::int8_t{0}}) {
      state t = s;
      if (assign(t, *it, v) && search(std::move(t)))
        return true;
    }
    return false;
  }

  const configuration &cfg_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::vector<std::size_t>> ray_contexts_;
  std::vector<char> must_;
  std::vector<std::size_t> order_;
  engine_stats stats_;
  std::optional<valuation> found_;
};

// ---------------------------------------------------------------------------
// KS colourability

/// Exhaustion record of an unsatisfiable search; replaying the same search
/// must reproduce it exactly.
struct exhaustion_certificate {
  std::vector<std::size_t> excluded_contexts; // contexts not required to be covered
  engine_stats stats;
};

struct colorability_result {
  std::optional<valuation> witness;
  exhaustion_certificate certificate; // meaningful when witness is empty
  bool colorable() const { return witness.has_value(); }
};

inline propagation_engine::result solve_with_excluded(const configuration &cfg,
                                                      std::span<const std::size_t> excluded) {
  std::vector<char> must(cfg.contexts.size(), 1);
  for (auto c : excluded)
    must.at(c) = 0;
  return propagation_engine(cfg, std::move(must)).solve();
}

inline colorability_result ks_colorable(const configuration &cfg) {
  if (cfg.contexts.empty())
    throw error("ks_colorable: configuration has no contexts");
  auto r = solve_with_excluded(cfg, {});
  colorability_result out;
  out.witness = std::move(r.witness);
  out.certificate.stats = r.stats;
  if (out.witness && !check_valuation(cfg, *out.witness, model_kind::complex_maximal).empty())
    throw error("ks_colorable: engine returned an inadmissible witness");
  return out;
}

/// Re-runs the search from scratch; true iff it is again unsatisfiable with
/// identical statistics.
inline bool replay(const configuration &cfg, const exhaustion_certificate &cert) {
  auto r = solve_with_excluded(cfg, cert.excluded_contexts);
  return !r.witness && r.stats == cert.stats;
}

// ---------------------------------------------------------------------------
// Maximum number of covered contexts

struct optimization_result {
  std::size_t best = 0;
  valuation witness;
  /// One entry per excluded-context set of size <= contexts - best - 1.
  std::vector<exhaustion_certificate> refutations;
  engine_stats bb_stats;
};

struct maximize_options {
  unsigned threads = 1;
  std::size_t max_refutations = 1'000'000;
};

namespace detail {

/// Branch and bound for the REAL_EMBEDDED maximum. The bound is
/// covered + live, where a live context has no 1 and an unassigned ray. When
/// the bound is exactly one above the incumbent every live context must be
/// covered, and the KS-style forcing rules switch on.
class covered_bnb {
public:
  explicit covered_bnb(const configuration &cfg)
      : cfg_(cfg), adj_(cfg.adjacency()), ray_contexts_(cfg.size()),
        order_(branching_order(cfg)), best_val_(valuation::zeros(cfg.size())) {
    for (std::size_t c = 0; c < cfg.contexts.size(); ++c)
      for (auto r : cfg.contexts[c].ray_ids)
        ray_contexts_[r].push_back(c);
  }

  void run() {
    state s{std::vector<std::int8_t>(cfg_.size(), -1),
            std::vector<std::uint8_t>(cfg_.contexts.size(), 0),
            std::vector<std::uint8_t>(cfg_.contexts.size(), 0)};
    best_ = covered_contexts(cfg_, best_val_);
    search(std::move(s));
  }

  std::size_t best() const { return best_; }
  const valuation &witness() const { return best_val_; }
  const engine_stats &stats() const { return stats_; }

private:
  struct state {
    std::vector<std::int8_t> val;
    std::vector<std::uint8_t> zeros, ones;
  };

  bool assign(state &s, std::size_t ray, std::int8_t value, bool tight) {
    std::vector<std::pair<std::size_t, std::int8_t>> queue{{ray, value}};
    while (!queue.empty()) {
      auto [r, v] = queue.back();
      queue.pop_back();
      if (s.val[r] == v)
        continue;
      if (s.val[r] != -1)
        return ++stats_.conflicts, false;
      s.val[r] = v;
      ++stats_.propagations;
      if (v == 1) {
        for (auto c : ray_contexts_[r])
          ++s.ones[c];
        for (auto nb : adj_[r])
          queue.push_back({nb, 0});
      } else {
        for (auto c : ray_contexts_[r]) {
          ++s.zeros[c];
          if (!tight || s.ones[c] != 0)
            continue;
          if (s.zeros[c] == 3)
            return ++stats_.conflicts, false;
          if (s.zeros[c] == 2)
            for (auto t : cfg_.contexts[c].ray_ids)
              if (s.val[t] == -1)
                queue.push_back({t, 1});
        }
      }
    }
    return true;
  }

  std::pair<std::size_t, std::size_t> covered_live(const state &s) const {
    std::size_t covered = 0, live = 0;
    for (std::size_t c = 0; c < cfg_.contexts.size(); ++c) {
      if (s.ones[c])
        ++covered;
      else if (s.zeros[c] < 3)
        ++live;
    }
    return {covered, live};
  }

  void search(state s) {
    ++stats_.nodes;
    auto [covered, live] = covered_live(s);
    if (covered + live <= best_)
      return;
    if (covered + live == best_ + 1) {
      // every live context must end up covered
      for (std::size_t c = 0; c < cfg_.contexts.size(); ++c)
        if (!s.ones[c] && s.zeros[c] == 2)
          for (auto t : cfg_.contexts[c].ray_ids)
            if (s.val[t] == -1 && !assign(s, t, 1, true))
              return;
      std::tie(covered, live) = covered_live(s);
      if (covered + live <= best_)
        return;
    }
    const bool tight = covered + live == best_ + 1;
    auto it = std::find_if(order_.begin(), order_.end(),
                           [&](std::size_t r) { return s.val[r] == -1; });
    if (it == order_.end()) {
      if (covered > best_) {
        best_ = covered;
        for (std::size_t r = 0; r < cfg_.size(); ++r)
          best_val_.bits[r] = s.val[r] == 1;
      }
      return;
    }
    for (std::int8_t v : {std::int8_t{1}, std::int8_t{0}}) {
      state t = s;
      if (assign(t, *it, v, tight))
        search(std::move(t));
    }
  }

  const configuration &cfg_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::vector<std::size_t>> ray_contexts_;
  std::vector<std::size_t> order_;
  std::size_t best_ = 0;
  valuation best_val_;
  engine_stats stats_;
};

inline std::size_t binomial_sum(std::size_t n, std::size_t k_max, std::size_t cap) {
  // sum_{k <= k_max} C(n, k), saturating at cap + 1
  std::size_t total = 0, term = 1;
  for (std::size_t k = 0; k <= k_max && k <= n; ++k) {
    total += term;
    if (total > cap)
      return cap + 1;
    term = term * (n - k) / (k + 1);
    if (term > cap)
      term = cap + 1;
  }
  return total;
}

/// All subsets of {0..n-1} with at most k elements, by size then lexicographic.
inline std::vector<std::vector<std::size_t>> small_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t size = 0; size <= k && size <= n; ++size) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      out.push_back(idx);
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + (i - 1))
        --i;
      if (i == 0)
        break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j)
        idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

} // namespace detail

/// Maximum number of covered contexts over REAL_EMBEDDED-admissible
/// valuations. The witness comes from branch and bound; optimality is
/// certified separately by showing that for every set S of at most
/// contexts - best - 1 contexts, covering all contexts outside S is infeasible.
inline optimization_result maximize_covered_contexts(const configuration &cfg,
                                                     const maximize_options &opt = {}) {
  const std::size_t m = cfg.contexts.size();
  if (m == 0)
    throw error("maximize_covered_contexts: configuration has no contexts");
  detail::covered_bnb bnb(cfg);
  bnb.run();

  optimization_result out;
  out.best = bnb.best();
  out.witness = bnb.witness();
  out.bb_stats = bnb.stats();
  if (!check_valuation(cfg, out.witness, model_kind::real_embedded).empty() ||
      covered_contexts(cfg, out.witness) != out.best)
    throw error("maximize_covered_contexts: witness does not verify");

  if (out.best < m) {
    const std::size_t k = m - out.best - 1;
    if (detail::binomial_sum(m, k, opt.max_refutations) > opt.max_refutations)
      throw error("maximize_covered_contexts: certificate needs more than " +
                  std::to_string(opt.max_refutations) + " subproblems");
    auto subsets = detail::small_subsets(m, k);
    out.refutations.resize(subsets.size());
    std::vector<char> sat(subsets.size(), 0);
    parallel_for(subsets.size(), opt.threads, [&](std::size_t i) {
      auto r = solve_with_excluded(cfg, subsets[i]);
      sat[i] = r.witness.has_value();
      out.refutations[i] = {std::move(subsets[i]), r.stats};
    });
    for (std::size_t i = 0; i < sat.size(); ++i)
      if (sat[i])
        throw inconsistent_certificates("refutation subproblem " + std::to_string(i) +
                                        " is satisfiable; branch and bound missed a better "
                                        "valuation");
  }
  return out;
}

/// (0, best); the upper bound is strict whenever the configuration is
/// KS-uncolourable.
inline std::pair<std::size_t, std::size_t> global_sum_bounds(const configuration &cfg,
                                                             const optimization_result &res,
                                                             bool ks_uncolourable) {
  if (ks_uncolourable && res.best == cfg.contexts.size())
    throw inconsistent_certificates("all contexts covered but KS colouring reported UNSAT");
  return {0, res.best};
}

// ---------------------------------------------------------------------------
// Certificate text

inline std::string format_ks_certificate(const configuration &cfg,
                                         const colorability_result &res) {
  std::ostringstream os;
  os << "# ks-colourability\n";
  os << "model " << to_string(model_kind::complex_maximal) << '\n';
  os << "rays " << cfg.size() << "\ncontexts " << cfg.contexts.size() << '\n';
  if (res.colorable()) {
    os << "result SAT\nwitness";
    for (auto r : res.witness->ones())
      os << ' ' << r;
    os << '\n';
  } else {
    const auto &s = res.certificate.stats;
    os << "result UNSAT\n";
    os << "nodes " << s.nodes << "\npropagations " << s.propagations << "\nconflicts "
       << s.conflicts << '\n';
  }
  return os.str();
}

inline std::string format_certificate(const configuration &cfg, const optimization_result &res) {
  std::ostringstream os;
  os << "# covered-context maximum\n";
  os << "model " << to_string(model_kind::real_embedded) << '\n';
  os << "rays " << cfg.size() << "\ncontexts " << cfg.contexts.size() << '\n';
  os << "best " << res.best << '\n';
  os << "witness";
  for (auto r : res.witness.ones())
    os << ' ' << r;
  os << '\n';
  os << "bb_nodes " << res.bb_stats.nodes << '\n';
  os << "refuted " << res.refutations.size() << '\n';
  for (std::size_t i = 0; i < res.refutations.size(); ++i) {
    const auto &r = res.refutations[i];
    os << "sub " << i << " excluded=";
    if (r.excluded_contexts.empty())
      os << '-';
    for (std::size_t k = 0; k < r.excluded_contexts.size(); ++k)
      os << (k ? "," : "") << r.excluded_contexts[k];
    os << " nodes=" << r.stats.nodes << " propagations=" << r.stats.propagations
       << " result=UNSAT\n";
  }
  return os.str();
}

} // namespace ksr
