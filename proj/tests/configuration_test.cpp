#include "ksr/configuration.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace ksr;

namespace {

const eisenstein one = 1, zero = 0, w = eisenstein::omega(), w2 = eisenstein::omega2();

vec_c3 v3(eisenstein a, eisenstein b, eisenstein c) { return {{a, b, c}}; }

const configuration &full() {
  static const configuration cfg = closure_generate(mub_seed());
  return cfg;
}

bool contains(const configuration &cfg, const vec_c3 &v) {
  return std::any_of(cfg.rays.begin(), cfg.rays.end(),
                     [&](const ray &r) { return r.vec == v; });
}

std::size_t data_lines(const std::string &text) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#')
      ++n;
  return n;
}

} // namespace

TEST(Mub, BasesAreOrthonormalAndUnbiased) {
  auto b = mub_bases();
  EXPECT_EQ(b[0][0], v3(1, 0, 0));
  EXPECT_TRUE(hermitian_inner(v3(1, 1, 1), v3(1, w, w2)).is_zero());
  // |<(1,1,1),(1,1,w)>|^2 = norm(2 + w) = 3 = 3 * 3 / 3
  EXPECT_EQ(hermitian_inner(v3(1, 1, 1), v3(1, 1, w)).norm(), 3);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y)
      for (const auto &u : b[x])
        for (const auto &v : b[y]) {
          if (x == y) {
            if (!(u == v))
              EXPECT_TRUE(hermitian_inner(u, v).is_zero());
            continue;
          }
          EXPECT_EQ(3 * hermitian_inner(u, v).norm(), sq_norm(u) * sq_norm(v));
        }
}

TEST(Canonicalize, Examples) {
  EXPECT_EQ(canonicalize(v3(eisenstein(0, 2), 0, 0)), v3(1, 0, 0));
  EXPECT_EQ(canonicalize(v3(w, w2, 1)), v3(1, w, w2));
  EXPECT_EQ(canonicalize(v3(0, eisenstein(1, 1), eisenstein(-1, -1))), v3(0, 1, -1));
  EXPECT_THROW(canonicalize(v3(0, 0, 0)), zero_vector);
}

TEST(Canonicalize, LeadingCoordinateIsPositiveInteger) {
  auto c = canonicalize(v3(eisenstein(2, 1), 1, 0));
  EXPECT_TRUE(c[0].is_real());
  EXPECT_GT(c[0].a(), 0);
  EXPECT_TRUE(is_parallel(c, v3(eisenstein(2, 1), 1, 0)));
}

TEST(Canonicalize, IdempotentAndConstantOnParallelClasses) {
  const std::vector<eisenstein> scalars{1, -1, w, -w, w2, -w2, 2, eisenstein(1, 1)};
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::size_t> pick(0, scalars.size() - 1);
  for (int t = 0; t < 1000; ++t) {
    vec_c3 v = oracle::random_vec(rng, 3);
    if (v.is_zero())
      continue;
    vec_c3 c = canonicalize(v);
    EXPECT_EQ(canonicalize(c), c);
    EXPECT_TRUE(is_parallel(c, v));
    eisenstein s = scalars[pick(rng)] * scalars[pick(rng)];
    vec_c3 sv = v3(s * v[0], s * v[1], s * v[2]);
    EXPECT_EQ(canonicalize(sv), c);
  }
}

TEST(Closure, StandardBasisIsClosed) {
  auto cfg = closure_generate({v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1)});
  EXPECT_EQ(cfg.size(), 3u);
  EXPECT_EQ(cfg.contexts.size(), 1u);
}

TEST(Closure, TwoCrossProductsCloseTheSet) {
  auto cfg = closure_generate({v3(1, 0, 0), v3(0, 1, 1)});
  ASSERT_EQ(cfg.size(), 3u);
  EXPECT_TRUE(contains(cfg, v3(1, 0, 0)));
  EXPECT_TRUE(contains(cfg, v3(0, 1, 1)));
  EXPECT_TRUE(contains(cfg, v3(0, 1, -1)));
  EXPECT_EQ(cfg.contexts.size(), 1u);
}

TEST(Closure, MubSeedReaches165Rays130Contexts) {
  const auto &cfg = full();
  EXPECT_EQ(cfg.size(), 165u);
  EXPECT_EQ(cfg.contexts.size(), 130u);
  for (std::size_t i = 0; i < cfg.size(); ++i)
    EXPECT_EQ(cfg.rays[i].id, i);
}

TEST(Closure, EdgeCountMatchesNumericPairScan) {
  const auto &cfg = full();
  std::size_t numeric = 0;
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j)
      numeric += oracle::numerically_orthogonal(cfg.rays[i].vec, cfg.rays[j].vec);
  EXPECT_EQ(numeric, 390u);
  EXPECT_EQ(cfg.edges.size(), 390u);
}

TEST(Closure, RaysAreProjectivelyDistinct) {
  const auto &cfg = full();
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j)
      EXPECT_FALSE(oracle::numerically_parallel(cfg.rays[i].vec, cfg.rays[j].vec));
}

TEST(Closure, FixedPointIsClosedUnderBothRules) {
  const auto &cfg = full();
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j) {
      const auto &u = cfg.rays[i].vec, &v = cfg.rays[j].vec;
      vec_c3 x = canonicalize(conj_cross(u, v));
      if (hermitian_inner(u, v).is_zero() || sq_norm(x) <= 3)
        EXPECT_TRUE(contains(cfg, x));
    }
}

TEST(Closure, ContainsTheMubSeed) {
  for (const auto &v : mub_seed())
    EXPECT_TRUE(contains(full(), v));
}

TEST(Closure, ContextsArePairwiseOrthogonalAndSpan) {
  const auto &cfg = full();
  for (const auto &c : cfg.contexts) {
    const auto &a = cfg.rays[c.ray_ids[0]].vec, &b = cfg.rays[c.ray_ids[1]].vec,
               &d = cfg.rays[c.ray_ids[2]].vec;
    EXPECT_TRUE(hermitian_inner(a, b).is_zero());
    EXPECT_TRUE(hermitian_inner(a, d).is_zero());
    EXPECT_TRUE(hermitian_inner(b, d).is_zero());
    vec_c3 x = cross(b, d);
    eisenstein det = a[0] * x[0] + a[1] * x[1] + a[2] * x[2];
    EXPECT_FALSE(det.is_zero());
    EXPECT_TRUE(std::is_sorted(c.ray_ids.begin(), c.ray_ids.end()));
  }
}

TEST(Closure, EveryEdgeInExactlyOneContext) {
  const auto &cfg = full();
  std::map<edge, int> count;
  for (const auto &c : cfg.contexts) {
    auto [i, j, k] = c.ray_ids;
    ++count[{i, j}];
    ++count[{i, k}];
    ++count[{j, k}];
  }
  EXPECT_EQ(count.size(), cfg.edges.size());
  for (const auto &e : cfg.edges)
    EXPECT_EQ(count[e], 1);
}

TEST(Closure, SeedOrderDoesNotMatter) {
  auto seed = mub_seed();
  std::mt19937_64 rng(31);
  std::shuffle(seed.begin(), seed.end(), rng);
  auto cfg = closure_generate(seed);
  EXPECT_EQ(cfg, full());
  EXPECT_EQ(export_rays(cfg), export_rays(full()));
}

TEST(Closure, UnboundedGenerationDiverges) {
  closure_options opt;
  opt.generator_norm_bound.reset();
  opt.cap = 2000;
  EXPECT_THROW(closure_generate(mub_seed(), opt), divergence_guard);
}

TEST(Closure, EmptySeedIsRejected) {
  std::vector<vec_c3> none;
  EXPECT_THROW(closure_generate(none), error);
}

TEST(BuildContexts, SingleTriangle) {
  std::vector<edge> e{{0, 1}, {0, 2}, {1, 2}};
  auto c = build_contexts(3, e);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].ray_ids, (std::array<std::size_t, 3>{0, 1, 2}));
}

TEST(BuildContexts, LoneEdgeIsANonTriangleClique) {
  std::vector<vec_c3> rays{v3(1, 0, 0), v3(0, 1, 0)};
  EXPECT_THROW(make_configuration(rays), non_triangle_clique);
  EXPECT_NO_THROW(make_configuration(rays, false));
}

TEST(BuildContexts, FourCliqueIsRejected) {
  std::vector<edge> e{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  EXPECT_THROW(build_contexts(4, e), non_triangle_clique);
}

TEST(RayFile, ParsesCoordinates) {
  auto res = ingest_rays("1,0 1,0 1,0\n");
  ASSERT_EQ(res.cfg.size(), 1u);
  EXPECT_EQ(res.cfg.rays[0].vec, v3(1, 1, 1));
  EXPECT_TRUE(res.warnings.empty());
}

TEST(RayFile, CommentsBlankLinesAndCanonicalization) {
  auto res = ingest_rays("# header\n\n0,1 -1,-1 1,0  # w w^2 1\n");
  ASSERT_EQ(res.cfg.size(), 1u);
  EXPECT_EQ(res.cfg.rays[0].vec, v3(1, w, w2));
}

TEST(RayFile, MubSeedRoundTrip) {
  auto cfg = make_configuration(mub_seed(), false);
  std::string text = export_rays(cfg);
  EXPECT_EQ(data_lines(text), 12u);
  auto back = ingest_rays(text, false);
  EXPECT_EQ(back.cfg, cfg);
  EXPECT_EQ(export_rays(back.cfg), text);
}

TEST(RayFile, FullConfigurationRoundTrip) {
  std::string text = export_rays(full());
  auto back = ingest_rays(text);
  EXPECT_EQ(back.cfg, full());
  EXPECT_TRUE(back.warnings.empty());
}

TEST(RayFile, ParseErrorsCarryLineNumbers) {
  try {
    ingest_rays("1,0 0,0 0,0\n1,0 x,0 0,0\n");
    FAIL();
  } catch (const parse_error &e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ingest_rays("1,0 0,0\n"), parse_error);
  EXPECT_THROW(ingest_rays("1 0 0\n"), parse_error);
  EXPECT_THROW(ingest_rays("0,0 0,0 0,0\n"), parse_error);
}

TEST(RayFile, DuplicateAfterCanonicalization) {
  try {
    ingest_rays("1,0 0,0 0,0\n0,1 0,0 0,0\n", false);
    FAIL();
  } catch (const duplicate_ray &e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RayFile, CoefficientRangeWarnsOnly) {
  auto res = ingest_rays("1,0 3,0 0,0\n", false);
  EXPECT_EQ(res.cfg.size(), 1u);
  EXPECT_EQ(res.warnings.size(), 1u);
}

TEST(Reports, EdgeAndContextListsAreSorted) {
  auto e = format_edges(full());
  auto c = format_contexts(full());
  EXPECT_EQ(data_lines(e), 390u);
  EXPECT_EQ(data_lines(c), 130u);
  EXPECT_TRUE(std::is_sorted(full().edges.begin(), full().edges.end()));
  EXPECT_TRUE(std::is_sorted(full().contexts.begin(), full().contexts.end()));
}

TEST(SubConfiguration, KeepsInducedStructure) {
  const auto &cfg = full();
  std::vector<std::size_t> ids(cfg.contexts[0].ray_ids.begin(), cfg.contexts[0].ray_ids.end());
  auto sub = sub_configuration(cfg, ids);
  EXPECT_EQ(sub.size(), 3u);
  EXPECT_EQ(sub.edges.size(), 3u);
  EXPECT_EQ(sub.contexts.size(), 1u);
}
