#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"

using namespace solenoid;
using namespace testing_support;

namespace {

SolenoidSpec cosine_spec() {
  SolenoidConfig c;
  c.expansion = {2};
  c.lambda = TrigPolynomial::constant(1, 0.5);
  c.f = {TrigPolynomial(1, {{{1}, 1.0, 0.0}})};
  c.lambda_tilde = 0.25;
  c.e_radius = 2.0;
  return SolenoidSpec(c);
}

SolenoidSpec zero_spec(std::size_t l = 1, std::size_t p = 2) {
  SolenoidConfig c;
  c.expansion = std::vector<int>(l, 2);
  c.lambda = TrigPolynomial::constant(l, 0.3);
  c.f = std::vector<TrigPolynomial>(p, TrigPolynomial(l));
  c.g = {TrigPolynomial(l)};
  c.lambda_tilde = 0.1;
  return SolenoidSpec(c);
}

}  // namespace

TEST(GraphValue, ZeroTranslationsGiveZero) {
  const auto spec = zero_spec();
  std::mt19937_64 rng(41);
  for (int t = 0; t < 50; ++t) {
    const auto v = graph_value(spec, random_point(rng, 1), random_word(rng, 2, 1 + rng() % 12));
    EXPECT_EQ(v.y, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(v.z, (std::vector<double>{0.0}));
  }
}

TEST(GraphValue, SingleStep) {
  const auto v = graph_value(cosine_spec(), std::vector<double>{0.0}, Word{{0}});
  EXPECT_EQ(v.y[0], 1.0);
}

TEST(GraphValue, EmptyWordRejected) {
  EXPECT_THROW(graph_value(cosine_spec(), std::vector<double>{0.0}, Word{}), Error);
}

TEST(GraphValue, CauchyTruncation) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 100; ++t) {
    const auto spec = random_spec(rng);
    const auto x = random_point(rng, spec.l());
    const auto w = random_word(rng, spec.degree(), 20);
    double c = 0.0;
    for (const auto& f : spec.config().f) c = std::max(c, f.sup_abs_bound());
    for (const auto& g : spec.config().g) c = std::max(c, g.sup_abs_bound());
    c *= std::sqrt(2.0);
    for (std::size_t n = 1; n < 20; ++n) {
      const auto a = graph_value(spec, x, w.prefix(n)), b = graph_value(spec, x, w.prefix(n + 1));
      double drift = 0.0;
      for (std::size_t i = 0; i < spec.p(); ++i) drift += (a.y[i] - b.y[i]) * (a.y[i] - b.y[i]);
      for (std::size_t i = 0; i < spec.d(); ++i) drift += (a.z[i] - b.z[i]) * (a.z[i] - b.z[i]);
      const double lam_n = std::pow(spec.lambda_upper_bound(), static_cast<double>(n));
      EXPECT_LE(std::sqrt(drift), lam_n * c + 1e-15);
      EXPECT_LE(std::sqrt(drift), truncation_bound(spec, n) + 1e-15);
    }
  }
}

TEST(GraphValue, PushforwardIdentity) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 500; ++t) {
    const auto spec = random_spec(rng);
    const auto x = random_point(rng, spec.l());
    const auto w = random_word(rng, spec.degree(), 2 + rng() % 12);
    const auto xp = inverse_branch(spec, w[0], x);
    const auto inner = graph_value(spec, xp, w.shifted());
    const auto image = spec.apply({xp, inner.y, inner.z});
    const auto direct = graph_value(spec, x, w);
    for (std::size_t i = 0; i < spec.l(); ++i) EXPECT_NEAR(image.x[i], x[i], 1e-12);
    for (std::size_t i = 0; i < spec.p(); ++i) EXPECT_NEAR(image.y[i], direct.y[i], 1e-12);
    for (std::size_t i = 0; i < spec.d(); ++i) EXPECT_NEAR(image.z[i], direct.z[i], 1e-12);
  }
}

TEST(GraphValue, StaysInDomain) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 300; ++t) {
    const auto spec = random_spec(rng);
    const auto v = graph_value(spec, random_point(rng, spec.l()), random_word(rng, spec.degree(), 15));
    double ny = 0.0, nz = 0.0;
    for (double c : v.y) ny += c * c;
    for (double c : v.z) nz += c * c;
    EXPECT_LE(std::sqrt(ny), spec.e_radius() + 1e-12);
    EXPECT_LE(std::sqrt(nz), spec.f_radius() + 1e-12);
  }
}

TEST(RhoDerivative, VanishesWithoutTranslation) {
  const auto d = graph_rho_derivative(zero_spec(2, 2), std::vector<double>{0.3, 0.6}, Word{{1, 2, 3, 0}});
  EXPECT_EQ(d.rows(), 2u);
  EXPECT_EQ(d.cols(), 2u);
  for (double e : d.entries()) EXPECT_EQ(e, 0.0);
}

TEST(RhoDerivative, OneTermSeries) {
  // f'(0)/2 = 0 for f = cos(2πx)
  const auto d = graph_rho_derivative(cosine_spec(), std::vector<double>{0.0}, Word{{0}});
  EXPECT_NEAR(d(0, 0), 0.0, 1e-15);
  // and at x = 0.5: preimage 0.25, f'(0.25) = -2π, so ρDS = -π
  const auto e = graph_rho_derivative(cosine_spec(), std::vector<double>{0.5}, Word{{0}});
  EXPECT_NEAR(e(0, 0), -std::numbers::pi, 1e-13);
}

TEST(RhoDerivative, MatchesFiniteDifferences) {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 200; ++t) {
    const auto spec = random_spec(rng);
    const auto x = random_point(rng, spec.l(), 0.01, 0.99);
    const auto w = random_word(rng, spec.degree(), 1 + rng() % 14);
    const auto exact = graph_rho_derivative(spec, x, w);
    const auto fd = finite_difference(spec, x, w, 1e-6);
    EXPECT_LE(max_abs_diff(exact, fd), 1e-6 * std::max(1.0, exact.frobenius_norm()));
  }
}

TEST(RhoDerivative, MatchesSeries) {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 100; ++t) {
    const auto spec = random_spec(rng);
    const auto x = random_point(rng, spec.l());
    const auto w = random_word(rng, spec.degree(), 1 + rng() % 16);
    const auto exact = graph_rho_derivative(spec, x, w);
    EXPECT_LE(max_abs_diff(exact, series_rho_derivative(spec, x, w)), 1e-12 * std::max(1.0, exact.frobenius_norm()));
  }
}

TEST(RhoDerivative, UniformKappaBound) {
  std::mt19937_64 rng(47);
  for (int s = 0; s < 10; ++s) {
    const auto spec = random_spec(rng);
    const double kappa = spec.derivative_bound();
    for (int t = 0; t < 100; ++t) {
      const auto d = graph_rho_derivative(spec, random_point(rng, spec.l()), random_word(rng, spec.degree(), 12));
      EXPECT_LE(operator_norm(d), kappa * (1 + 1e-12));
    }
  }
}

TEST(GraphPatch, ResolutionShrinks) {
  const auto spec = fixture("smale_williams.cfg");
  double prev = INFINITY;
  for (std::size_t n = 1; n < 12; ++n) {
    const auto g = graph_patch(spec, std::vector<double>{0.2}, Word{std::vector<Symbol>(n, 1)});
    EXPECT_LT(g.resolution, prev);
    EXPECT_NEAR(g.resolution, std::pow(0.2, double(n)) * 3.0, 1e-15);
    prev = g.resolution;
  }
}

TEST(SliceCloud, Cardinality) {
  const auto spec = fixture("smale_williams.cfg");
  EXPECT_EQ(slice_cloud(spec, std::vector<double>{0.1}, 1).size(), 2u);
  const auto c = slice_cloud(spec, std::vector<double>{0.1}, 10);
  EXPECT_EQ(c.size(), 1024u);
  EXPECT_EQ(c.dim, 4u);
  EXPECT_EQ(c.base_dims, 1u);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c.word_index[i], i);
}

TEST(SliceCloud, MatchesGraphValue) {
  const auto spec = fixture("product.cfg");
  const std::vector<double> x{0.3, 0.85};
  const auto c = slice_cloud(spec, x, 3);
  ASSERT_EQ(c.size(), 64u);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto v = graph_value(spec, x, word_from_index(c.word_index[i], 4, 3));
    const auto pt = c.point(i);
    EXPECT_EQ(pt[0], x[0]);
    EXPECT_EQ(pt[1], x[1]);
    EXPECT_NEAR(pt[2], v.y[0], 1e-15);
    EXPECT_NEAR(pt[3], v.y[1], 1e-15);
    EXPECT_NEAR(pt[4], v.z[0], 1e-15);
  }
}

TEST(SliceCloud, DegenerateCollapses) {
  const auto c = slice_cloud(zero_spec(), std::vector<double>{0.4}, 8);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.point(0)[1], 0.0);
  EXPECT_EQ(slice_cloud(fixture("graph_attractor.cfg"), std::vector<double>{0.37}, 12).size(), 1u);
}

TEST(SliceCloud, SmaleWilliamsPointsDistinct) {
  const auto c = slice_cloud(fixture("smale_williams.cfg"), std::vector<double>{0.0}, 10);
  ASSERT_EQ(c.size(), 1024u);
  double min_dist = INFINITY;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double dy0 = c.point(i)[1] - c.point(j)[1], dy1 = c.point(i)[2] - c.point(j)[2];
      min_dist = std::min(min_dist, std::hypot(dy0, dy1));
    }
  EXPECT_GT(min_dist, 0.0);
}

TEST(SliceCloud, Budget) {
  try {
    slice_cloud(fixture("smale_williams.cfg"), std::vector<double>{0.0}, 12, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Resource);
  }
}

TEST(AttractorCloud, SingleGridPointIsSlice) {
  const auto spec = fixture("smale_williams.cfg");
  const auto a = attractor_cloud(spec, 8, 1.0);
  const auto s = slice_cloud(spec, std::vector<double>{0.0}, 8);
  EXPECT_EQ(a.coords, s.coords);
  EXPECT_EQ(a.word_index, s.word_index);
}

TEST(AttractorCloud, CardinalityBound) {
  const auto a = attractor_cloud(fixture("smale_williams.cfg"), 10, 1.0 / 1024);
  EXPECT_LE(a.size(), std::size_t{1} << 20);
  EXPECT_GT(a.size(), std::size_t{1} << 19);
  EXPECT_THROW(attractor_cloud(fixture("smale_williams.cfg"), 16, 1.0 / 1024), Error);
}

TEST(AttractorCloud, ForwardInvariantUpToResolution) {
  const auto spec = fixture("smale_williams.cfg");
  const std::size_t depth = 8, per_axis = 64;
  const auto cloud = attractor_cloud(spec, depth, 1.0 / per_axis);
  const double tol = truncation_bound(spec, depth) + 1e-12;
  // slice over grid index g occupies a contiguous run
  std::vector<std::size_t> first(per_axis + 1, cloud.size());
  for (std::size_t i = cloud.size(); i-- > 0;) first[cloud.grid_index[i]] = i;
  for (std::size_t i = 0; i < cloud.size(); i += 7) {
    const auto p = cloud.point(i);
    const auto img = spec.apply({{p[0]}, {p[1], p[2]}, {p[3]}});
    const std::size_t g = static_cast<std::size_t>(std::llround(img.x[0] * per_axis)) % per_axis;
    double best = INFINITY;
    for (std::size_t j = first[g]; j < cloud.size() && cloud.grid_index[j] == g; ++j) {
      const auto q = cloud.point(j);
      best = std::min(best, std::sqrt((img.y[0] - q[1]) * (img.y[0] - q[1]) + (img.y[1] - q[2]) * (img.y[1] - q[2]) +
                                      (img.z[0] - q[3]) * (img.z[0] - q[3])));
    }
    EXPECT_LE(best, tol);
  }
}

TEST(AttractorCloud, ThreadCountDoesNotChangeOutput) {
  const auto spec = fixture("product.cfg");
  set_thread_count(1);
  const auto a = attractor_cloud(spec, 4, 1.0 / 16);
  set_thread_count(4);
  const auto b = attractor_cloud(spec, 4, 1.0 / 16);
  set_thread_count(0);
  EXPECT_EQ(a.coords, b.coords);
  EXPECT_EQ(a.grid_index, b.grid_index);
}

TEST(AttractorCloud, CsvAndMetadata) {
  const auto spec = fixture("smale_williams.cfg");
  const auto c = attractor_cloud(spec, 2, 0.5);
  std::ostringstream csv, meta;
  write_cloud_csv(csv, spec, c);
  write_cloud_metadata(meta, c);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x1,y1,y2,z1,word_index,grid_index");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8u);
  EXPECT_NE(meta.str().find("spec_hash = " + spec_hash(spec)), std::string::npos);
  EXPECT_NE(meta.str().find("depth = 2"), std::string::npos);
  EXPECT_NE(meta.str().find("resolution = "), std::string::npos);
}

TEST(Dedup, MergesWithinTolerance) {
  const std::vector<double> pts{0.0, 0.0, 1e-13, 0.0, 0.5, 0.5, 0.5, 0.5 + 2e-12, 0.0, 1e-13};
  const auto kept = detail::dedup_indices(pts, 2, kDedupTolerance);
  EXPECT_EQ(kept, (std::vector<std::size_t>{0, 2, 3}));
}
