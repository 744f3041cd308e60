#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "qbx/errors.hpp"
#include "qbx/geometry.hpp"
#include "qbx/io.hpp"
#include "qbx/legendre.hpp"

using namespace qbx;

namespace {

FourierCurve fish() { return read_fourier_curve(QBX_DATA_DIR "/fish.txt"); }

double legendre_p(int n, double x) {
  double p0 = 1, p1 = x;
  if (n == 0) return 1;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace

TEST(Legendre, GaussRuleIntegratesPolynomials) {
  for (int n : {1, 2, 5, 16, 32, 64}) {
    const auto& g = legendre::gauss(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += g.w[i] * std::pow(g.x[i], deg);
      double exact = (deg % 2) ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-14) << n << " " << deg;
    }
  }
}

TEST(Curve, CircleAndArea) {
  auto c = FourierCurve::circle(2.0, {1, -1});
  EXPECT_NEAR(c.signed_area(), 4 * pi, 1e-12);
  Vec2 x = c.point(0.125);
  EXPECT_NEAR(x.x, 1 + 2 * std::cos(pi / 4), 1e-15);
  EXPECT_NEAR(x.y, -1 + 2 * std::sin(pi / 4), 1e-15);
  EXPECT_NEAR(c.reversed().signed_area(), -4 * pi, 1e-12);
}

TEST(Curve, RadialForm) {
  std::vector<double> d = {0.3, -0.2, 0.1, 0.05};
  auto c = FourierCurve::radial(5.0, d);
  for (double t : {0.0, 0.1, 0.37, 0.81}) {
    double th = 2 * pi * t, r = 5.0;
    for (std::size_t j = 0; j < d.size(); ++j) r += d[j] * std::sin((j + 1) * th);
    Vec2 x = c.point(t);
    EXPECT_NEAR(x.x, r * std::cos(th), 1e-13);
    EXPECT_NEAR(x.y, r * std::sin(th), 1e-13);
  }
}

TEST(Curve, DerivativesByFiniteDifference) {
  auto c = fish();
  const double t = 0.31, e = 1e-6;
  Vec2 x, dx, ddx;
  c.eval(t, &x, &dx, &ddx);
  Vec2 fd = (1 / (2 * e)) * (c.point(t + e) - c.point(t - e));
  Vec2 fdd = (1 / (e * e)) * (c.point(t + e) - 2.0 * x + c.point(t - e));
  EXPECT_NEAR(norm(fd - dx), 0, 1e-8 * norm(dx));
  EXPECT_NEAR(norm(fdd - ddx), 0, 1e-4 * norm(ddx));
}

TEST(Curve, FishFileHasFiftyOneTerms) {
  auto c = fish();
  EXPECT_EQ(c.degree(), 50);
  EXPECT_DOUBLE_EQ(c.coeffs_x1()[0].real(), -3.03e-2);
  EXPECT_DOUBLE_EQ(c.coeffs_x1()[1].imag(), 2.34e-2);
  EXPECT_DOUBLE_EQ(c.coeffs_x2()[50].imag(), 4.80e-5);
  // The tabulated orientation is clockwise.
  EXPECT_LT(c.signed_area(), 0.0);
}

TEST(Curve, ParseErrors) {
  std::istringstream bad("0 1 2 3\n");
  EXPECT_THROW(parse_fourier_curve(bad), ParseError);
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(parse_fourier_curve(empty), ParseError);
  std::istringstream pl("0.5 2 1 -1\n# c\n");
  auto p = parse_placements(pl);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].scale, 2.0);
}

TEST(Geometry, UnitCircle) {
  auto d = build_panels(FourierCurve::circle(), 16, 1e-12);
  EXPECT_NEAR(d.total_length(), 2 * pi, 1e-10);
  for (const auto& p : d.panels()) {
    double ws = 0;
    for (double w : p.src_weights) ws += w;
    EXPECT_NEAR(ws, p.h, 1e-12 * p.h);
    ws = 0;
    for (double w : p.weights) ws += w;
    EXPECT_NEAR(ws, p.h, 1e-12 * p.h);
    for (int j = 0; j < d.q(); ++j) {
      EXPECT_NEAR(norm(p.normals[j]), 1.0, 1e-14);
      EXPECT_NEAR(norm(p.normals[j] - p.nodes[j]), 0.0, 1e-10);
    }
  }
  EXPECT_GT(node_polygon_area(d), 0.0);
}

TEST(Geometry, NodesAreGaussPointsInArclength) {
  auto d = build_panels(FourierCurve::circle(), 8, 1e-10);
  const auto& g = legendre::gauss(8);
  for (const auto& p : d.panels())
    for (int j = 0; j < 8; ++j) {
      // On the unit circle arclength equals 2 pi t.
      double s = 2 * pi * (p.node_t[j] - p.t0);
      EXPECT_NEAR(s, 0.5 * p.h * (g.x[j] + 1), 1e-12);
    }
}

TEST(Geometry, FishResolvedAndCounterclockwise) {
  auto d = build_panels(fish(), 16, 5e-13);
  EXPECT_EQ(d.qhat(), 64);
  EXPECT_GT(node_polygon_area(d), 0.0);
  auto pts = d.density_points();
  std::vector<cplx> z;
  for (auto p : pts) z.push_back(to_complex(p));
  EXPECT_LE(resolution_metric(d, z), 5e-13);
  for (int k = 0; k < d.num_panels(); ++k) {
    EXPECT_TRUE(d.adjacent(k, d.panel(k).next));
    EXPECT_EQ(d.panel(d.panel(k).next).prev, k);
  }
}

TEST(Geometry, DegenerateCurvesRejected) {
  FourierCurve segment({0.0, 1.0}, {0.0, 1.0});
  EXPECT_THROW(build_panels(segment, 4, 1e-6), GeometryError);
  EXPECT_THROW(build_panels(FourierCurve::circle(), 3, 1e-6), DomainError);
  EXPECT_THROW(build_panels(FourierCurve::circle(), 4, 0.0), DomainError);
}

TEST(Geometry, BoundingSquaresContainPanels) {
  auto d = build_panels(fish(), 4, 1e-6);
  for (int k = 0; k < d.num_panels(); ++k) {
    const auto& p = d.panel(k);
    for (int i = 0; i <= 400; ++i) {
      Vec2 x = d.curve_of(k).point(p.t0 + (p.t1 - p.t0) * i / 400.0);
      EXPECT_LE(dist_inf(x, p.com), p.bound_radius);
    }
  }
}

TEST(Geometry, SplitHalvesArclength) {
  auto d = build_panels(FourierCurve::circle(), 4, 1e-8);
  double total = d.total_length();
  for (int k : {0, 3, d.num_panels() - 1}) {
    auto s = split_panel(d, k);
    EXPECT_EQ(s.num_panels(), d.num_panels() + 1);
    EXPECT_NEAR(s.panel(k).h, d.panel(k).h / 2, 1e-10 * d.panel(k).h);
    EXPECT_NEAR(s.panel(k + 1).h, d.panel(k).h / 2, 1e-10 * d.panel(k).h);
    EXPECT_NEAR(s.total_length(), total, 1e-12 * total);
    EXPECT_TRUE(s.adjacent(k, k + 1));
  }
  auto f = build_panels(fish(), 4, 1e-5);
  auto fs = f.split({1, 5, 9});
  EXPECT_NEAR(fs.total_length(), f.total_length(), 1e-12 * f.total_length());
  EXPECT_THROW(split_panel(f, f.num_panels()), DomainError);
}

TEST(Geometry, OversampleExactOnPolynomials) {
  auto d = build_panels(FourierCurve::circle(), 8, 1e-8);
  std::vector<cplx> ones(d.num_density_nodes(), 1.0);
  for (auto v : oversample(d, std::span<const cplx>(ones))) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-13);
  const auto& gq = legendre::gauss(d.q());
  const auto& gh = legendre::gauss(d.qhat());
  std::vector<double> f(d.num_density_nodes(), 0.0);
  for (int j = 0; j < d.q(); ++j) f[2 * d.q() + j] = legendre_p(d.q() - 1, gq.x[j]);
  auto g = oversample(d, std::span<const double>(f));
  for (int i = 0; i < d.qhat(); ++i) EXPECT_NEAR(g[2 * d.qhat() + i], legendre_p(d.q() - 1, gh.x[i]), 1e-13);
  std::vector<double> wrong(5);
  EXPECT_THROW(oversample(d, std::span<const double>(wrong)), DomainError);
}

TEST(Geometry, OversampleSmoothFunctionOnFish) {
  auto d = build_panels(fish(), 16, 5e-13);
  std::vector<double> f;
  for (const auto& p : d.panels())
    for (double t : p.node_t) f.push_back(std::sin(8 * pi * t));
  auto g = oversample(d, std::span<const double>(f));
  std::size_t i = 0;
  for (const auto& p : d.panels())
    for (double t : p.src_t) EXPECT_NEAR(g[i++], std::sin(8 * pi * t), 1e-10);
}

TEST(Geometry, ResolutionMetric) {
  auto d = build_panels(FourierCurve::circle(), 4, 1e-8);
  std::vector<double> one(d.num_density_nodes(), 1.0);
  EXPECT_EQ(resolution_metric(d, std::span<const double>(one)), 0.0);
  std::vector<double> zero(d.num_density_nodes(), 0.0);
  EXPECT_EQ(resolution_metric(d, std::span<const double>(zero)), 0.0);
  const auto& g = legendre::gauss(4);
  std::vector<double> f(d.num_density_nodes(), 0.0);
  for (int j = 0; j < 4; ++j) f[4 + j] = legendre_p(3, g.x[j]);
  EXPECT_NEAR(resolution_metric(d, std::span<const double>(f)), d.panel(1).h, 1e-13);
}

TEST(Geometry, SplittingOffendingPanelDoesNotIncreaseMetric) {
  auto d = build_panels(fish(), 4, 1e-6);
  auto field = [](Vec2 x) { return std::cos(12.43 * (0.6 * x.x + 0.8 * x.y)) / (1 + 10 * norm(x)); };
  for (int round = 0; round < 5; ++round) {
    std::vector<double> f;
    for (auto x : d.density_points()) f.push_back(field(x));
    double m = resolution_metric(d, std::span<const double>(f));
    // Locate the worst panel by evaluating each one alone.
    int worst = 0;
    double wv = -1;
    for (int k = 0; k < d.num_panels(); ++k) {
      std::vector<double> fk(f.size(), 0.0);
      for (int j = 0; j < 4; ++j) fk[4 * k + j] = f[4 * k + j];
      double v = resolution_metric(d, std::span<const double>(fk));
      if (v > wv) { wv = v; worst = k; }
    }
    EXPECT_NEAR(wv, m, 1e-15);
    d = split_panel(d, worst);
    std::vector<double> f2;
    for (auto x : d.density_points()) f2.push_back(field(x));
    EXPECT_LE(resolution_metric(d, std::span<const double>(f2)), m);
  }
}

TEST(Geometry, DistanceMatchesDenseSampling) {
  auto d = build_panels(fish(), 8, 1e-8);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 40; ++trial) {
    int k = static_cast<int>((u(rng) + 1) / 2 * d.num_panels()) % d.num_panels();
    const auto& p = d.panel(k);
    Vec2 c = p.com + Vec2(u(rng), u(rng)) * (2 * p.h);
    // Dense sampling, then golden-section polish around the best sample so the
    // oracle itself is accurate when c is very close to the panel.
    const auto& crv = d.curve_of(k);
    auto f = [&](double t) { return dist(crv.point(t), c); };
    double best = 1e300, tb = p.t0, dt = (p.t1 - p.t0) / 10000.0;
    for (int i = 0; i <= 10000; ++i) {
      double v = f(p.t0 + dt * i);
      if (v < best) { best = v; tb = p.t0 + dt * i; }
    }
    double a = std::max(p.t0, tb - dt), b = std::min(p.t1, tb + dt);
    const double gr = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 80; ++it) {
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      if (f(x1) < f(x2)) b = x2; else a = x1;
    }
    best = std::min(best, f(0.5 * (a + b)));
    double got = d.distance_to_panel(c, k);
    EXPECT_LE(got, best + 1e-14);
    EXPECT_NEAR(got, best, 1e-8 * p.h);
  }
}

TEST(Geometry, CentersAtHalfPanelLength) {
  auto d = build_panels(fish(), 4, 1e-6);
  for (auto s : {Side::Exterior, Side::Interior}) {
    auto cs = d.centers(s);
    ASSERT_EQ(static_cast<int>(cs.size()), d.num_density_nodes());
    for (const auto& c : cs) {
      EXPECT_NEAR(dist(c.location, d.panel(c.panel).nodes[c.node]), d.panel(c.panel).h / 2, 1e-15);
      double side = dot(c.location - d.panel(c.panel).nodes[c.node], d.panel(c.panel).normals[c.node]);
      EXPECT_EQ(side > 0, s == Side::Exterior);
    }
  }
}

TEST(Geometry, CsvDump) {
  auto d = build_panels(FourierCurve::circle(), 2, 1e-3);
  std::ostringstream os;
  write_discretization_csv(d, os);
  std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), d.num_density_nodes() + 1);
}
