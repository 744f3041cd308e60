#include <gtest/gtest.h>

#include <omp.h>

#include <chrono>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qbx/errors.hpp"
#include "qbx/geometry.hpp"
#include "qbx/io.hpp"
#include "qbx/qbxfmm.hpp"
#include "qbx/refinement.hpp"
#include "qbx/tables.hpp"

using namespace qbx;

namespace {

std::mt19937_64 rng(7);

double urand(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

cplx crand() { return {urand(-1, 1), urand(-1, 1)}; }

using fixture::fish;
using fixture::rel_l2;

SourceBatch batch_at(const std::vector<Vec2>& pts) {
  SourceBatch b;
  b.points = pts;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double a = urand(0, 2 * pi);
    b.normals.push_back({std::cos(a), std::sin(a)});
    b.weights.push_back(urand(0.1, 1.0));
    b.slp.push_back(crand());
    b.dlp.push_back(crand());
  }
  return b;
}

// Clustered points: a few Gaussian blobs of very different widths.
std::vector<Vec2> clustered(int n, double scale) {
  std::vector<Vec2> c = {{urand(-1, 1), urand(-1, 1)}, {urand(-1, 1), urand(-1, 1)}, {urand(-1, 1), urand(-1, 1)}};
  std::vector<double> w = {0.3, 0.05, 0.005};
  std::vector<Vec2> out;
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const int k = i % 3;
    out.push_back(scale * (c[k] + w[k] * Vec2(g(rng), g(rng))));
  }
  return out;
}

// Mechanism of the pair (source leaf ls, target leaf lt) read off the lists.
int classify(const Tree& t, const InteractionLists& L, int ls, int lt) {
  auto in = [](const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  int found = -1, hits = 0;
  if (ls == lt || in(L.U[lt], ls)) found = 0, ++hits;
  for (int s = ls; s >= 0; s = t.box(s).parent)
    if (in(L.W[lt], s)) found = 2, ++hits;
  for (int a = lt; a >= 0; a = t.box(a).parent) {
    for (int s = ls; s >= 0; s = t.box(s).parent)
      if (in(L.V[a], s)) found = 1, ++hits;
    if (in(L.X[a], ls)) found = 3, ++hits;
  }
  return hits == 1 ? found : -1;
}

}  // namespace

TEST(EstimatePfmm, SatisfiesCriterionByDirectProduct) {
  for (double wr : {0.01, 0.3, 1.5})
    for (double eps : {1e-3, 1e-6, 1e-9, 1e-12}) {
      const int p = estimate_pfmm(1.0, wr, eps);
      const double x1 = 3 * wr, x2 = std::sqrt(2.0) * wr;
      for (int n = p + 1; n <= p + 30; ++n)
        EXPECT_LE(oracle::hankel_abs(n, x1) * std::abs(oracle::bessel_j_series(n, x2)), eps * (1 + 1e-6))
            << "wR=" << wr << " eps=" << eps << " n=" << n;
      if (p > 4)
        EXPECT_GT(oracle::hankel_abs(p, x1) * std::abs(oracle::bessel_j_series(p, x2)), eps * (1 - 1e-6));
    }
}

TEST(EstimatePfmm, SmallAtLowFrequencyAndMonotone) {
  EXPECT_LE(estimate_pfmm(1.0, 1e-3, 1e-3), 10);
  EXPECT_GE(estimate_pfmm(1.0, 1e-3, 1e-3), 4);
  for (double wr : {1e-3, 0.1, 1.0, 10.0, 50.0}) {
    int prev = 0;
    for (double eps : {1e-3, 1e-6, 1e-9, 1e-12, 1e-15}) {
      const int p = estimate_pfmm(2.0, wr / 2, eps);
      EXPECT_GE(p, prev);
      prev = p;
    }
  }
}

TEST(EstimatePfmm, LogarithmicGrowthAtLowFrequency) {
  // p ~ log(1/eps) / log(3 / sqrt 2): doubling the digits roughly doubles p.
  const double p6 = estimate_pfmm(1.0, 1e-4, 1e-6), p12 = estimate_pfmm(1.0, 1e-4, 1e-12);
  EXPECT_GT(p12 / p6, 1.5);
  EXPECT_LT(p12 / p6, 2.5);
}

TEST(EstimatePfmm, CapAndDomain) {
  EXPECT_THROW(estimate_pfmm(1.0, 400.0, 1e-6), OverflowError);
  EXPECT_THROW(estimate_pfmm(1.0, -1.0, 1e-6), DomainError);
  EXPECT_THROW(estimate_pfmm(1.0, 1.0, 0.0), DomainError);
}

TEST(Padd, TableValues) {
  EXPECT_EQ(lookup_padd(2), 5);
  EXPECT_EQ(lookup_padd(4), 5);
  EXPECT_EQ(lookup_padd(6), 15);
  EXPECT_EQ(lookup_padd(8), 20);
  EXPECT_EQ(lookup_padd(10), 22);
}

TEST(Fmm, RootOnlyTreeIsDirectSummation) {
  std::vector<Vec2> s, tg, cs;
  for (int i = 0; i < 60; ++i) s.push_back({urand(-1, 1), urand(-1, 1)});
  for (int i = 0; i < 20; ++i) tg.push_back({urand(-1, 1), urand(-1, 1)});
  for (int i = 0; i < 10; ++i) cs.push_back({urand(-1, 1), urand(-1, 1)});
  SourceBatch b = batch_at(s);
  FmmOptions opt;
  opt.n_max = 100;
  opt.p = 4;
  FmmPlan plan = make_plan(3.0, s, tg, cs, opt);
  ASSERT_EQ(plan.tree.num_boxes(), 1);
  FmmOutput f = run_fmm(plan, b);
  FmmOutput d = direct_fmm_reference(3.0, b, tg, cs, 4);
  for (std::size_t i = 0; i < tg.size(); ++i) EXPECT_LE(std::abs(f.potentials[i] - d.potentials[i]), 1e-13);
  EXPECT_LE(rel_l2(f.coefficients, d.coefficients), 1e-14);
  EXPECT_EQ(f.audit.target_pairs[0], 60 * 20);
  EXPECT_EQ(f.audit.total_target_pairs(), 60 * 20);
}

TEST(Fmm, FishMatchesDirectSums) {
  const double omega = 12.43, eps = 5e-7;
  auto [d, rep] = refine_to_conditions(build_panels(fish(), 4, 1e-2, lookup_qhat(4, 1e-6)), omega, {});
  ASSERT_TRUE(rep.all_pass());
  const SourceBatch b = fixture::green_batch(d, fixture::fish_charges(), omega);
  ASSERT_LE(b.size(), 4000u);
  // Mixed targets: far, mid-range and close to the curve.
  std::vector<Vec2> tg;
  const auto nodes = d.density_points();
  const auto normals = d.density_normals();
  for (int i = 0; i < 500; ++i) {
    if (i % 3 == 0) {
      tg.push_back({urand(-1, 1), urand(-1, 1)});
    } else {
      const std::size_t j = static_cast<std::size_t>(urand(0, nodes.size() - 1));
      tg.push_back(nodes[j] + urand(-0.05, 0.05) * normals[j]);
    }
  }
  std::vector<Vec2> cs;
  std::vector<double> radii;
  for (Side side : {Side::Exterior, Side::Interior})
    for (const auto& c : d.centers(side)) {
      cs.push_back(c.location);
      radii.push_back(c.radius);
    }
  FmmOptions opt;
  opt.eps = eps;
  opt.p = 4;
  FmmPlan plan = make_plan(omega, b.points, tg, cs, opt);
  EXPECT_GE(plan.tree.num_levels(), 4);
  FmmOutput f = run_fmm(plan, b);
  FmmOutput r = direct_fmm_reference(omega, b, tg, cs, 4);
  EXPECT_LE(rel_l2(f.potentials, r.potentials), eps);
  const double err = fixture::disk_rel_error(f.coefficients, r.coefficients, radii, 4, omega);
  EXPECT_LE(err, eps);
  EXPECT_EQ(f.audit.total_target_pairs(), static_cast<long long>(b.size() * tg.size()));
  EXPECT_EQ(f.audit.total_center_pairs(), static_cast<long long>(b.size() * cs.size()));
  EXPECT_GT(f.audit.target_pairs[1], 0);
  EXPECT_GT(f.audit.m2l, 0);

  // More expansion terms on the FMM side tighten the center coefficients.
  opt.p_add = 20;
  FmmOutput g = run_fmm(make_plan(omega, b.points, tg, cs, opt), b);
  EXPECT_LT(fixture::disk_rel_error(g.coefficients, r.coefficients, radii, 4, omega), err / 100);
}

TEST(Fmm, MechanismPartition) {
  for (int trial = 0; trial < 5; ++trial) {
    const double scale = std::pow(10.0, urand(-1, 0.5));
    const double omega = urand(1, 20);
    std::vector<Vec2> s = clustered(500, scale), tg = clustered(200, scale), cs = clustered(100, scale);
    SourceBatch b = batch_at(s);
    FmmOptions opt;
    opt.eps = 1e-15;
    opt.p = 3;
    opt.n_max = 8;
    FmmPlan full = make_plan(omega, s, tg, cs, opt);
    const Tree& t = full.tree;
    // Reference partial sums by mechanism.
    std::vector<std::vector<cplx>> pot(4, std::vector<cplx>(tg.size()));
    std::vector<std::vector<cplx>> coef(4, std::vector<cplx>(cs.size() * 7));
    std::array<long long, 4> npairs{}, ncpairs{};
    for (std::size_t j = 0; j < s.size(); ++j) {
      const int ls = t.leaf_of(cat_source, static_cast<int>(j));
      SourceBatch one;
      one.points = {s[j]};
      one.normals = {b.normals[j]};
      one.weights = {b.weights[j]};
      one.slp = {b.slp[j]};
      one.dlp = {b.dlp[j]};
      for (std::size_t i = 0; i < tg.size(); ++i) {
        const int m = classify(t, full.lists, ls, t.leaf_of(cat_target, static_cast<int>(i)));
        ASSERT_GE(m, 0);
        ++npairs[m];
        pot[m][i] += direct_fmm_reference(omega, one, std::span<const Vec2>(&tg[i], 1), {}, 3).potentials[0];
      }
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const int m = classify(t, full.lists, ls, t.leaf_of(cat_center, static_cast<int>(i)));
        ASSERT_GE(m, 0);
        ++ncpairs[m];
        auto r = direct_fmm_reference(omega, one, {}, std::span<const Vec2>(&cs[i], 1), 3);
        for (int k = 0; k < 7; ++k) coef[m][i * 7 + k] += r.coefficients[k];
      }
    }
    const unsigned masks[4] = {MechU, MechV, MechW, MechX};
    for (int m = 0; m < 4; ++m) {
      FmmOptions o = opt;
      o.mechanisms = masks[m];
      FmmPlan plan = make_plan(omega, s, tg, cs, o);
      FmmOutput f = run_fmm(plan, b);
      EXPECT_EQ(f.audit.target_pairs[m], npairs[m]) << "trial " << trial << " mech " << m;
      EXPECT_EQ(f.audit.center_pairs[m], ncpairs[m]) << "trial " << trial << " mech " << m;
      if (npairs[m] > 0) EXPECT_LE(rel_l2(f.potentials, pot[m]), 1e-12) << "trial " << trial << " mech " << m;
      if (ncpairs[m] > 0) EXPECT_LE(rel_l2(f.coefficients, coef[m]), 1e-12) << "trial " << trial << " mech " << m;
    }
    EXPECT_EQ(npairs[0] + npairs[1] + npairs[2] + npairs[3], static_cast<long long>(s.size() * tg.size()));
    EXPECT_GT(npairs[1], 0);
  }
}

TEST(Fmm, DeterministicAcrossThreadCounts) {
  std::vector<Vec2> s = clustered(3000, 1.0), tg = clustered(500, 1.0), cs = clustered(300, 1.0);
  SourceBatch b = batch_at(s);
  FmmOptions opt;
  opt.eps = 1e-9;
  opt.p = 6;
  FmmPlan plan = make_plan(5.0, s, tg, cs, opt);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  FmmOutput a = run_fmm(plan, b);
  omp_set_num_threads(4);
  FmmOutput c = run_fmm(plan, b);
  FmmOutput e = run_fmm(plan, b);
  omp_set_num_threads(saved);
  EXPECT_EQ(a.potentials, c.potentials);
  EXPECT_EQ(a.coefficients, c.coefficients);
  EXPECT_EQ(c.potentials, e.potentials);
}

TEST(Fmm, LowFrequencyScaledTree) {
  std::vector<Vec2> s = clustered(2000, 1e-3), tg = clustered(300, 1e-3);
  SourceBatch b = batch_at(s);
  FmmOptions opt;
  opt.eps = 1e-10;
  opt.point_only = true;
  FmmPlan plan = make_plan(0.5, s, tg, {}, opt);
  FmmOutput f = run_fmm(plan, b);
  FmmOutput r = direct_fmm_reference(0.5, b, tg, {}, 0);
  EXPECT_LE(rel_l2(f.potentials, r.potentials), 1e-9);
}

TEST(Fmm, PlanMismatchAndBadOptions) {
  std::vector<Vec2> s = {{0, 0}, {1, 1}}, tg = {{2, 2}};
  FmmPlan plan = make_plan(1.0, s, tg, {}, {});
  SourceBatch b = batch_at({{0, 0}, {1, 1.5}});
  EXPECT_THROW(run_fmm(plan, b), PreconditionError);
  EXPECT_THROW(make_plan(0.0, s, tg, {}, {}), DomainError);
  FmmOptions o;
  o.point_only = true;
  EXPECT_THROW(make_plan(1.0, s, tg, tg, o), DomainError);
}
