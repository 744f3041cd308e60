#include "qbx/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qbx/errors.hpp"
#include "qbx/layerpot.hpp"
#include "qbx/legendre.hpp"
#include "qbx/log.hpp"
#include "qbx/refinement.hpp"
#include "qbx/specfun.hpp"
#include "qbx/tables.hpp"

namespace qbx {

namespace {

struct ModelPanel {
  bool curved;
  Vec2 point(double t) const {
    if (!curved) return {t / 2, 0.0};
    const double phi = t / 2;
    return {std::sin(phi), 1.0 - std::cos(phi)};
  }
  // Unit normal, away from the arc's center of curvature.
  Vec2 normal(double t) const {
    if (!curved) return {0.0, 1.0};
    const double phi = t / 2;
    return {std::sin(phi), -std::cos(phi)};
  }
};

// Coefficients (i/4) int H_l(w|x - c|) e^{-i l theta} sigma ds, l = -p..p, for
// every center and density P_0..P_{q-1}, with an n-point Gauss rule.
std::vector<cplx> model_coefficients(const ModelPanel& pn, const std::vector<Vec2>& centers, int q, int p,
                                     double omega, int n) {
  const auto& rule = legendre::gauss(n);
  std::vector<cplx> out;
  std::vector<double> leg(static_cast<std::size_t>(q));
  for (Vec2 c : centers) {
    std::vector<cplx> acc(static_cast<std::size_t>(q * (2 * p + 1)));
    for (int i = 0; i < n; ++i) {
      const double t = rule.x[static_cast<std::size_t>(i)];
      const double w = rule.w[static_cast<std::size_t>(i)] / 2;  // ds = dt / 2 on both panels
      const Vec2 z = pn.point(t) - c;
      const double r = norm(z), th = std::atan2(z.y, z.x);
      const CylFunSeq h = hankel1_seq(omega * r, p);
      legendre::eval_all(q - 1, t, leg.data());
      for (int l = -p; l <= p; ++l) {
        const cplx k = I / 4.0 * h(l) * std::exp(-I * (l * th)) * w;
        for (int m = 0; m < q; ++m) acc[static_cast<std::size_t>(m * (2 * p + 1) + l + p)] += k * leg[static_cast<std::size_t>(m)];
      }
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  return out;
}

int preset_p(int q) {
  for (const Preset& pr : presets())
    if (pr.q == q) return pr.p;
  return std::min(q, 8);
}

}  // namespace

int calibrate_qhat(int q, double eps, const QhatOptions& opt) {
  if (q < 1 || !(eps > 0) || opt.step < 1) throw DomainError("calibrate_qhat: bad arguments");
  const int p = opt.p >= 0 ? opt.p : preset_p(q);
  const auto& nodes = legendre::gauss(q).x;
  std::vector<std::pair<ModelPanel, std::vector<Vec2>>> cases;
  for (bool curved : {false, true}) {
    ModelPanel pn{curved};
    std::vector<Vec2> cs;
    for (double t : nodes) {
      cs.push_back(pn.point(t) + 0.25 * pn.normal(t));
      if (curved) cs.push_back(pn.point(t) - 0.25 * pn.normal(t));
    }
    cases.emplace_back(pn, cs);
  }
  for (int qh = std::max(q, opt.step); qh <= opt.max_qhat; qh += opt.step) {
    double worst = 0;
    for (const auto& [pn, cs] : cases) {
      const auto a = model_coefficients(pn, cs, q, p, opt.omega, qh);
      const auto b = model_coefficients(pn, cs, q, p, opt.omega, qh + opt.step);
      // Relative to the largest coefficient of each (center, density) vector.
      const std::size_t len = static_cast<std::size_t>(2 * p + 1);
      for (std::size_t v = 0; v < a.size(); v += len) {
        double scale = 0, diff = 0;
        for (std::size_t k = v; k < v + len; ++k) {
          scale = std::max(scale, std::abs(b[k]));
          diff = std::max(diff, std::abs(a[k] - b[k]));
        }
        if (scale > 0) worst = std::max(worst, diff / scale);
      }
    }
    log_debug("qhat q=" + std::to_string(q) + " n=" + std::to_string(qh) + " change " + std::to_string(worst));
    if (worst <= eps) return qh;
  }
  throw ResolutionError("calibrate_qhat: no q-hat up to " + std::to_string(opt.max_qhat) + " meets the tolerance");
}

QhatTable calibrate_qhat_table(const std::vector<int>& qs, const std::vector<double>& epss, const QhatOptions& opt) {
  if (qs.empty() || epss.empty()) throw DomainError("calibrate_qhat_table: empty sweep");
  QhatTable t{qs, epss, {}};
  for (int q : qs) {
    std::vector<int> row;
    for (double e : epss) row.push_back(calibrate_qhat(q, e, opt));
    t.qhat.push_back(row);
  }
  return t;
}

PaddReport calibrate_padd(const PaddOptions& opt) {
  if (opt.geometries < 1 || opt.max_padd < 0) throw DomainError("calibrate_padd: bad options");
  PaddReport rep;
  rep.options = opt;
  rep.tabulated = lookup_padd(opt.p);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> delta(-0.2, 0.2), unit(0.0, 1.0);
  for (int g = 0; g < opt.geometries; ++g) {
    std::vector<double> d(12);
    for (double& x : d) x = delta(rng);
    const FourierCurve curve = FourierCurve::radial(5.0, d);
    // Three charges well inside (r <= 5 - 12 * 0.2 = 2.6 bounds the curve from below).
    std::vector<Vec2> at;
    std::vector<cplx> charges;
    for (int j = 0; j < 3; ++j) {
      const double r = 2.0 * std::sqrt(unit(rng)), th = 2 * pi * unit(rng);
      at.push_back({r * std::cos(th), r * std::sin(th)});
      charges.push_back({unit(rng) - 0.5, unit(rng) - 0.5});
    }
    const Discretization disc =
        refine_to_conditions(build_panels(curve, opt.q, opt.eps), opt.omega, {}).first;
    // Targets h/8 outside the density nodes.
    std::vector<Vec2> near;
    for (const Panel& pn : disc.panels())
      for (std::size_t j = 0; j < pn.nodes.size(); ++j) near.push_back(pn.nodes[j] + (pn.h / 8) * pn.normals[j]);

    PaddGeometry row;
    row.panels = disc.num_panels();
    EvalOptions eo;
    eo.p = opt.p;
    eo.eps = 1e-15;
    eo.p_add = 40;
    row.reference_error = greens_identity_errors(disc, opt.omega, at, charges, eo, near).eps_volume;
    eo.eps = opt.eps;
    for (int pa = 0; pa <= opt.max_padd; ++pa) {
      eo.p_add = pa;
      const double e = greens_identity_errors(disc, opt.omega, at, charges, eo, near).eps_volume;
      row.errors.push_back(e);
      if (e < opt.eps) {
        row.min_padd = pa;
        break;
      }
    }
    log_info("calibrate_padd geometry " + std::to_string(g) + ": min p_add " + std::to_string(row.min_padd));
    rep.rows.push_back(row);
  }
  rep.tabulated_sufficient = true;
  rep.max_required = 0;
  for (const auto& r : rep.rows) {
    if (r.min_padd < 0 || r.min_padd > rep.tabulated) rep.tabulated_sufficient = false;
    rep.max_required = (r.min_padd < 0 || rep.max_required < 0) ? -1 : std::max(rep.max_required, r.min_padd);
  }
  return rep;
}

}  // namespace qbx
