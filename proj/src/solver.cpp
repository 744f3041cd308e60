#include "qbx/solver.hpp"

#include <chrono>
#include <cstdio>
#include <cmath>
#include <sstream>

#include "qbx/log.hpp"
#include "qbx/specfun.hpp"

namespace qbx {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double norm2(std::span<const cplx> v) {
  double s = 0;
  for (cplx z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

IncidentField IncidentField::plane_wave(Vec2 direction) {
  const double n = norm(direction);
  if (!(n > 0) || !std::isfinite(n)) throw DomainError("plane wave direction must be a nonzero finite vector");
  IncidentField f;
  f.kind = Kind::PlaneWave;
  f.direction = (1.0 / n) * direction;
  return f;
}

IncidentField IncidentField::point_sources(std::vector<Vec2> points, std::vector<cplx> charges) {
  if (points.size() != charges.size()) throw DomainError("one charge per source point expected");
  IncidentField f;
  f.kind = Kind::PointSources;
  f.points = std::move(points);
  f.charges = std::move(charges);
  return f;
}

cplx IncidentField::value(double omega, Vec2 x) const {
  if (kind == Kind::PlaneWave) return std::exp(I * (omega * dot(direction, x)));
  cplx u{};
  for (std::size_t j = 0; j < points.size(); ++j) u += charges[j] * hankel1_01(omega * dist(x, points[j])).h0;
  return u;
}

GmresResult gmres(const LinearOperator& a, std::span<const cplx> b, const GmresOptions& opt) {
  if (opt.restart < 1 || opt.max_iters < 1 || !(opt.tol > 0)) throw DomainError("bad GMRES options");
  const std::size_t n = b.size();
  const std::size_t m = static_cast<std::size_t>(opt.restart);
  GmresResult res;
  res.x.assign(n, cplx{});
  const double bnorm = norm2(b);
  res.residuals.push_back(bnorm > 0 ? 1.0 : 0.0);
  if (bnorm == 0) {
    res.converged = true;
    return res;
  }
  // Column k of the Hessenberg matrix is h[k][0..k+1].
  std::vector<std::vector<cplx>> v, h(m, std::vector<cplx>(m + 1));
  std::vector<cplx> c(m), s(m), g(m + 1);
  std::vector<cplx> r(b.begin(), b.end());
  double rnorm = bnorm;

  while (res.iterations < opt.max_iters) {
    v.assign(1, std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), cplx{});
    g[0] = rnorm;
    std::size_t k = 0;
    while (k < m && res.iterations < opt.max_iters) {
      auto w = a(v[k]);
      auto& hk = h[k];
      for (std::size_t j = 0; j <= k; ++j) {
        cplx d{};
        for (std::size_t i = 0; i < n; ++i) d += std::conj(v[j][i]) * w[i];
        hk[j] = d;
        for (std::size_t i = 0; i < n; ++i) w[i] -= d * v[j][i];
      }
      const double wn = norm2(w);
      for (std::size_t j = 0; j < k; ++j) {
        const cplx t = c[j] * hk[j] + s[j] * hk[j + 1];
        hk[j + 1] = -std::conj(s[j]) * hk[j] + c[j] * hk[j + 1];
        hk[j] = t;
      }
      // Rotation [c s; -conj(s) c] with real c, zeroing the subdiagonal wn.
      const double ah = std::abs(hk[k]), den = std::hypot(ah, wn);
      c[k] = ah > 0 ? ah / den : 0.0;
      s[k] = ah > 0 ? (hk[k] / ah) * (wn / den) : 1.0;
      hk[k] = c[k] * hk[k] + s[k] * wn;
      g[k + 1] = -std::conj(s[k]) * g[k];
      g[k] = c[k] * g[k];
      ++k;
      ++res.iterations;
      const double est = std::abs(g[k]) / bnorm;
      res.residuals.push_back(est);
      if (log_level() >= LogLevel::Debug) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "gmres %d %.3e", res.iterations, est);
        log_debug(buf);
      }
      if (est <= opt.tol || wn == 0) break;
      v.emplace_back(n);
      for (std::size_t i = 0; i < n; ++i) v.back()[i] = w[i] / wn;
    }
    // x += V y with H y = g by back substitution.
    std::vector<cplx> y(k);
    for (std::size_t i = k; i-- > 0;) {
      cplx t = g[i];
      for (std::size_t j = i + 1; j < k; ++j) t -= h[j][i] * y[j];
      y[i] = t / h[i][i];
    }
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) res.x[i] += y[j] * v[j][i];

    // True residual at the end of every cycle.
    const auto ax = a(res.x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    rnorm = norm2(r);
    res.residuals.back() = rnorm / bnorm;
    if (rnorm / bnorm <= opt.tol || rnorm == 0) break;
    if (res.iterations < opt.max_iters) res.restarts.push_back(res.iterations);
  }
  res.converged = res.residuals.back() <= opt.tol;
  return res;
}

CombinedFieldOperator::CombinedFieldOperator(const Discretization& d, double omega, const EvalOptions& opt)
    : omega_(omega), n_(d.num_density_nodes()), eval_(d, omega, d.density_points(), [&] {
        EvalOptions o = opt;
        o.side = Side::Exterior;
        return o;
      }()) {}

std::vector<cplx> CombinedFieldOperator::operator()(std::span<const cplx> sigma) const {
  if (static_cast<int>(sigma.size()) != n_) throw DomainError("density length must equal the number of density nodes");
  ++applications_;
  LayerDensities dens;
  dens.dlp.assign(sigma.begin(), sigma.end());
  dens.slp.resize(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) dens.slp[i] = I * omega_ * sigma[i];
  return eval_.apply(dens);
}

std::vector<cplx> apply_operator(const Discretization& d, double omega, std::span<const cplx> sigma,
                                 const EvalOptions& opt) {
  return CombinedFieldOperator(d, omega, opt)(sigma);
}

ScatterSolution solve_scatter(const ScatterProblem& pb) {
  if (!(pb.omega > 0)) throw DomainError("omega must be positive");
  ScatterSolution sol;
  sol.disc = pb.extra_split ? pb.disc.split_all() : pb.disc;
  const auto t0 = Clock::now();
  const CombinedFieldOperator op(sol.disc, pb.omega, pb.eval);
  sol.t_setup = seconds_since(t0);

  std::vector<cplx> f;
  for (Vec2 x : sol.disc.density_points()) f.push_back(-pb.incident.value(pb.omega, x));
  const auto t1 = Clock::now();
  GmresResult g = gmres([&](std::span<const cplx> x) { return op(x); }, f, pb.gmres);
  sol.t_solve = seconds_since(t1);
  sol.iterations = g.iterations;
  sol.residuals = g.residuals;
  if (!g.converged) {
    std::ostringstream os;
    os << "GMRES did not reach " << pb.gmres.tol << " in " << g.iterations << " iterations (residual "
       << g.residuals.back() << ")";
    throw SolveError(os.str(), std::move(g.residuals));
  }
  sol.sigma = std::move(g.x);
  sol.eps_sigma = resolution_metric(sol.disc, sol.sigma);
  log_info("scatter: " + std::to_string(sol.sigma.size()) + " unknowns, " + std::to_string(sol.iterations) +
           " iterations");
  return sol;
}

std::vector<cplx> scattered_field(const ScatterSolution& sol, double omega, std::span<const Vec2> targets,
                                  const EvalOptions& opt) {
  LayerDensities dens;
  dens.dlp = sol.sigma;
  dens.slp.resize(sol.sigma.size());
  for (std::size_t i = 0; i < sol.sigma.size(); ++i) dens.slp[i] = I * omega * sol.sigma[i];
  EvalOptions o = opt;
  o.side = Side::Exterior;
  return evaluate_layers(sol.disc, omega, dens, targets, o).values;
}

}  // namespace qbx
