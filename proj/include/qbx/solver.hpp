#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qbx/errors.hpp"
#include "qbx/geometry.hpp"
#include "qbx/layerpot.hpp"

namespace qbx {

// Plane wave exp(i w d.x), or a sum of point sources q_j H_0(w |x - x_j|).
struct IncidentField {
  enum class Kind { PlaneWave, PointSources };
  Kind kind = Kind::PlaneWave;
  Vec2 direction{1.0, 0.0};
  std::vector<Vec2> points;
  std::vector<cplx> charges;

  static IncidentField plane_wave(Vec2 direction);
  static IncidentField point_sources(std::vector<Vec2> points, std::vector<cplx> charges);
  cplx value(double omega, Vec2 x) const;
};

struct GmresOptions {
  double tol = 1e-5;
  int restart = 200;
  int max_iters = 2000;
};

struct GmresResult {
  std::vector<cplx> x;
  int iterations = 0;
  // Relative residual |b - A x| / |b| after each iteration, starting with the
  // initial guess; the GMRES estimate within a cycle, recomputed at restarts.
  std::vector<double> residuals;
  std::vector<int> restarts;  // iteration index of each restart
  bool converged = false;
};

using LinearOperator = std::function<std::vector<cplx>(std::span<const cplx>)>;

// Restarted GMRES with modified Gram-Schmidt and Givens rotations, zero
// initial guess. Does not throw on non-convergence; check converged.
GmresResult gmres(const LinearOperator& a, std::span<const cplx> b, const GmresOptions& opt = {});

// Combined-field operator on the density grid: the exterior limit of
// D[s] + i w S[s], which equals s/2 + D*s + i w S*s.
class CombinedFieldOperator {
 public:
  CombinedFieldOperator(const Discretization& d, double omega, const EvalOptions& opt = {});
  std::vector<cplx> operator()(std::span<const cplx> sigma) const;
  int size() const { return n_; }
  int applications() const { return applications_; }

 private:
  double omega_;
  int n_;
  LayerEvaluator eval_;
  mutable int applications_ = 0;
};

std::vector<cplx> apply_operator(const Discretization& d, double omega, std::span<const cplx> sigma,
                                 const EvalOptions& opt = {});

struct ScatterProblem {
  Discretization disc;  // refined to the conditions for omega
  double omega = 1.0;
  IncidentField incident;
  GmresOptions gmres;
  EvalOptions eval;
  bool extra_split = true;  // one more uniform subdivision before solving
};

struct SolveError : ConvergenceError {
  SolveError(const std::string& what, std::vector<double> history)
      : ConvergenceError(what), residuals(std::move(history)) {}
  std::vector<double> residuals;
};

struct ScatterSolution {
  Discretization disc;  // the grid sigma lives on
  std::vector<cplx> sigma;
  int iterations = 0;
  std::vector<double> residuals;
  double eps_sigma = 0.0;  // resolution of sigma
  double t_setup = 0.0;
  double t_solve = 0.0;
};

// Exterior Dirichlet problem u_sc = -u_inc on the boundary, u_sc = D[s] + i w S[s].
// Throws SolveError, carrying the residual history, if GMRES does not converge.
ScatterSolution solve_scatter(const ScatterProblem& problem);

// u_sc at exterior targets; targets on or near the boundary use the exterior limit.
std::vector<cplx> scattered_field(const ScatterSolution& sol, double omega, std::span<const Vec2> targets,
                                  const EvalOptions& opt = {});

}  // namespace qbx
