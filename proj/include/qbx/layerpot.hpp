#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qbx/association.hpp"
#include "qbx/geometry.hpp"
#include "qbx/qbxfmm.hpp"

namespace qbx {

enum class LayerKind { SLP, DLP, Combined };

struct EvalOptions {
  double eps = 5e-7;
  int p = 4;
  int p_add = -1;  // negative: tabulated value for p
  Side side = Side::Exterior;
  double eps_assoc = 1e-6;
  int n_max = 30;
};

// Densities on the density grid; an empty vector drops that layer.
struct LayerDensities {
  std::vector<cplx> slp;
  std::vector<cplx> dlp;
};

struct Evaluation {
  std::vector<cplx> values;
  TargetAssociation assoc;
  FmmAudit audit;
  int num_centers = 0;  // centers used by QBX targets
  double t_assoc = 0.0;
  double t_plan = 0.0;
  double t_fmm = 0.0;
  double t_total = 0.0;
};

// Association and FMM plan for a fixed target set, reusable across densities.
// Keeps a pointer to d, which must outlive the evaluator.
class LayerEvaluator {
 public:
  LayerEvaluator(const Discretization& d, double omega, std::span<const Vec2> targets, const EvalOptions& opt,
                 std::span<const Side> sides = {});

  std::vector<cplx> apply(const LayerDensities& dens, FmmAudit* audit = nullptr, double* t_fmm = nullptr) const;

  const TargetAssociation& association() const { return assoc_; }
  int num_centers() const { return plan_.num_centers(); }
  double t_assoc() const { return t_assoc_; }
  double t_plan() const { return t_plan_; }

 private:
  const Discretization* d_;
  double omega_;
  EvalOptions opt_;
  std::vector<Vec2> targets_;
  TargetAssociation assoc_;
  std::vector<int> direct_idx_;
  std::vector<int> center_slot_;  // per target, -1 unless QBX
  FmmPlan plan_;
  double t_assoc_ = 0.0;
  double t_plan_ = 0.0;
};

// S[slp] + D[dlp] at the targets. Targets within an expansion disk use QBX;
// on-surface targets get the one-sided limit for their side preference.
// Throws AssociationError if a target cannot be served.
Evaluation evaluate_layers(const Discretization& d, double omega, const LayerDensities& dens,
                           std::span<const Vec2> targets, const EvalOptions& opt, std::span<const Side> sides = {});

struct LayerPotentialJob {
  LayerKind kind = LayerKind::SLP;
  const Discretization* disc = nullptr;
  std::vector<cplx> density;
  std::vector<Vec2> targets;
  double omega = 1.0;
  EvalOptions options;
};

// SLP: S[s]; DLP: D[s]; Combined: D[s] + i w S[s].
std::vector<cplx> evaluate(const LayerPotentialJob& job);

// Point FMM over the source grid (p_add = 0, no centers), for timing.
double time_point_fmm(const Discretization& d, double omega, std::span<const Vec2> targets, double eps);

// Interior or exterior of the boundary components, exact near the curve.
std::vector<Side> classify_points(const Discretization& d, std::span<const Vec2> pts);

struct Preset {
  std::string name;
  double eps;
  int q;
  int p;
};
const std::vector<Preset>& presets();
const Preset& preset(const std::string& name);

struct GreenErrors {
  double eps_boundary = 0.0;
  double eps_volume = -1.0;  // negative when no volume targets were given
  int n_d = 0, n_s = 0, n_t = 0, n_e = 0;
  double res_slp = 0.0, res_dlp = 0.0;  // resolution of the two densities
  double t_qbx = 0.0;
  std::vector<cplx> boundary_qbx, boundary_exact;
  std::vector<cplx> volume_qbx, volume_exact;
  std::vector<Verdict> volume_verdicts;
};

// u = sum q_j H_0(w |x - x_j|) with x_j inside the obstacles; compares u with
// D[u] - S[du/dn] at the density nodes (exterior limit, quadrature-weighted)
// and at the volume targets (unweighted).
GreenErrors greens_identity_errors(const Discretization& d, double omega, std::span<const Vec2> charge_points,
                                   std::span<const cplx> charges, const EvalOptions& opt,
                                   std::span<const Vec2> volume_targets = {});

// Uniform grid "xmin,xmax,ymin,ymax,nx,ny".
struct Grid {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
  int nx = 0, ny = 0;
  std::vector<Vec2> points() const;
};
Grid parse_grid(const std::string& spec);

// "x,y,Re u,Im u,flag" with flag direct, qbx or failed.
void write_grid_csv(std::ostream& out, std::span<const Vec2> pts, std::span<const cplx> values,
                    std::span<const Verdict> verdicts);

}  // namespace qbx
