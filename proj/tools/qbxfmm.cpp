#include <algorithm>
#include <iostream>

#include "CLI11.hpp"
#include "qbx/cli.hpp"
#include "qbx/errors.hpp"

namespace {

void common_flags(CLI::App* sub, qbx::cli::RunConfig& c) {
  sub->add_option("--curve", c.curve, "Fourier coefficient file (default: bundled fish)");
  sub->add_option("--placements", c.placements, "Obstacle list, lines 'angle scale tx ty'");
  sub->add_option("--profile", c.profile, "Accuracy preset")->check(CLI::IsMember({"e4", "e7", "e10", "e13"}));
  sub->add_option("--q", c.q, "Density nodes per panel");
  sub->add_option("--p", c.p, "QBX order");
  sub->add_option("--eps", c.eps, "Target accuracy");
  sub->add_option("--geometry-eps", c.geometry_eps, "Panel resolution tolerance (default: --eps)");
  sub->add_option("--qhat", c.qhat, "Source nodes per panel (default: tabulated)");
  sub->add_option("--p-add", c.p_add, "Extra FMM order (default: tabulated)");
  sub->add_option("--omega", c.omega, "Wavenumber");
  sub->add_option("--side", c.side, "exterior, interior or any");
  sub->add_option("--grid", c.grid, "Target grid 'xmin,xmax,ymin,ymax,nx,ny'");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--threads", c.threads, "Thread count (default: all cores)");
  sub->add_option("--seed", c.seed, "Random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QBX-FMM layer potentials for the 2D Helmholtz equation"};
  app.require_subcommand(1);
  qbx::cli::RunConfig c;

  auto* refine = app.add_subcommand("refine", "Build and refine the panel discretization");
  common_flags(refine, c);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a layer potential on a grid");
  common_flags(evaluate, c);
  evaluate->add_option("--kind", c.kind, "slp, dlp or combined");
  evaluate->add_option("--density", c.density, "CSV 're,im' per density node (default: 1)");

  auto* green = app.add_subcommand("green-test", "Green's identity error test");
  common_flags(green, c);
  green->add_option("--targets", c.targets, "grid or none");
  green->add_option("--tol-boundary", c.tol_boundary, "Boundary error limit for the exit code");
  green->add_option("--tol-volume", c.tol_volume, "Volume error limit for the exit code");

  auto* bench = app.add_subcommand("bench", "Scaling benchmark over copies of the curve");
  common_flags(bench, c);
  auto* copies = bench->add_option("--copies", c.copies, "Obstacle counts to sweep")->expected(0, -1);

  auto* scatter = app.add_subcommand("scatter", "Exterior Dirichlet scattering solve");
  common_flags(scatter, c);
  scatter->add_option("--direction", c.direction, "Plane wave direction 'dx,dy'");
  scatter->add_flag("--manufactured", c.manufactured, "Point-source data with a known solution");
  scatter->add_option("--gmres-tol", c.gmres_tol, "GMRES relative residual");
  scatter->add_option("--restart", c.restart, "GMRES restart length");
  scatter->add_option("--max-iters", c.max_iters, "GMRES iteration cap");

  auto* cq = app.add_subcommand("calibrate-qhat", "Calibrate the oversampling table");
  common_flags(cq, c);
  auto* cp = app.add_subcommand("calibrate-padd", "Calibrate the extra FMM order");
  common_flags(cp, c);
  cp->add_option("--geometries", c.geometries, "Random geometries");

  CLI11_PARSE(app, argc, argv);
  c.command = app.get_subcommands().front()->get_name();
  // A bare --copies is an empty sweep; CLI11 reports it as a single empty result.
  const auto& raw = copies->results();
  if (copies->count() > 0 && std::all_of(raw.begin(), raw.end(), [](const std::string& r) { return r.empty() || r == "{}"; }))
    c.copies.clear();
  try {
    const auto r = qbx::cli::run(c);
    std::cout << r.report.dump(2) << '\n';
    return r.exit_code;
  } catch (const qbx::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
