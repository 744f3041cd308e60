#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace qbx::cli {

struct RunConfig {
  std::string command;
  std::string curve;       // Fourier coefficient file; empty means the bundled fish
  std::string placements;  // optional "angle scale tx ty" lines, one obstacle each
  std::string profile;     // e4, e7, e10, e13; overrides q, p, eps
  int q = 4;
  int p = 4;
  double eps = 5e-7;
  double geometry_eps = -1;  // panel resolution tolerance; negative: eps
  int qhat = 0;              // 0: tabulated
  int p_add = -1;            // negative: tabulated
  double omega = 12.43;
  std::string side = "exterior";
  std::string grid;             // "xmin,xmax,ymin,ymax,nx,ny"
  std::string targets = "grid";  // grid or none
  std::string kind = "slp";      // evaluate: slp, dlp or combined
  std::string density;           // evaluate: CSV "re,im" per density node; empty means 1
  std::string out;               // output directory; empty writes nothing to disk
  int threads = 0;               // 0: all cores
  std::uint64_t seed = 1;
  // Tolerances checked for the exit code; negative: preset default or none.
  double tol_boundary = -1;
  double tol_volume = -1;
  // scatter
  std::string direction = "-2,1";
  bool manufactured = false;
  double gmres_tol = 1e-5;
  int restart = 200;
  int max_iters = 2000;
  // bench
  std::vector<int> copies = {1, 2, 4, 8};
  // calibrations
  int geometries = 20;
};

struct CommandResult {
  nlohmann::ordered_json report;   // deterministic for a fixed configuration
  nlohmann::ordered_json timings;  // wall-clock figures, kept apart from the report
  int exit_code = 0;
};

CommandResult cmd_refine(const RunConfig& cfg);
CommandResult cmd_evaluate(const RunConfig& cfg);
CommandResult cmd_green_test(const RunConfig& cfg);
CommandResult cmd_bench(const RunConfig& cfg);
CommandResult cmd_scatter(const RunConfig& cfg);
CommandResult cmd_calibrate_qhat(const RunConfig& cfg);
CommandResult cmd_calibrate_padd(const RunConfig& cfg);

// Dispatches on cfg.command, applies the thread count, writes report.json and
// timings.json under cfg.out when set.
CommandResult run(const RunConfig& cfg);

}  // namespace qbx::cli
