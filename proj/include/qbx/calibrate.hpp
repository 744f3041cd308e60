#pragma once

#include <cstdint>
#include <vector>

namespace qbx {

// Smallest source order q-hat whose QBX coefficient integrals on two model
// panels (straight, and a unit-length arc of the unit circle) agree with the
// next larger order to relative eps. Unit-length panels, q centers at distance
// 1/4 (one side of the straight panel, both sides of the arc), densities
// P_0..P_{q-1}, coefficients |l| <= p.
struct QhatOptions {
  double omega = 5.0;
  int p = -1;  // negative: the preset QBX order for q
  int step = 4;
  int max_qhat = 256;
};
int calibrate_qhat(int q, double eps, const QhatOptions& opt = {});

struct QhatTable {
  std::vector<int> q;
  std::vector<double> eps;
  std::vector<std::vector<int>> qhat;  // [q][eps]
};
QhatTable calibrate_qhat_table(const std::vector<int>& qs, const std::vector<double>& epss,
                               const QhatOptions& opt = {});

// Smallest p_add meeting eps in Green's identity near the boundary of random
// star-shaped curves r = 5 + sum_{j=1}^{12} d_j sin(j theta), d_j ~ U[-0.2, 0.2].
struct PaddOptions {
  int p = 4;
  int q = 4;
  double eps = 5e-7;
  double omega = 5.0;
  int geometries = 20;
  std::uint64_t seed = 1;
  int max_padd = 12;
};

struct PaddGeometry {
  int panels = 0;
  double reference_error = 0.0;   // converged FMM, same discretization
  std::vector<double> errors;     // per p_add = 0..max_padd, up to the first success
  int min_padd = -1;              // -1 if none up to max_padd
};

struct PaddReport {
  PaddOptions options;
  int tabulated = 0;
  std::vector<PaddGeometry> rows;
  int max_required = -1;
  bool tabulated_sufficient = false;
};
PaddReport calibrate_padd(const PaddOptions& opt = {});

}  // namespace qbx
