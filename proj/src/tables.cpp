#include "qbx/tables.hpp"

#include <string>

#include "qbx/errors.hpp"

namespace qbx {

int lookup_qhat(int q, double eps) {
  // Columns: eps = 1e-3, 1e-6, 1e-9, 1e-12
  static const int table[4][4] = {
      {8, 16, 24, 32},
      {12, 24, 32, 40},
      {16, 32, 40, 48},
      {32, 48, 64, 64},
  };
  int row;
  switch (q) {
    case 2: row = 0; break;
    case 4: row = 1; break;
    case 8: row = 2; break;
    case 16: row = 3; break;
    default: throw DomainError("no source quadrature entry for q = " + std::to_string(q));
  }
  if (!(eps > 0.0)) throw DomainError("tolerance must be positive");
  const double cols[4] = {1e-3, 1e-6, 1e-9, 1e-12};
  // Largest tabulated tolerance not exceeding eps; slack absorbs decimal rounding.
  for (int c = 0; c < 4; ++c)
    if (cols[c] <= eps * (1.0 + 1e-12)) return table[row][c];
  return table[row][3];
}

int lookup_padd(int p) {
  if (p < 0) throw DomainError("expansion order must be non-negative");
  if (p <= 4) return 5;
  if (p <= 6) return 15;
  if (p <= 8) return 20;
  return 20 + (p - 8);
}

}  // namespace qbx
