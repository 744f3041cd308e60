#pragma once

namespace qbx {

// Oversampled source-grid order q-hat for density order q and tolerance eps.
// eps selects the column of the largest tabulated tolerance <= eps
// (clamped at both ends). q must be one of 2, 4, 8, 16.
int lookup_qhat(int q, double eps);

// Extra expansion order for the FMM-side QBX expansions. Tabulated for
// p = 2, 4, 6, 8; other p <= 8 use the next larger entry and p > 8 uses
// 20 + (p - 8).
int lookup_padd(int p);

}  // namespace qbx
