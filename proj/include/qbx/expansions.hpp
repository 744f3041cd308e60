#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qbx/types.hpp"

namespace qbx {

// Basis functions about a center: O_n(z) = H_n(w|z|) e^{in arg z} (outgoing)
// and I_n(z) = J_n(w|z|) e^{in arg z} (local). An expansion holds
// u(x) = sum_{|n|<=p} c_n B_n(x - center). Coefficients are stored scaled so
// that small boxes at low frequency stay representable: outgoing entries are
// c_n / s^|n| and local entries are c_n * s^|n|, with s = scale.
enum class ExpansionKind { Outgoing, Local };

struct Expansion {
  ExpansionKind kind = ExpansionKind::Local;
  Vec2 center;
  int order = 0;
  double omega = 0.0;
  double scale = 1.0;
  std::vector<cplx> coeffs;  // index n + order

  static Expansion zero(ExpansionKind kind, Vec2 center, int order, double omega, double scale = 1.0);

  cplx& operator[](int n) { return coeffs[static_cast<std::size_t>(n + order)]; }
  cplx operator[](int n) const { return coeffs[static_cast<std::size_t>(n + order)]; }
  // Unscaled coefficient c_n.
  cplx coefficient(int n) const;
  Expansion& operator+=(const Expansion& o);
};

// Quadrature-weighted point sources. slp and dlp may each be empty; a
// non-empty dlp channel needs normals.
struct SourceBatch {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> weights;
  std::vector<cplx> slp;
  std::vector<cplx> dlp;

  std::size_t size() const { return points.size(); }
  void validate() const;
};

// G(x, y) = (i/4) H_0(w|x - y|) and its normal derivative in y.
cplx slp_kernel(double omega, Vec2 x, Vec2 y);
cplx dlp_kernel(double omega, Vec2 x, Vec2 y, Vec2 ny);
cplx direct_potential(const SourceBatch& b, double omega, Vec2 x);

// Scaled basis values for n = -nmax..nmax at index n + nmax:
// outgoing s^|n| O_n(z), local I_n(z) / s^|n|.
void scaled_basis(ExpansionKind kind, double omega, Vec2 z, int nmax, double s, cplx* out);

// Raw forms on a coefficient array of length 2 p + 1, for callers that keep
// many expansions in one buffer. `kind` is the kind of the expansion formed.
void p2x_raw(ExpansionKind kind, Vec2 center, int p, double omega, double s, const SourceBatch& b,
             std::span<const int> idx, cplx* out);
cplx eval_raw(ExpansionKind kind, Vec2 center, int p, double omega, double s, const cplx* coeffs, Vec2 x);

void p2m_accumulate(Expansion& e, const SourceBatch& b, std::span<const int> idx);
void p2l_accumulate(Expansion& e, const SourceBatch& b, std::span<const int> idx);

Expansion p2m(const SourceBatch& b, Vec2 center, int p, double omega, double scale = 1.0);
Expansion p2l(const SourceBatch& b, Vec2 center, int p, double omega, double scale = 1.0);
// Local expansion about a QBX center of radius r. Throws PreconditionError if
// a source lies inside the disk.
Expansion p2qbx(const SourceBatch& b, Vec2 center, double r, int p, double omega);

// A translation between two centers, precomputed so it can be reused for
// every box pair with the same offset, orders and scales.
struct Translation {
  ExpansionKind from = ExpansionKind::Outgoing;
  ExpansionKind to = ExpansionKind::Outgoing;
  int p_in = 0;
  int p_out = 0;
  std::vector<cplx> seq;      // scaled basis at the offset, index t + p_in + p_out
  std::vector<double> pw;     // s_in^e
  std::vector<double> ratio;  // scale ratio powers
};

Translation make_translation(ExpansionKind from, ExpansionKind to, Vec2 offset, double omega, int p_in,
                             double s_in, int p_out, double s_out);
// out += T in, for coefficient arrays of length 2 p + 1.
void apply_translation(const Translation& t, const cplx* in, cplx* out);

Expansion m2m(const Expansion& e, Vec2 new_center, int p_out, double scale_out);
// Throws PreconditionError when |offset| <= r_in + r_out for validity radii
// given by the caller (pass 0 to skip the check).
Expansion m2l(const Expansion& e, Vec2 new_center, int p_out, double scale_out, double r_in = 0.0,
              double r_out = 0.0);
Expansion l2l(const Expansion& e, Vec2 new_center, int p_out, double scale_out);
Expansion m2qbx(const Expansion& e, Vec2 qbx_center, int p);
Expansion l2qbx(const Expansion& e, Vec2 qbx_center, int p);

cplx eval_expansion(const Expansion& e, Vec2 x);
// (du/dx, du/dy)
std::pair<cplx, cplx> eval_gradient(const Expansion& e, Vec2 x);
cplx eval_normal_derivative(const Expansion& e, Vec2 x, Vec2 n);

}  // namespace qbx
