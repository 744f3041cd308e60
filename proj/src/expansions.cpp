#include "qbx/expansions.hpp"

#include <cmath>
#include <string>

#include "qbx/errors.hpp"
#include "qbx/specfun.hpp"

namespace qbx {

namespace {

constexpr cplx quarter_i{0.0, 0.25};

double sign_of(int n) { return (n < 0 && (n & 1)) ? -1.0 : 1.0; }

// s^e for e >= 0 and possibly negative e via 1/s.
double ipow(double s, int e) { return e >= 0 ? std::pow(s, e) : std::pow(1.0 / s, -e); }

void require_same_omega(double a, double b) {
  if (a != b) throw DomainError("expansions with different wavenumbers cannot be combined");
}

}  // namespace

Expansion Expansion::zero(ExpansionKind kind, Vec2 center, int order, double omega, double scale) {
  if (order < 0) throw DomainError("expansion order must be non-negative");
  if (!(scale > 0.0) || scale > 1.0) throw DomainError("expansion scale must lie in (0, 1]");
  Expansion e;
  e.kind = kind;
  e.center = center;
  e.order = order;
  e.omega = omega;
  e.scale = scale;
  e.coeffs.assign(static_cast<std::size_t>(2 * order + 1), cplx{});
  return e;
}

cplx Expansion::coefficient(int n) const {
  int a = std::abs(n);
  return kind == ExpansionKind::Outgoing ? (*this)[n] * ipow(scale, a) : (*this)[n] * ipow(scale, -a);
}

Expansion& Expansion::operator+=(const Expansion& o) {
  require_same_omega(omega, o.omega);
  if (kind != o.kind || order != o.order || scale != o.scale || !(center == o.center))
    throw DomainError("adding incompatible expansions");
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
  return *this;
}

void SourceBatch::validate() const {
  const std::size_t n = points.size();
  if (weights.size() != n) throw DomainError("source weights misaligned");
  if (!slp.empty() && slp.size() != n) throw DomainError("single-layer density misaligned");
  if (!dlp.empty() && (dlp.size() != n || normals.size() != n)) throw DomainError("double-layer density misaligned");
}

cplx slp_kernel(double omega, Vec2 x, Vec2 y) { return quarter_i * hankel1_01(omega * dist(x, y)).h0; }

cplx dlp_kernel(double omega, Vec2 x, Vec2 y, Vec2 ny) {
  Vec2 d = x - y;
  double r = norm(d);
  return quarter_i * omega * hankel1_01(omega * r).h1 * (dot(ny, d) / r);
}

cplx direct_potential(const SourceBatch& b, double omega, Vec2 x) {
  cplx u{};
  for (std::size_t j = 0; j < b.size(); ++j) {
    Vec2 d = x - b.points[j];
    double r = norm(d);
    Hankel01 h = hankel1_01(omega * r);
    cplx s{};
    if (!b.slp.empty()) s += b.slp[j] * h.h0;
    if (!b.dlp.empty()) s += b.dlp[j] * omega * h.h1 * (dot(b.normals[j], d) / r);
    u += b.weights[j] * s;
  }
  return quarter_i * u;
}

void scaled_basis(ExpansionKind kind, double omega, Vec2 z, int nmax, double s, cplx* out) {
  const double r = norm(z);
  const double x = omega * r;
  const cplx phase = r > 0 ? cplx(z.x / r, z.y / r) : cplx(1.0, 0.0);
  thread_local std::vector<cplx> f;
  thread_local std::vector<double> j;
  f.resize(static_cast<std::size_t>(nmax + 1));
  if (kind == ExpansionKind::Outgoing) {
    hankel1_scaled(x, nmax, s, f.data());
  } else {
    j.resize(static_cast<std::size_t>(nmax + 1));
    bessel_j_scaled(x, nmax, s, j.data());
    for (int n = 0; n <= nmax; ++n) f[n] = j[n];
  }
  cplx e{1.0, 0.0};
  out[nmax] = f[0];
  for (int n = 1; n <= nmax; ++n) {
    e *= phase;
    out[nmax + n] = f[n] * e;
    out[nmax - n] = sign_of(-n) * f[n] * std::conj(e);
  }
}

namespace {

// For a source at z = y - c the coefficients are
// (i/4)(-1)^n [sigma B_{-n}(z) + mu (w/2)(nu B_{-n-1}(z) - conj(nu) B_{-n+1}(z))]
// with nu = n_x + i n_y and B the basis of the opposite kind, all scaled.
void p2x_body(ExpansionKind kind, Vec2 center, int p, double w, double s, const SourceBatch& b,
              std::span<const int> idx, cplx* out) {
  const ExpansionKind basis = kind == ExpansionKind::Outgoing ? ExpansionKind::Local : ExpansionKind::Outgoing;
  const int nb = p + 1;
  const bool has_slp = !b.slp.empty(), has_dlp = !b.dlp.empty();
  thread_local std::vector<cplx> f;
  thread_local std::vector<double> up, dn;
  f.resize(static_cast<std::size_t>(2 * nb + 1));
  // The dipole terms at n use B_{-n-1} and B_{-n+1}, whose scaling differs
  // from that of entry n by one power of s.
  const int sgn_scale = (basis == ExpansionKind::Local) ? 1 : -1;
  up.resize(static_cast<std::size_t>(2 * p + 1));
  dn.resize(static_cast<std::size_t>(2 * p + 1));
  for (int n = -p; n <= p; ++n) {
    up[n + p] = ipow(s, sgn_scale * (std::abs(n + 1) - std::abs(n)));
    dn[n + p] = ipow(s, sgn_scale * (std::abs(n - 1) - std::abs(n)));
  }
  for (int j : idx) {
    const auto uj = static_cast<std::size_t>(j);
    scaled_basis(basis, w, b.points[uj] - center, nb, s, f.data());
    const cplx sig = has_slp ? b.weights[uj] * b.slp[uj] : cplx{};
    const cplx mu = has_dlp ? b.weights[uj] * b.dlp[uj] * (w / 2) : cplx{};
    const cplx nu = has_dlp ? cplx(b.normals[uj].x, b.normals[uj].y) : cplx{};
    const cplx* fc = f.data() + nb;
    for (int n = -p; n <= p; ++n) {
      cplx v = sig * fc[-n];
      if (has_dlp) v += mu * (nu * fc[-n - 1] * up[n + p] - std::conj(nu) * fc[-n + 1] * dn[n + p]);
      out[n + p] += ((n & 1) ? -quarter_i : quarter_i) * v;
    }
  }
}

std::vector<int> all_indices(const SourceBatch& b) {
  std::vector<int> idx(b.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}

}  // namespace

void p2x_raw(ExpansionKind kind, Vec2 center, int p, double omega, double s, const SourceBatch& b,
             std::span<const int> idx, cplx* out) {
  p2x_body(kind, center, p, omega, s, b, idx, out);
}

cplx eval_raw(ExpansionKind kind, Vec2 center, int p, double omega, double s, const cplx* coeffs, Vec2 x) {
  thread_local std::vector<cplx> f;
  f.resize(static_cast<std::size_t>(2 * p + 1));
  scaled_basis(kind, omega, x - center, p, s, f.data());
  cplx u{};
  for (int i = 0; i <= 2 * p; ++i) u += coeffs[i] * f[static_cast<std::size_t>(i)];
  return u;
}

void p2m_accumulate(Expansion& e, const SourceBatch& b, std::span<const int> idx) {
  if (e.kind != ExpansionKind::Outgoing) throw DomainError("p2m needs an outgoing expansion");
  b.validate();
  p2x_body(e.kind, e.center, e.order, e.omega, e.scale, b, idx, e.coeffs.data());
}

void p2l_accumulate(Expansion& e, const SourceBatch& b, std::span<const int> idx) {
  if (e.kind != ExpansionKind::Local) throw DomainError("p2l needs a local expansion");
  b.validate();
  p2x_body(e.kind, e.center, e.order, e.omega, e.scale, b, idx, e.coeffs.data());
}

Expansion p2m(const SourceBatch& b, Vec2 center, int p, double omega, double scale) {
  Expansion e = Expansion::zero(ExpansionKind::Outgoing, center, p, omega, scale);
  p2m_accumulate(e, b, all_indices(b));
  return e;
}

Expansion p2l(const SourceBatch& b, Vec2 center, int p, double omega, double scale) {
  Expansion e = Expansion::zero(ExpansionKind::Local, center, p, omega, scale);
  p2l_accumulate(e, b, all_indices(b));
  return e;
}

Expansion p2qbx(const SourceBatch& b, Vec2 center, double r, int p, double omega) {
  for (std::size_t j = 0; j < b.size(); ++j)
    if (dist(b.points[j], center) < r * (1 - 1e-8))
      throw PreconditionError("source " + std::to_string(j) + " lies inside the QBX disk");
  return p2l(b, center, p, omega, 1.0);
}

// Graf's theorem in the form used here, for |B| < |U|:
//   O_n(U + B) = sum_m O_m(U) I_{n-m}(B),   I_n(U + B) = sum_m I_m(U) I_{n-m}(B),
// and for |U| < |B|: O_n(U + B) = sum_m I_m(U) O_{n-m}(B). With offset
// d = new_center - old_center this gives
//   outgoing -> outgoing:  a'_n = sum_k a_k I_{k-n}(d)
//   outgoing -> local:     b_m  = sum_k a_k O_{k-m}(d)
//   local -> local:        b'_j = sum_m b_m I_{m-j}(d)
// The scale factors below keep every power of s_in non-negative; only the
// ratio powers can exceed one, when s_out > s_in.
Translation make_translation(ExpansionKind from, ExpansionKind to, Vec2 offset, double omega, int p_in,
                             double s_in, int p_out, double s_out) {
  if (from == ExpansionKind::Local && to == ExpansionKind::Outgoing)
    throw DomainError("no local-to-outgoing translation");
  Translation t;
  t.from = from;
  t.to = to;
  t.p_in = p_in;
  t.p_out = p_out;
  const int tmax = p_in + p_out;
  t.seq.resize(static_cast<std::size_t>(2 * tmax + 1));
  ExpansionKind basis = (from == ExpansionKind::Outgoing && to == ExpansionKind::Local) ? ExpansionKind::Outgoing
                                                                                         : ExpansionKind::Local;
  scaled_basis(basis, omega, offset, tmax, s_in, t.seq.data());
  t.pw.resize(static_cast<std::size_t>(2 * tmax + 1));
  for (int e = 0; e <= 2 * tmax; ++e) t.pw[e] = std::pow(s_in, e);
  const double q = (from == ExpansionKind::Outgoing && to == ExpansionKind::Outgoing) ? s_in / s_out : s_out / s_in;
  t.ratio.resize(static_cast<std::size_t>(p_out + 1));
  for (int e = 0; e <= p_out; ++e) t.ratio[e] = std::pow(q, e);
  return t;
}

void apply_translation(const Translation& t, const cplx* in, cplx* out) {
  const int pi_ = t.p_in, po = t.p_out, tmax = pi_ + po;
  const cplx* seq = t.seq.data() + tmax;
  const bool m2m = t.from == ExpansionKind::Outgoing && t.to == ExpansionKind::Outgoing;
  const bool m2l = t.from == ExpansionKind::Outgoing && t.to == ExpansionKind::Local;
  for (int n = -po; n <= po; ++n) {
    const int an = std::abs(n);
    cplx acc{};
    for (int k = -pi_; k <= pi_; ++k) {
      const int ak = std::abs(k), at = std::abs(k - n);
      int e;
      if (m2m)
        e = ak + at - an;
      else if (m2l)
        e = ak + an - at;
      else
        e = at + an - ak;
      acc += in[k + pi_] * seq[k - n] * t.pw[static_cast<std::size_t>(e)];
    }
    out[n + po] += acc * t.ratio[static_cast<std::size_t>(an)];
  }
}

namespace {

Expansion translate(const Expansion& e, ExpansionKind to, Vec2 c, int p_out, double s_out) {
  Expansion out = Expansion::zero(to, c, p_out, e.omega, s_out);
  Translation t = make_translation(e.kind, to, c - e.center, e.omega, e.order, e.scale, p_out, s_out);
  apply_translation(t, e.coeffs.data(), out.coeffs.data());
  return out;
}

}  // namespace

Expansion m2m(const Expansion& e, Vec2 c, int p_out, double s_out) {
  if (e.kind != ExpansionKind::Outgoing) throw DomainError("m2m needs an outgoing expansion");
  return translate(e, ExpansionKind::Outgoing, c, p_out, s_out);
}

Expansion m2l(const Expansion& e, Vec2 c, int p_out, double s_out, double r_in, double r_out) {
  if (e.kind != ExpansionKind::Outgoing) throw DomainError("m2l needs an outgoing expansion");
  if ((r_in > 0 || r_out > 0) && dist(c, e.center) <= r_in + r_out)
    throw PreconditionError("m2l between overlapping regions");
  return translate(e, ExpansionKind::Local, c, p_out, s_out);
}

Expansion l2l(const Expansion& e, Vec2 c, int p_out, double s_out) {
  if (e.kind != ExpansionKind::Local) throw DomainError("l2l needs a local expansion");
  return translate(e, ExpansionKind::Local, c, p_out, s_out);
}

Expansion m2qbx(const Expansion& e, Vec2 c, int p) { return m2l(e, c, p, 1.0); }

Expansion l2qbx(const Expansion& e, Vec2 c, int p) { return l2l(e, c, p, 1.0); }

cplx eval_expansion(const Expansion& e, Vec2 x) {
  return eval_raw(e.kind, e.center, e.order, e.omega, e.scale, e.coeffs.data(), x);
}

// (d/dx + i d/dy) B_n = -w B_{n+1} and (d/dx - i d/dy) B_n = w B_{n-1}.
std::pair<cplx, cplx> eval_gradient(const Expansion& e, Vec2 x) {
  const int p = e.order, nb = p + 1;
  const double s = e.scale;
  std::vector<cplx> f(static_cast<std::size_t>(2 * nb + 1));
  scaled_basis(e.kind, e.omega, x - e.center, nb, s, f.data());
  const int sg = (e.kind == ExpansionKind::Local) ? 1 : -1;
  cplx plus{}, minus{};
  for (int n = -p; n <= p; ++n) {
    const int an = std::abs(n);
    plus += e[n] * f[static_cast<std::size_t>(n + 1 + nb)] * ipow(s, sg * (std::abs(n + 1) - an));
    minus += e[n] * f[static_cast<std::size_t>(n - 1 + nb)] * ipow(s, sg * (std::abs(n - 1) - an));
  }
  plus *= -e.omega;
  minus *= e.omega;
  return {(plus + minus) / 2.0, (plus - minus) / cplx(0.0, 2.0)};
}

cplx eval_normal_derivative(const Expansion& e, Vec2 x, Vec2 n) {
  auto [dx, dy] = eval_gradient(e, x);
  return n.x * dx + n.y * dy;
}

}  // namespace qbx
