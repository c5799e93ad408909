#include "quatheta/split.hpp"

#include <algorithm>

#include "quatheta/error.hpp"
#include "quatheta/padic.hpp"

namespace qth {

Mat2 m2_id() { return {1, 0, 0, 1}; }

Mat2 m2_scalar(uint64_t s) { return {s, 0, 0, s}; }

Mat2 m2_add(const Mat2& x, const Mat2& y, uint64_t m) {
  return {addmod(x.a, y.a, m), addmod(x.b, y.b, m), addmod(x.c, y.c, m),
          addmod(x.d, y.d, m)};
}

Mat2 m2_sub(const Mat2& x, const Mat2& y, uint64_t m) {
  return {submod(x.a, y.a, m), submod(x.b, y.b, m), submod(x.c, y.c, m),
          submod(x.d, y.d, m)};
}

Mat2 m2_mul(const Mat2& x, const Mat2& y, uint64_t m) {
  return {addmod(mulmod(x.a, y.a, m), mulmod(x.b, y.c, m), m),
          addmod(mulmod(x.a, y.b, m), mulmod(x.b, y.d, m), m),
          addmod(mulmod(x.c, y.a, m), mulmod(x.d, y.c, m), m),
          addmod(mulmod(x.c, y.b, m), mulmod(x.d, y.d, m), m)};
}

Mat2 m2_scale(const Mat2& x, uint64_t s, uint64_t m) {
  return {mulmod(x.a, s, m), mulmod(x.b, s, m), mulmod(x.c, s, m),
          mulmod(x.d, s, m)};
}

uint64_t m2_det(const Mat2& x, uint64_t m) {
  return submod(mulmod(x.a, x.d, m), mulmod(x.b, x.c, m), m);
}

Mat2 m2_adj(const Mat2& x, uint64_t m) {
  return {x.d, negmod(x.b, m), negmod(x.c, m), x.a};
}

Mat2 m2_inv(const Mat2& x, uint64_t p, int e) {
  uint64_t m = pp_pow(p, e);
  uint64_t det = m2_det(x, m);
  require(det % p != 0, "m2-not-unit", "matrix determinant not a unit");
  return m2_scale(m2_adj(x, m), inv_unit(det, p, e), m);
}

Mat2 m2_reduce(const Mat2& x, uint64_t m) {
  return {x.a % m, x.b % m, x.c % m, x.d % m};
}

namespace {

int max_digits(uint64_t q) {
  uint64_t lim = (uint64_t(1) << 62) - 1;
  lim = 2 * lim + 1;  // 2^63 - 1
  int e = 0;
  uint64_t m = 1;
  while (m <= lim / q) { m *= q; ++e; }
  return e;
}

uint64_t int_residue(const Int& n, const Int& qe) {
  Int r = n % qe;
  if (r < 0) r += qe;
  return r.convert_to<uint64_t>();
}

uint64_t rat_residue(const Rat& r, uint64_t q, int e, const Int& qe) {
  Int den = denominator(r);
  require(den % q != 0, "residue-den", "denominator not a unit at q");
  uint64_t dn = int_residue(den, qe);
  uint64_t nm = int_residue(numerator(r), qe);
  return mulmod(nm, inv_unit(dn, q, e), qe.convert_to<uint64_t>());
}

int val_of(uint64_t x, uint64_t q, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (x % q == 0) { x /= q; ++v; }
  return v;
}

int legendre_u(uint64_t u, uint64_t q) {
  return powmod(u % q, (q - 1) / 2, q) == 1 ? 1 : -1;
}

// Square root of beta = 1 mod 8 in Z/2^E, the root that is 1 mod 4.
uint64_t sqrt_2adic(uint64_t beta, int E) {
  require(E >= 3 && beta % 8 == 1, "sqrt2-shape", "need 1 mod 8");
  uint64_t mask_all = (E >= 64) ? ~uint64_t(0) : ((uint64_t(1) << E) - 1);
  uint64_t r = 1;
  for (int k = 3; k < E; ++k) {
    uint64_t diff = (r * r - beta) & (((uint64_t(1) << (k + 1)) - 1));
    if (diff >> k & 1) r += uint64_t(1) << (k - 1);
  }
  r &= mask_all;
  return r;
}

struct AlgSplit {
  std::array<Mat2, 4> img;
  RatMat carrier;  // rows: carrier basis coordinates over (1, i, j, k)
  int eff;         // digits of validity (<= E)
};

RatMat quats_to_rows(const std::vector<Quat>& qs) {
  RatMat m(qs.size(), std::vector<Rat>(4));
  for (size_t r = 0; r < qs.size(); ++r) {
    auto c = q_coords(qs[r]);
    for (int s = 0; s < 4; ++s) m[r][s] = c[s];
  }
  return m;
}

AlgSplit theta_form_raw(const QuatAlg& alg, const Int& dk, uint64_t q, int E,
                        const Int& qeI) {
  uint64_t qe = qeI.convert_to<uint64_t>();
  uint64_t beta = int_residue(alg.b, qeI);
  uint64_t s;
  if (q == 2) {
    s = sqrt_2adic(beta, E);
  } else {
    auto root = unit_sqrt(beta, q, E);
    require(root.has_value(), "theta-beta", "beta not a square at q");
    s = *root;
  }
  uint64_t tr = int_residue(dk, qeI);
  uint64_t nm = int_residue(dk * (dk + 1) / 4, qeI);
  Mat2 mth{tr, negmod(nm, qe), 1, 0};
  Mat2 mj{negmod(s, qe), mulmod(s, tr, qe), 0, s};
  AlgSplit out;
  out.img = {m2_id(), mth, mj, m2_mul(mth, mj, qe)};
  Quat one = Quat::integer(1);
  Quat th = theta_elt(dk);
  Quat j{0, 0, 1, 0, 1};
  out.carrier = quats_to_rows({one, th, j, q_mul(alg, th, j)});
  out.eff = E;
  return out;
}

AlgSplit diag_form_raw(const QuatAlg& alg, uint64_t q, int E, const Int& qeI) {
  uint64_t qe = qeI.convert_to<uint64_t>();
  uint64_t a = int_residue(alg.a, qeI);
  auto root = unit_sqrt(a, q, E);
  require(root.has_value(), "diag-a", "first constant not a square at q");
  uint64_t s = *root;
  uint64_t b = int_residue(alg.b, qeI);
  Mat2 mi{s, 0, 0, negmod(s, qe)};
  Mat2 mj{0, b, 1, 0};
  AlgSplit out;
  out.img = {m2_id(), mi, mj, m2_mul(mi, mj, qe)};
  out.carrier = rat_from_int(int_identity(4));
  out.eff = E;
  return out;
}

// Norm-equation form at odd q with a, b nonsquare units: find a x^2 + b y^2
// = 1, set u = x i + y j (so u^2 = 1), and realize the splitting as left
// multiplication on B (1 + u) / 2.
AlgSplit generic_form_raw(const QuatAlg& alg, uint64_t q, int E, const Int& qeI) {
  uint64_t qe = qeI.convert_to<uint64_t>();
  uint64_t a = int_residue(alg.a, qeI), b = int_residue(alg.b, qeI);
  require(a % q != 0 && b % q != 0, "generic-units", "constants not units at q");
  uint64_t x0 = 0, y0 = 0;
  bool found = false;
  for (uint64_t x = 0; x < q && !found; ++x)
    for (uint64_t y = 0; y < q && !found; ++y) {
      if (x == 0 && y == 0) continue;
      uint64_t f = addmod(mulmod(a % q, mulmod(x, x, q), q),
                          mulmod(b % q, mulmod(y, y, q), q), q);
      if (f == 1 % q) { x0 = x; y0 = y; found = true; }
    }
  require(found, "generic-norm", "norm equation has no solution mod q");
  // Newton on the coordinate with unit gradient.
  bool on_x = x0 % q != 0;
  for (int it = 0; it < 2 * E + 4; ++it) {
    uint64_t f = submod(addmod(mulmod(a, mulmod(x0, x0, qe), qe),
                               mulmod(b, mulmod(y0, y0, qe), qe), qe),
                        1 % qe, qe);
    if (f == 0) break;
    if (on_x) {
      uint64_t g = mulmod(2 % qe, mulmod(a, x0, qe), qe);
      x0 = submod(x0, mulmod(f, inv_unit(g, q, E), qe), qe);
    } else {
      uint64_t g = mulmod(2 % qe, mulmod(b, y0, qe), qe);
      y0 = submod(y0, mulmod(f, inv_unit(g, q, E), qe), qe);
    }
  }
  {
    uint64_t f = submod(addmod(mulmod(a, mulmod(x0, x0, qe), qe),
                               mulmod(b, mulmod(y0, y0, qe), qe), qe),
                        1 % qe, qe);
    require(f == 0, "generic-newton", "norm equation lift did not converge");
  }
  uint64_t inv2 = inv_unit(2 % qe, q, E);
  // Coordinates of the generators e, i e, j e, k e of V = B e.
  std::array<std::array<uint64_t, 4>, 4> gen;
  std::array<uint64_t, 4> e0 = {inv2, mulmod(x0, inv2, qe), mulmod(y0, inv2, qe), 0};
  for (int m = 0; m < 4; ++m) {
    Quat em;
    (m == 0 ? em.x : m == 1 ? em.y : m == 2 ? em.z : em.w) = 1;
    RatMat lm = lmul_matrix(alg, em);
    for (int s = 0; s < 4; ++s) {
      uint64_t acc = 0;
      for (int r = 0; r < 4; ++r)
        acc = addmod(acc, mulmod(e0[r], rat_residue(lm[r][s], q, E, qeI), qe), qe);
      gen[m][s] = acc;
    }
  }
  // Two-step q-adic column reduction to a basis (v1, v2) of the span.
  int r0 = -1, c0 = -1, v0 = E;
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) {
      int v = val_of(gen[r][s], q, E);
      if (v < v0) { v0 = v; r0 = r; c0 = s; }
    }
  require(v0 < E, "generic-degenerate", "module generators vanish");
  std::array<uint64_t, 4> v1 = gen[r0];
  uint64_t p1u = v1[c0];
  for (int t = 0; t < v0; ++t) p1u /= q;
  uint64_t p1ui = inv_unit(p1u, q, E);
  std::array<std::array<uint64_t, 4>, 4> red = gen;
  std::array<bool, 4> alive{true, true, true, true};
  alive[r0] = false;
  for (int r = 0; r < 4; ++r) {
    if (!alive[r]) continue;
    uint64_t w = red[r][c0];
    for (int t = 0; t < v0; ++t) {
      require(w % q == 0, "generic-val", "pivot valuation not minimal");
      w /= q;
    }
    uint64_t f = mulmod(w, p1ui, qe);
    for (int s = 0; s < 4; ++s)
      red[r][s] = submod(red[r][s], mulmod(f, v1[s], qe), qe);
  }
  int r1 = -1, c1 = -1, vv1 = E;
  for (int r = 0; r < 4; ++r) {
    if (!alive[r]) continue;
    for (int s = 0; s < 4; ++s) {
      if (s == c0) continue;
      int v = val_of(red[r][s], q, E);
      if (v < vv1) { vv1 = v; r1 = r; c1 = s; }
    }
  }
  require(vv1 < E, "generic-rank", "module has rank below 2");
  std::array<uint64_t, 4> v2 = red[r1];
  uint64_t p2u = v2[c1];
  for (int t = 0; t < vv1; ++t) p2u /= q;
  uint64_t p2ui = inv_unit(p2u, q, E);
  int eff = E - v0 - vv1;
  // Express z in the basis: z = al v1 + be v2 (checked to working precision).
  uint64_t qeff = pp_pow(q, eff);
  auto solve2 = [&](const std::array<uint64_t, 4>& z, uint64_t& al, uint64_t& be) {
    uint64_t w = z[c0];
    for (int t = 0; t < v0; ++t) {
      require(w % q == 0, "generic-solve", "coefficient not integral");
      w /= q;
    }
    al = mulmod(w, p1ui, qe);
    std::array<uint64_t, 4> z2;
    for (int s = 0; s < 4; ++s)
      z2[s] = submod(z[s], mulmod(al, v1[s], qe), qe);
    uint64_t w2 = z2[c1];
    for (int t = 0; t < vv1; ++t) {
      require(w2 % q == 0, "generic-solve", "coefficient not integral");
      w2 /= q;
    }
    be = mulmod(w2, p2ui, qe);
    for (int s = 0; s < 4; ++s) {
      uint64_t rem = submod(z2[s], mulmod(be, v2[s], qe), qe);
      require(rem % qeff == 0, "generic-span", "vector leaves the module");
    }
    al %= qeff;
    be %= qeff;
  };
  AlgSplit out;
  out.carrier = rat_from_int(int_identity(4));
  out.eff = eff;
  for (int m = 0; m < 4; ++m) {
    Quat em;
    (m == 0 ? em.x : m == 1 ? em.y : m == 2 ? em.z : em.w) = 1;
    RatMat lm = lmul_matrix(alg, em);
    auto act = [&](const std::array<uint64_t, 4>& v) {
      std::array<uint64_t, 4> z;
      for (int s = 0; s < 4; ++s) {
        uint64_t acc = 0;
        for (int r = 0; r < 4; ++r)
          acc = addmod(acc, mulmod(v[r], rat_residue(lm[r][s], q, E, qeI), qe), qe);
        z[s] = acc;
      }
      return z;
    };
    uint64_t a11, a21, a12, a22;
    solve2(act(v1), a11, a21);
    solve2(act(v2), a12, a22);
    out.img[m] = {a11, a12, a21, a22};
  }
  return out;
}

int rat_val_q(const Rat& r, uint64_t q) {
  if (r == 0) return 0;
  Int num = numerator(r), den = denominator(r);
  Int qq(q);
  int v = 0;
  while (num % qq == 0) { num /= qq; ++v; }
  while (den % qq == 0) { den /= qq; --v; }
  return v;
}

}  // namespace

Mat2 LocalSplitting::eval(const Quat& x) const {
  auto v = q_coords(x);
  Mat2 acc{0, 0, 0, 0};
  Int qeI(qe);
  for (int s = 0; s < 4; ++s) {
    Rat c = 0;
    for (int r = 0; r < 4; ++r) c += v[r] * coord_inv[r][s];
    if (c == 0) continue;
    uint64_t cs = rat_residue(c, q, e, qeI);
    acc = m2_add(acc, m2_scale(img[s], cs, qe), qe);
  }
  return acc;
}

namespace {

LocalSplitting finish_splitting(const QuatAlg& alg, const QLat& order,
                                uint64_t q, int e, const AlgSplit& raw, int E,
                                const Int& qEI) {
  uint64_t qE = qEI.convert_to<uint64_t>();
  // Coordinates of the order basis over the carrier basis.
  RatMat ob(4, std::vector<Rat>(4));
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) ob[r][s] = Rat(order.b[r][s], order.den);
  auto cinv = rat_inverse(raw.carrier);
  require(cinv.has_value(), "split-carrier", "carrier basis singular");
  RatMat C = rat_mul(ob, *cinv);
  int t = 0;
  for (const auto& row : C)
    for (const auto& v : row) t = std::max(t, -rat_val_q(v, q));
  Int qt = 1;
  for (int i = 0; i < t; ++i) qt *= q;
  std::array<Mat2, 4> M;
  for (int r = 0; r < 4; ++r) {
    Mat2 acc{0, 0, 0, 0};
    for (int s = 0; s < 4; ++s) {
      Rat scaled = C[r][s] * qt;
      if (scaled == 0) continue;
      uint64_t cs = rat_residue(scaled, q, E, qEI);
      acc = m2_add(acc, m2_scale(raw.img[s], cs, qE), qE);
    }
    M[r] = acc;  // q^t times the image of basis vector r
  }
  int eff = raw.eff;
  auto unit_cert = [&](const std::array<Mat2, 4>& im) {
    // det mod q of the 4x4 coefficient matrix of the images
    uint64_t m[4][4];
    for (int r = 0; r < 4; ++r) {
      m[r][0] = im[r].a % q; m[r][1] = im[r].b % q;
      m[r][2] = im[r].c % q; m[r][3] = im[r].d % q;
    }
    // Gaussian elimination mod q
    uint64_t det = 1;
    for (int col = 0, row = 0; col < 4 && row < 4; ++col) {
      int piv = -1;
      for (int r = row; r < 4; ++r)
        if (m[r][col] != 0) { piv = r; break; }
      if (piv < 0) return false;
      if (piv != row)
        for (int s = 0; s < 4; ++s) std::swap(m[piv][s], m[row][s]);
      det = mulmod(det, m[row][col], q);
      uint64_t inv = inv_unit(m[row][col], q, 1);
      for (int r = row + 1; r < 4; ++r) {
        uint64_t f = mulmod(m[r][col], inv, q);
        for (int s = 0; s < 4; ++s)
          m[r][s] = submod(m[r][s], mulmod(f, m[row][s], q), q);
      }
      ++row;
    }
    return det != 0;
  };
  if (t > 0 || !unit_cert(M)) {
    // Conjugate by a basis of the column lattice spanned by the images.
    std::array<std::array<uint64_t, 2>, 4> w;
    for (int r = 0; r < 4; ++r) w[r] = {M[r].a, M[r].c};
    int r0 = -1, c0 = -1, v0 = E;
    for (int r = 0; r < 4; ++r)
      for (int s = 0; s < 2; ++s) {
        int v = val_of(w[r][s], q, E);
        if (v < v0) { v0 = v; r0 = r; c0 = s; }
      }
    require(v0 < E, "split-lattice", "image column lattice degenerate");
    std::array<uint64_t, 2> P = w[r0];
    uint64_t pu = P[c0];
    for (int i = 0; i < v0; ++i) pu /= q;
    uint64_t pui = inv_unit(pu, q, E);
    int r1 = -1, v1 = E;
    int c1 = 1 - c0;
    std::array<std::array<uint64_t, 2>, 4> red = w;
    for (int r = 0; r < 4; ++r) {
      if (r == r0) continue;
      uint64_t f = red[r][c0];
      for (int i = 0; i < v0; ++i) {
        require(f % q == 0, "split-pivot", "pivot valuation not minimal");
        f /= q;
      }
      f = mulmod(f, pui, qE);
      for (int s = 0; s < 2; ++s)
        red[r][s] = submod(red[r][s], mulmod(f, P[s], qE), qE);
      int v = val_of(red[r][c1], q, E);
      if (v < v1) { v1 = v; r1 = r; }
    }
    require(v1 < E, "split-lattice", "image column lattice has rank 1");
    std::array<uint64_t, 2> Q2 = red[r1];
    Mat2 g;
    if (c0 == 0) g = {P[0], Q2[0], P[1], Q2[1]};
    else g = {Q2[0], P[0], Q2[1], P[1]};
    uint64_t det = m2_det(g, qE);
    int s = v0 + v1;
    uint64_t qs = pp_pow(q, s);
    require(det % qs == 0, "split-det", "unexpected determinant valuation");
    uint64_t du = det / qs;
    require(du % q != 0, "split-det", "unexpected determinant valuation");
    uint64_t dui = inv_unit(du, q, E);
    uint64_t qst = qs;
    for (int i = 0; i < t; ++i) qst *= q;
    Mat2 adjg = m2_adj(g, qE);
    eff = std::min(eff, E - s - t);
    require(eff >= e, "split-precision", "not enough working precision");
    for (int r = 0; r < 4; ++r) {
      Mat2 n = m2_mul(m2_mul(adjg, M[r], qE), g, qE);
      auto dv = [&](uint64_t x) {
        require(x % qst == 0, "split-stable", "conjugated image not integral");
        return mulmod(x / qst, dui, qE);
      };
      M[r] = {dv(n.a), dv(n.b), dv(n.c), dv(n.d)};
    }
    require(unit_cert(M), "split-not-maximal",
            "order does not map onto the full matrix ring");
  }
  require(eff >= e, "split-precision", "not enough working precision");
  LocalSplitting sp;
  sp.q = q;
  sp.e = e;
  sp.qe = pp_pow(q, e);
  sp.order = order;
  auto oinv = rat_inverse(ob);
  require(oinv.has_value(), "split-order-basis", "order basis singular");
  sp.coord_inv = *oinv;
  for (int r = 0; r < 4; ++r) sp.img[r] = m2_reduce(M[r], sp.qe);
  // Homomorphism certificate on the basis.
  auto bs = lat_basis(order);
  require(sp.eval(Quat::integer(1)) == m2_id(), "split-hom", "unit image wrong");
  for (int r = 0; r < 4; ++r)
    for (int s2 = 0; s2 < 4; ++s2) {
      Mat2 lhs = m2_mul(sp.img[r], sp.img[s2], sp.qe);
      Mat2 rhs = sp.eval(q_mul(alg, bs[r], bs[s2]));
      require(lhs == rhs, "split-hom", "basis products disagree");
    }
  return sp;
}

}  // namespace

LocalSplitting split_theta_form(const QuatAlg& alg, const Int& dk,
                                const QLat& order, uint64_t q, int e) {
  int E = std::min(e + 8, max_digits(q));
  require(E >= e, "split-precision", "requested precision too large for q");
  Int qEI = 1;
  for (int i = 0; i < E; ++i) qEI *= q;
  AlgSplit raw = theta_form_raw(alg, dk, q, E, qEI);
  return finish_splitting(alg, order, q, e, raw, E, qEI);
}

LocalSplitting split_order(const QuatAlg& alg, const Int& dk,
                           const QLat& order, uint64_t q, int e) {
  require(hilbert_symbol(alg.a, alg.b, Int(q)) == 1, "split-ramified",
          "algebra is ramified at q");
  int E = std::min(e + 8, max_digits(q));
  require(E >= e, "split-precision", "requested precision too large for q");
  Int qEI = 1;
  for (int i = 0; i < E; ++i) qEI *= q;
  Int qI(q);
  bool b_unit = alg.b % qI != 0;
  bool a_unit = alg.a % qI != 0;
  AlgSplit raw;
  if (q == 2) {
    Int r = alg.b % 8;
    if (r < 0) r += 8;
    require(r == 1, "split-unsupported", "no splitting construction at 2");
    raw = theta_form_raw(alg, dk, q, E, qEI);
  } else if (b_unit && legendre_u(int_residue(alg.b, qI), q) == 1) {
    raw = theta_form_raw(alg, dk, q, E, qEI);
  } else if (a_unit && legendre_u(int_residue(alg.a, qI), q) == 1) {
    raw = diag_form_raw(alg, q, E, qEI);
  } else if (a_unit && b_unit) {
    raw = generic_form_raw(alg, q, E, qEI);
  } else {
    fail("split-unsupported", "no splitting construction at q");
  }
  return finish_splitting(alg, order, q, e, raw, E, qEI);
}

QLat eichler_order(const QLat& omax, const LocalSplitting& sp, int m) {
  require(m >= 0 && m <= sp.e, "eichler-level", "level exceeds splitting precision");
  Int qm = 1;
  for (int i = 0; i < m; ++i) qm *= sp.q;
  IntMat cond(5, std::vector<Int>(1));
  for (int r = 0; r < 4; ++r) cond[r][0] = Int(sp.img[r].c % pp_pow(sp.q, m));
  cond[4][0] = qm;
  IntMat ker = left_kernel(cond);
  require(ker.size() == 4, "eichler-rank", "level condition kernel wrong rank");
  auto bs = lat_basis(omax);
  std::vector<Quat> gens;
  for (const auto& row : ker) {
    Quat g{0, 0, 0, 0, 1};
    for (int r = 0; r < 4; ++r) g = q_add(g, q_scale(bs[r], Rat(row[r])));
    gens.push_back(g);
  }
  return lat_from_gens(gens);
}

}
