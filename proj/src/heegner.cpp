#include "quatheta/heegner.hpp"

#include <algorithm>
#include <cstdlib>

#include "quatheta/error.hpp"
#include "quatheta/exact.hpp"
#include "quatheta/padic.hpp"
#include "quatheta/upoly.hpp"

namespace qth {

namespace {

uint64_t int_residue(const Int& n, uint64_t pe) {
  Int r = n % Int(pe);
  if (r < 0) r += Int(pe);
  return r.convert_to<uint64_t>();
}

uint64_t rat_residue(const Rat& r, uint64_t p, int e, uint64_t pe) {
  uint64_t den = int_residue(denominator(r), pe);
  require(den % p != 0, "heegner-residue", "denominator not a p-unit");
  return mulmod(int_residue(numerator(r), pe), inv_unit(den, p, e), pe);
}

Int ipow(uint64_t b, int k) {
  Int r = 1;
  for (int i = 0; i < k; ++i) r *= Int(b);
  return r;
}

// Primitive reduced forms (a, b, c) of discriminant d < 0: -a < b <= a <= c,
// b >= 0 when a == c, gcd(a, b, c) = 1.
uint64_t bqf_class_number(const Int& d) {
  require(d < 0 && (d % 4 == 0 || ((d % 4) + 4) % 4 == 1), "heegner-disc",
          "not an imaginary quadratic discriminant");
  uint64_t count = 0;
  for (Int a = 1; 3 * a * a <= -d; ++a) {
    for (Int b = 1 - a; b <= a; ++b) {
      Int num = b * b - d;
      if (num % (4 * a) != 0) continue;
      Int c = num / (4 * a);
      if (c < a) continue;
      if (a == c && b < 0) continue;
      if (gcd(gcd(a, abs(b)), c) != 1) continue;
      ++count;
    }
  }
  return count;
}

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

std::vector<uint64_t> prime_factors(uint64_t n) {
  std::vector<uint64_t> out;
  for (uint64_t q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    out.push_back(q);
    while (n % q == 0) n /= q;
  }
  if (n > 1) out.push_back(n);
  return out;
}

// adj(h) i_p(z) h mod p^prec as one congruence row (a, b, c, d).
std::vector<Int> conjugation_row(const ClassSet& cs, const Mat2& adjh,
                                 const Mat2& h, const Quat& z) {
  uint64_t qe = cs.sp.qe;
  Mat2 y = m2_mul(m2_mul(adjh, cs.sp.eval(z), qe), h, qe);
  return {Int(y.a), Int(y.b), Int(y.c), Int(y.d)};
}

void check_adele(const ClassSet& cs, const Mat2& h, int s) {
  require(s >= 0 && s + cs.m <= cs.prec, "heegner-precision",
          "conductor exponent leaves no room below the splitting precision");
  uint64_t ps = pp_pow(cs.p, s);
  uint64_t dv = m2_det(h, cs.sp.qe);
  require(dv % ps == 0 && (dv / ps) % cs.p != 0, "heegner-adele",
          "adele determinant valuation does not match the conductor");
}

}  // namespace

VarsigmaData build_varsigma(const ClassSet& cs, int s) {
  VarsigmaData vs;
  vs.p = cs.p;
  vs.prec = cs.prec;
  vs.pe = cs.sp.qe;
  vs.dk = cs.dk;
  uint64_t pe = vs.pe;
  vs.tr = int_residue(cs.dk, pe);
  vs.nm = int_residue(cs.dk * (cs.dk + 1) / 4, pe);

  // The embedding data below reads matrix entries off the splitting, so the
  // splitting must be in companion form at theta and scaled-shear form at j.
  Quat th = theta_elt(cs.dk);
  Mat2 cth = cs.sp.eval(th);
  require(cth.a == vs.tr && cth.b == negmod(vs.nm, pe) && cth.c == 1 &&
              cth.d == 0,
          "heegner-splitting", "splitting is not in companion form at theta");
  Mat2 cj = cs.sp.eval(Quat{0, 0, 1, 0, 1});
  vs.sqrt_beta = cj.d;
  require(cj.c == 0 && cj.a == negmod(vs.sqrt_beta, pe) &&
              mulmod(vs.sqrt_beta, vs.sqrt_beta, pe) ==
                  int_residue(cs.alg.b, pe),
          "heegner-splitting", "splitting does not pin a square root of beta");

  auto roots = up_roots_mod_p({vs.nm % cs.p, (cs.p - vs.tr % cs.p) % cs.p, 1},
                              cs.p);
  require(roots.size() != 1, "heegner-ramified",
          "the CM prime must not divide the field discriminant");
  vs.split = roots.size() == 2;
  if (vs.split) {
    uint64_t r0 = std::min(roots[0].first, roots[1].first);
    vs.t = hensel_root({vs.nm, negmod(vs.tr, pe), 1}, r0, cs.p, cs.prec);
    vs.tbar = submod(vs.tr, vs.t, pe);
    vs.delta = submod(vs.t, vs.tbar, pe);
    require(vs.delta % cs.p != 0, "heegner-splitting",
            "eigenvalues of theta collide");
    uint64_t di = inv_unit(vs.delta, cs.p, cs.prec);
    vs.idem = m2_scale(m2_sub(cth, m2_scalar(vs.tbar), pe), di, pe);
    Mat2 ee = m2_mul(vs.idem, vs.idem, pe);
    require(ee == vs.idem, "heegner-splitting", "idempotent check failed");
    Mat2 rec = m2_add(m2_scale(vs.idem, vs.t, pe),
                      m2_scale(m2_sub(m2_id(), vs.idem, pe), vs.tbar, pe), pe);
    require(rec == cth, "heegner-splitting",
            "eigen decomposition does not recover theta");
  }
  vs.s = s;
  vs.mat = varsigma_matrix(vs, s);
  return vs;
}

Mat2 varsigma_matrix(const VarsigmaData& vs, int s) {
  require(s >= 0 && s <= vs.prec, "heegner-precision",
          "conductor exponent exceeds the splitting precision");
  uint64_t pe = vs.pe;
  uint64_t ps = pp_pow(vs.p, s) % pe;
  if (vs.split)
    return Mat2{mulmod(vs.t, ps, pe), pe - 1, ps, 0};
  return Mat2{0, 1, negmod(ps, pe), 0};
}

Mat2 z_matrix(const VarsigmaData& vs, int n) {
  require(vs.split, "heegner-split",
          "torus normalizer is recorded for the split case only");
  require(n >= 0 && n <= vs.prec, "heegner-precision",
          "exponent exceeds the splitting precision");
  uint64_t pe = vs.pe;
  uint64_t lower = mulmod(pp_pow(vs.p, n) % pe,
                          mulmod(vs.sqrt_beta, vs.delta, pe), pe);
  return Mat2{1, vs.sqrt_beta, 0, lower};
}

Mat2 idele_matrix(const VarsigmaData& vs, uint64_t u) {
  require(vs.split, "heegner-split",
          "idele components at p are recorded for the split case only");
  require(u % vs.p != 0, "heegner-class", "idele component is not a unit");
  uint64_t pe = vs.pe;
  return m2_add(m2_id(), m2_scale(vs.idem, submod(u % pe, 1, pe), pe), pe);
}

int conductor_exponent(const ClassSet& cs, const Mat2& adele, int s) {
  check_adele(cs, adele, s);
  uint64_t p = cs.p;
  Mat2 adjh = m2_adj(adele, cs.sp.qe);
  Int pss = ipow(p, s);
  std::vector<Int> mods = {pss, pss, pss * ipow(p, cs.m), pss};
  IntMat c = {conjugation_row(cs, adjh, adele, Quat::integer(1)),
              conjugation_row(cs, adjh, adele, theta_elt(cs.dk))};
  IntMat k = congruence_kernel(c, mods);
  // The kernel is the order K cap (adele R_m adele^{-1}) on the basis
  // {1, theta}; a ring containing 1 is Z + f Z theta, so the Hermite form
  // must be diag(1, f) with f a power of p.
  require(k.size() == 2 && k[0][0] == 1 && k[0][1] == 0 && k[1][0] == 0,
          "heegner-optimality", "embedding order is not of conductor shape");
  Int f = k[1][1];
  int c_exp = 0;
  while (f % p == 0) {
    f /= p;
    ++c_exp;
  }
  require(f == 1, "heegner-optimality",
          "embedding order conductor is not a p power");
  return c_exp;
}

bool wild_optimal(const ClassSet& cs, const Mat2& adele, int s, int cexp) {
  check_adele(cs, adele, s);
  require(cexp >= 0 && cexp <= s, "heegner-precision",
          "conductor exponent exceeds the adele valuation");
  uint64_t p = cs.p;
  Mat2 adjh = m2_adj(adele, cs.sp.qe);
  // Units of Z + p^cexp O_K whose conjugate under the adele is integral,
  // triangular mod p^m, and 1 mod p^m in the upper left. Both sides of the
  // congruence condition contain 1, so compare lattices of differences:
  // adj(h) i(z) h picks up the determinant's p^s on top of each entry
  // condition.
  Int pc = ipow(p, s + cs.m);
  Int pi = ipow(p, s);
  std::vector<Int> mods = {pc, pi, pc, pi};
  Quat cth = q_scale(theta_elt(cs.dk), Rat(ipow(p, cexp)));
  IntMat c = {conjugation_row(cs, adjh, adele, Quat::integer(1)),
              conjugation_row(cs, adjh, adele, cth)};
  IntMat k = congruence_kernel(c, mods);
  // Inside Z + p^cexp O_K the units congruent to 1 mod p^m O_K differ from
  // 1 by p^m Z + p^max(m,cexp) Z theta: diag(p^m, p^max(m-cexp,0)) on this
  // basis.
  Int e1 = ipow(p, cs.m);
  Int e2 = ipow(p, std::max(cs.m - cexp, 0));
  return k.size() == 2 && k[0][0] == e1 && k[0][1] == 0 && k[1][0] == 0 &&
         k[1][1] == e2;
}

GrossPoint gross_point(const ClassSet& cs, const VarsigmaData& vs, int n) {
  require(vs.p == cs.p && vs.prec == cs.prec, "heegner-level",
          "embedding data does not match the class set");
  require(n >= 0, "heegner-level", "negative conductor exponent");
  GrossPoint pt;
  pt.n = n;
  pt.m = cs.m;
  pt.s = n + cs.m;
  pt.adele = varsigma_matrix(vs, pt.s);
  require(conductor_exponent(cs, pt.adele, pt.s) == pt.s,
          "heegner-optimality", "point misses its conductor");
  require(wild_optimal(cs, pt.adele, pt.s, pt.s), "heegner-optimality",
          "point fails the wild unit congruence");
  return pt;
}

PicardGroupData picard_group(const VarsigmaData& vs, int n) {
  require(vs.split, "heegner-split",
          "class groups are built for split CM primes only");
  require(n >= 0, "heegner-level", "negative level");
  require(bqf_class_number(-vs.dk) == 1, "heegner-order",
          "construction requires class number one");
  PicardGroupData g;
  g.n = n;
  g.p = vs.p;
  if (n == 0) {
    g.grp = FinAbGroup::make({1});
    g.unit = {1};
    g.ideal_ell = {1};
    g.ideal_r = {0};
    return g;
  }
  uint64_t p = vs.p;
  g.pn = pp_pow(p, n);
  uint64_t w = vs.dk == 3 ? 3 : vs.dk == 4 ? 2 : 1;
  require((p - 1) % w == 0, "heegner-order",
          "unit torsion does not embed at the split prime");
  g.order = (p - 1) / w;
  for (int i = 1; i < n; ++i) g.order *= p;

  // A generator of the units mod p^2 generates them mod every power.
  uint64_t p2 = p * p;
  uint64_t full = p * (p - 1);
  for (uint64_t cand = 2;; ++cand) {
    bool ok = true;
    for (uint64_t q : prime_factors(full))
      if (powmod(cand, full / q, p2) == 1) ok = false;
    if (ok) {
      g.gen = cand;
      break;
    }
  }
  g.grp = FinAbGroup::make({static_cast<uint32_t>(g.order)});
  g.unit.resize(g.order);
  for (uint64_t i = 0; i < g.order; ++i) g.unit[i] = powmod(g.gen, i, g.pn);

  // Formula cross-check: the full unit group mod p^n has order p^{n-1}(p-1)
  // and the quotient collapses exactly the torsion image, of order w.
  uint64_t fulln = p - 1;
  for (int i = 1; i < n; ++i) fulln *= p;
  require(g.order * w == fulln, "heegner-order",
          "class count disagrees with the unit index formula");

  // One split prime ideal (ell, theta - r) per class, found through the
  // norm form of Z[theta]; the class of its idele is lambda_bar / lambda
  // at the place of t for a generator lambda = a + b theta.
  g.ideal_ell.assign(g.order, 0);
  g.ideal_r.assign(g.order, 0);
  uint64_t tn = vs.t % g.pn, tbn = vs.tbar % g.pn;
  uint64_t filled = 0;
  int64_t disc = -vs.dk.convert_to<int64_t>();
  int64_t trz = vs.dk.convert_to<int64_t>();
  for (uint64_t ell = 2; filled < g.order; ++ell) {
    require(ell < 200000, "heegner-ideal-reps",
            "ran out of split primes for ideal representatives");
    if (ell == 2 || ell == p || !is_prime_u64(ell)) continue;
    if (vs.dk % Int(ell) == 0) continue;
    uint64_t dres = ((disc % int64_t(ell)) + int64_t(ell)) % int64_t(ell);
    if (powmod(dres, (ell - 1) / 2, ell) != 1) continue;
    bool found = false;
    for (int64_t b = 1; !found && uint64_t(-disc) * uint64_t(b * b) <= 4 * ell;
         ++b) {
      Int da = 4 * Int(ell) + Int(disc) * Int(b) * Int(b);
      Int rt = floor_sqrt(Rat(da));
      if (rt * rt != da) continue;
      // both roots: the two generators with this theta coefficient lie over
      // the two primes above ell
      for (int sign = -1; sign <= 1 && !found; sign += 2) {
        Int a2 = -Int(trz) * b + sign * rt;
        if (a2 % 2 != 0) continue;
        int64_t a = (a2 / 2).convert_to<int64_t>();
        int64_t pn = int64_t(g.pn);
        uint64_t lam =
            uint64_t(((a + int64_t(b) * int64_t(tn)) % pn + pn) % pn);
        uint64_t lamb =
            uint64_t(((a + int64_t(b) * int64_t(tbn)) % pn + pn) % pn);
        uint64_t u = mulmod(lamb, inv_unit(lam, p, n), g.pn);
        uint64_t idx = unit_class(g, u);
        if (g.ideal_ell[idx] != 0) continue;
        int64_t bi = ((b % int64_t(ell)) + int64_t(ell)) % int64_t(ell);
        int64_t ai = ((a % int64_t(ell)) + int64_t(ell)) % int64_t(ell);
        uint64_t r = mulmod(uint64_t((int64_t(ell) - ai) % int64_t(ell)),
                            inv_unit(uint64_t(bi), ell, 1), ell);
        g.ideal_ell[idx] = ell;
        g.ideal_r[idx] = r;
        ++filled;
        found = true;
      }
    }
  }
  return g;
}

uint64_t unit_class(const PicardGroupData& g, uint64_t u) {
  if (g.n == 0) return 0;
  require(u % g.p != 0, "heegner-class", "not a unit at p");
  uint64_t un = u % g.pn;
  // torsion image = the subgroup generated by gen^order
  uint64_t w = powmod(g.gen, g.order, g.pn);
  std::vector<uint64_t> tors = {1};
  for (uint64_t x = w; x != 1; x = mulmod(x, w, g.pn)) tors.push_back(x);
  for (uint64_t i = 0; i < g.order; ++i) {
    uint64_t q = mulmod(un, inv_unit(g.unit[i], g.p, g.n), g.pn);
    if (std::find(tors.begin(), tors.end(), q) != tors.end()) return i;
  }
  require(false, "heegner-class", "unit misses every class");
  return 0;
}

GrossPoint galois_translate(const VarsigmaData& vs, const PicardGroupData& g,
                            const GrossPoint& pt, uint64_t cls) {
  require(g.n == pt.s, "heegner-level",
          "translation labels must live at the point's conductor level");
  require(cls < g.order, "heegner-class", "class index out of range");
  GrossPoint out = pt;
  out.adele = m2_mul(pt.adele, idele_matrix(vs, g.unit[cls]), vs.pe);
  return out;
}

PointCoset reduce_point(const ClassSet& cs, const GrossPoint& pt) {
  check_adele(cs, pt.adele, pt.s);
  uint64_t p = cs.p, qe = cs.sp.qe;
  int s = pt.s;
  uint64_t ps = pp_pow(p, s);
  Mat2 adjh = m2_adj(pt.adele, qe);
  Int pss = ipow(p, s);
  std::vector<Int> mods = {pss, pss, pss * ipow(p, cs.m), pss};
  auto ib = lat_basis(cs.order);
  IntMat c(4);
  for (int r = 0; r < 4; ++r) {
    Mat2 y = m2_mul(adjh, cs.sp.eval(ib[r]), qe);
    c[r] = {Int(y.a), Int(y.b), Int(y.c), Int(y.d)};
  }
  IntMat k = congruence_kernel(c, mods);
  std::vector<Quat> gens;
  for (const auto& v : k) {
    Quat gq{0, 0, 0, 0, 1};
    for (int r = 0; r < 4; ++r) gq = q_add(gq, q_scale(ib[r], Rat(v[r])));
    gens.push_back(gq);
  }
  QLat jlat = lat_from_gens(gens);
  require(lat_det(jlat) / lat_det(cs.order) == Rat(pss * pss),
          "heegner-reduction", "congruence ideal index is not p^{2s}");
  auto [cls, x] = reduce_to_class(cs, jlat);

  // adele = i_p(x) u with u a unit of the level order: divide the p^s and
  // the unit part of nrd(x) out of adj(i_p(x)) adele.
  PointCoset out;
  out.cls = cls;
  out.val_e = cs.prec - s;
  require(out.val_e >= 1, "heegner-precision",
          "no value precision remains below the splitting precision");
  uint64_t pet = pp_pow(p, out.val_e);
  Rat nr = q_nrd(cs.alg, x);
  Int num = numerator(nr);
  for (int i = 0; i < s; ++i) {
    require(num % p == 0, "heegner-reduction",
            "multiplier norm valuation is short");
    num /= p;
  }
  uint64_t ru = rat_residue(Rat(num, denominator(nr)), p, out.val_e, pet);
  Mat2 w = m2_mul(m2_adj(cs.sp.eval(x), qe), pt.adele, qe);
  require(w.a % ps == 0 && w.b % ps == 0 && w.c % ps == 0 && w.d % ps == 0,
          "heegner-reduction", "multiplier does not carry the adele");
  Mat2 u{w.a / ps % pet, w.b / ps % pet, w.c / ps % pet, w.d / ps % pet};
  out.u = m2_scale(u, inv_unit(ru, p, out.val_e), pet);
  require(m2_det(out.u, pet) % p != 0, "heegner-unit",
          "point multiplier is not a local unit");
  require(out.u.c % pp_pow(p, cs.m) == 0, "heegner-unit",
          "point multiplier leaves the level monoid");
  if (cs.m >= 1)
    require(out.u.a % p != 0, "heegner-unit",
            "point multiplier upper left is not a unit");
  return out;
}

Poly evaluate_at_point(HeckeContext& ctx, const PolyForm& f,
                       const GrossPoint& pt) {
  const ClassSet& cs = *ctx.cs;
  require(f.v.size() == cs.reps.size(), "heegner-shape",
          "form does not match the class set");
  PointCoset pc = reduce_point(cs, pt);
  require(f.v[0].e <= pc.val_e, "heegner-precision",
          "coefficient precision exceeds the point's value precision");
  return act_pk(f.v[pc.cls], m2_reduce(pc.u, f.v[0].pe));
}

FiniteMeasure evaluate_at_point(HeckeContext& ctx, const MeasForm& f,
                                const GrossPoint& pt) {
  const ClassSet& cs = *ctx.cs;
  require(f.v.size() == cs.reps.size(), "heegner-shape",
          "form does not match the class set");
  PointCoset pc = reduce_point(cs, pt);
  require(f.v[0].prec <= pc.val_e && f.v[0].m <= pc.val_e,
          "heegner-precision",
          "measure precision exceeds the point's value precision");
  return pushforward(f.v[pc.cls], pc.u);
}

Poly evaluate_at_point(HeckeContext& ctx, const PolyForm& f,
                       const VarsigmaData& vs, const PicardGroupData& g,
                       const GrossPoint& pt, uint64_t cls) {
  return evaluate_at_point(ctx, f, galois_translate(vs, g, pt, cls));
}

}
