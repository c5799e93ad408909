#include "quatheta/family.hpp"

#include <string>
#include <utility>
#include <vector>

#include "quatheta/error.hpp"
#include "quatheta/exact.hpp"
#include "quatheta/padic.hpp"
#include "quatheta/upoly.hpp"

namespace qth {

namespace {

uint64_t int_residue(const Int& n, uint64_t pe) {
  Int r = n % pe;
  if (r < 0) r += pe;
  return r.convert_to<uint64_t>();
}

// Characteristic polynomial of T_ell on the weight-2 space, mod p. Weight 2
// has one coordinate per class and every form there is legal, so its roots
// are the residues of the full spectrum at this level.
std::vector<uint64_t> tame_charpoly_modp(HeckeContext& ctx, uint64_t ell) {
  Mat t = hecke_matrix(ctx, ell, 2);
  size_t n = t.size();
  IntMat a(n, std::vector<Int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) a[i][j] = Int(t[i][j]);
  std::vector<Int> cp = char_poly(a);
  std::vector<uint64_t> f(cp.size());
  for (size_t i = 0; i < cp.size(); ++i) f[i] = int_residue(cp[i], ctx.cs->p);
  return f;
}

// The unique (p-1)-th root of unity congruent to c mod p, mod p^m.
uint64_t teichmuller(uint64_t c, uint64_t p, int m, uint64_t pm) {
  uint64_t t = c % pm;
  for (int i = 1; i < m; ++i) t = powmod(t, p, pm);
  return t;
}

// Average over the central Teichmuller scalars. A scalar z multiplies the
// weight-k specialization by z^(k-2); the seed branch lives at weights
// congruent to 2 mod p-1, so the average fixes it exactly and annihilates
// the other tame central sectors.
MeasForm tame_center_average(const MeasForm& f, uint64_t p) {
  int m = f.v[0].m, prec = f.v[0].prec;
  uint64_t pm = f.v[0].pm, pe = f.v[0].pe;
  MeasForm out = f;
  for (uint64_t c = 2; c < p; ++c) {
    uint64_t z = teichmuller(c, p, m, pm);
    for (size_t i = 0; i < f.v.size(); ++i)
      out.v[i] = meas_add(out.v[i], weight_act(f.v[i], z));
  }
  return mform_scale(out, inv_unit((p - 1) % pe, p, prec));
}

// Horner evaluation of g(T_ell) f, ascending coefficients, keeping at most
// two full forms alive beside the argument.
MeasForm apply_tame_poly(HeckeContext& ctx, uint64_t ell,
                         const std::vector<uint64_t>& g, const MeasForm& f) {
  uint64_t pe = f.v[0].pe;
  MeasForm acc = mform_scale(f, g.back() % pe);
  for (size_t i = g.size() - 1; i-- > 0;) {
    acc = hecke_meas(ctx, ell, acc);
    if (g[i] % pe != 0) acc = mform_add(acc, mform_scale(f, g[i] % pe));
  }
  return acc;
}

struct Sieve {
  uint64_t ell = 0;
  std::vector<uint64_t> cof;  // unit-branch cofactor, coefficients mod p
  uint64_t inv = 0;           // inverse of cof(a_ell), the seed branch scale
};

}  // namespace

FamilyForm family_lift(HeckeContext& ctx, const Eigenform& seed, int m_cells,
                       int prec, int rounds) {
  const ClassSet& cs = *ctx.cs;
  require(cs.m >= 1, "family-level",
          "family lift needs a level divisible by p");
  require(seed.k == 2 && seed.has_up, "family-seed",
          "lift needs a weight-2 seed with a U_p eigenvalue");
  require(seed.form.v.size() == cs.reps.size(), "family-seed",
          "seed does not live on this class set");
  require(seed.up % cs.p != 0, "family-seed", "seed is not ordinary");
  require(m_cells >= 1 && prec >= 1 && prec <= ctx.e && rounds >= 1,
          "family-precision", "family parameters out of range");

  uint64_t p = cs.p, pe = pp_pow(p, prec);
  FamilyForm out;
  out.seed = seed;

  std::vector<Sieve> sieves;
  for (uint64_t ell : {2, 3}) {
    require(seed.a.count(ell) != 0, "family-seed",
            "seed is missing the tame eigenvalue at " + std::to_string(ell));
    std::vector<uint64_t> f = tame_charpoly_modp(ctx, ell);
    uint64_t r = seed.a.at(ell) % p;
    require(up_eval(f, r, p) == 0, "family-sieve",
            "seed residue is outside the weight-2 spectrum");
    auto [branch, cof] = up_branch_split(f, r, p, 1);
    out.transcript.push_back(
        "sieve at " + std::to_string(ell) + ": residue multiplicity " +
        std::to_string(branch.size() - 1) + ", cofactor degree " +
        std::to_string(cof.size() - 1));
    if (cof.size() == 1) continue;  // nothing foreign to drain at ell
    uint64_t at_seed = up_eval(cof, seed.a.at(ell) % pe, pe);
    sieves.push_back({ell, cof, inv_unit(at_seed, p, prec)});
  }
  uint64_t up_inv = inv_unit(seed.up % pe, p, prec);

  size_t pivot = seed.form.v.size();
  for (size_t i = 0; i < seed.form.v.size(); ++i)
    if (seed.form.v[i].c[0] % p != 0) {
      pivot = i;
      break;
    }
  require(pivot < seed.form.v.size(), "family-seed",
          "seed form has no unit coordinate");

  static const std::pair<uint64_t, uint64_t> kCells[] = {
      {1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}, {3, 1}, {1, 3}, {2, 3}};
  for (auto [cx, cy] : kCells) {
    MeasForm phi = mform_zero(cs, m_cells, prec);
    for (size_t i = 0; i < phi.v.size(); ++i)
      meas_set(phi.v[i], cx, cy, seed.form.v[i].c[0] % pe);
    phi = tame_center_average(symmetrize_meas(ctx, phi), p);

    for (int r = 0; r < rounds; ++r) {
      phi = mform_scale(hecke_meas(ctx, p, phi), up_inv);
      for (const Sieve& s : sieves)
        phi = mform_scale(apply_tame_poly(ctx, s.ell, s.cof, phi), s.inv);
    }

    PolyForm s2 = specialize_form(phi, 2);
    uint64_t lam = mulmod(s2.v[pivot].c[0],
                          inv_unit(seed.form.v[pivot].c[0] % pe, p, prec), pe);
    if (lam % p == 0) continue;  // drained to a non-unit: retry the cell
    bool match = true;
    for (size_t i = 0; i < s2.v.size() && match; ++i)
      match = s2.v[i].c[0] == mulmod(lam, seed.form.v[i].c[0] % pe, pe);
    require(match, "family-spec2",
            "weight-2 specialization is not a multiple of the seed");
    out.phi = std::move(phi);
    out.lambda2 = lam;
    out.transcript.push_back("dirac cell (" + std::to_string(cx) + "," +
                             std::to_string(cy) + "), " +
                             std::to_string(rounds) + " rounds");
    return out;
  }
  fail("family-degenerate",
       "every Dirac lift drained to a non-unit weight-2 scalar");
}

}  // namespace qth
