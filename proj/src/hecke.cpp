#include "quatheta/hecke.hpp"

#include <array>

#include "quatheta/error.hpp"
#include "quatheta/exact.hpp"
#include "quatheta/padic.hpp"
#include "quatheta/split.hpp"

namespace qth {

namespace {

// Residue-level shape certificates for multipliers. A T_ell multiplier must
// be a unit of the level order at p; a coset multiplier at p must have
// determinant of valuation exactly one.
void check_level_unit(const ClassSet& cs, const Quat& x) {
  Mat2 e = cs.sp.eval(x);
  uint64_t pm = pp_pow(cs.p, cs.m);
  require(e.c % pm == 0, "hecke-multiplier",
          "multiplier not level-triangular at p");
  require(m2_det(e, cs.sp.qe) % cs.p != 0, "hecke-multiplier",
          "multiplier not a unit at p");
}

void check_valuation_one(const ClassSet& cs, const Quat& x) {
  Mat2 e = cs.sp.eval(x);
  uint64_t det = m2_det(e, cs.sp.qe);
  require(det % cs.p == 0 && (det / cs.p) % cs.p != 0, "hecke-multiplier",
          "multiplier determinant does not have valuation one");
}

}  // namespace

HeckeTable hecke_table(const ClassSet& cs, uint64_t ell) {
  HeckeTable t;
  t.ell = ell;
  t.at_p = (ell == cs.p);
  for (const auto& rep : cs.reps) {
    std::vector<HeckeEntry> row;
    for (const auto& j : neighbors(cs, rep, ell)) {
      auto [cls, x] = reduce_to_class(cs, j);
      if (t.at_p)
        check_valuation_one(cs, x);
      else
        check_level_unit(cs, x);
      row.push_back(HeckeEntry{cls, x});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

HeckeTable up_table(const ClassSet& cs) {
  require(cs.m >= 1, "up-level", "coset table at p needs positive wild level");
  uint64_t p = cs.p;
  uint64_t qe = cs.sp.qe;
  Int pm1 = Int(pp_pow(p, cs.m + 1));
  std::vector<Int> mods = {Int(p), Int(p), pm1, Int(p)};
  HeckeTable t;
  t.ell = p;
  t.at_p = true;
  for (const auto& rep : cs.reps) {
    auto ib = lat_basis(rep);
    std::array<Mat2, 4> im;
    for (int r = 0; r < 4; ++r) im[r] = cs.sp.eval(ib[r]);
    std::vector<HeckeEntry> row;
    for (uint64_t a = 0; a < p; ++a) {
      Mat2 adjh{1, a, 0, p};
      // kernel of v -> adj(h_a) i_p(sum v_r b_r) mod (p, p, p^{m+1}, p):
      // exactly the sublattice landing in h_a * (level order at p)
      IntMat c(4, std::vector<Int>(4));
      for (int r = 0; r < 4; ++r) {
        Mat2 y = m2_mul(adjh, im[r], qe);
        c[r] = {Int(y.a), Int(y.b), Int(y.c), Int(y.d)};
      }
      IntMat k = congruence_kernel(c, mods);
      std::vector<Quat> gens;
      for (const auto& v : k) {
        Quat g{0, 0, 0, 0, 1};
        for (int r = 0; r < 4; ++r) g = q_add(g, q_scale(ib[r], Rat(v[r])));
        gens.push_back(g);
      }
      QLat jlat = lat_from_gens(gens);
      require(lat_det(jlat) / lat_det(rep) == Rat(Int(p) * Int(p)), "up-index",
              "coset ideal index is not p^2");
      auto [cls, x] = reduce_to_class(cs, jlat);
      check_valuation_one(cs, x);
      // i_p(x) = h_a * u with u a level-order unit
      Mat2 w = m2_mul(adjh, cs.sp.eval(x), qe);
      require(w.a % p == 0 && w.b % p == 0 && w.d % p == 0, "up-multiplier",
              "multiplier does not lie in the h_a coset");
      require(Int(w.c) % pm1 == 0, "up-multiplier",
              "multiplier quotient not level-triangular");
      row.push_back(HeckeEntry{static_cast<int>(cls), x});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

IntMat brandt_matrix(const ClassSet& cs, const HeckeTable& t) {
  size_t h = cs.reps.size();
  require(t.rows.size() == h, "brandt-shape", "table does not match class set");
  IntMat b(h, std::vector<Int>(h, 0));
  for (size_t i = 0; i < h; ++i)
    for (const auto& e : t.rows[i]) b[i][e.cls] += 1;
  return b;
}

}
