#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "quatheta/classset.hpp"
#include "quatheta/error.hpp"
#include "quatheta/exact.hpp"
#include "quatheta/family.hpp"
#include "quatheta/forms.hpp"
#include "quatheta/padic.hpp"
#include "quatheta/upoly.hpp"

using namespace qth;

namespace {

// Discriminant-11 instance at p = 7, as in the forms tests.
const ClassSet& cs_level1() {
  static ClassSet cs = build_class_set(3, -143, 7, 0, 8);
  return cs;
}

const ClassSet& cs_level7() {
  static ClassSet cs = build_class_set(3, -143, 7, 1, 8);
  return cs;
}

HeckeContext& ctx_below() {
  static HeckeContext ctx = make_hecke_context(cs_level1(), 6);
  return ctx;
}

HeckeContext& ctx_above() {
  static HeckeContext ctx = make_hecke_context(cs_level7(), 6);
  return ctx;
}

// Weight-2 ordinary seed: the stabilization of the unique elliptic system.
const Stabilization& seed2() {
  static Stabilization st =
      p_stabilize(ctx_below(), ctx_above(), 2, {{2, 5}, {3, 6}}, {2, 3, 5, 13});
  return st;
}

// Independent weight-8 member of the same residual system.
const Stabilization& ref8() {
  static Stabilization st = p_stabilize(
      ctx_below(), ctx_above(), 8, {{2, 5}, {3, 6}, {5, 1}, {7, 5}}, {2, 3, 5});
  return st;
}

const FamilyForm& slice() {
  static FamilyForm fam = family_lift(ctx_above(), seed2().f, 2, 4, 12);
  return fam;
}

// Characteristic polynomial of the weight-2 T_2 action, reduced mod 7,
// computed here from scratch as the oracle for the sieve shape.
std::vector<uint64_t> t2_charpoly_mod7() {
  Mat t = hecke_matrix(ctx_above(), 2, 2);
  size_t n = t.size();
  IntMat a(n, std::vector<Int>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) a[i][j] = Int(t[i][j] % 7);
  std::vector<Int> cp = char_poly(a);
  std::vector<uint64_t> f(cp.size());
  for (size_t i = 0; i < cp.size(); ++i) {
    Int r = cp[i] % 7;
    if (r < 0) r += 7;
    f[i] = r.convert_to<uint64_t>();
  }
  return f;
}

}  // namespace

TEST_CASE("weight-2 drain certificate and sieve shape") {
  const FamilyForm& fam = slice();
  const Eigenform& seed = seed2().f;
  uint64_t pq = pp_pow(7, 4);

  CHECK(fam.lambda2 % 7 != 0);
  // Re-verify the library's own certificate from the outside, at full
  // value precision: weight-2 sampling is exact at any precision.
  PolyForm s2 = specialize_form(fam.phi, 2);
  REQUIRE(s2.v.size() == seed.form.v.size());
  for (size_t i = 0; i < s2.v.size(); ++i)
    CHECK(s2.v[i].c[0] == mulmod(fam.lambda2, seed.form.v[i].c[0] % pq, pq));

  // Both stabilizations of the seed share its T_2 residue, so the branch
  // multiplicity is at least two; the transcript must report exactly the
  // split of the recomputed characteristic polynomial.
  std::vector<uint64_t> f2 = t2_charpoly_mod7();
  CHECK(up_eval(f2, 5, 7) == 0);
  auto [branch, cof] = up_branch_split(f2, 5, 7, 1);
  CHECK(branch.size() >= 3);
  CHECK(branch.size() + cof.size() == f2.size() + 1);
  REQUIRE(fam.transcript.size() == 3);
  CHECK(fam.transcript[0] ==
        "sieve at 2: residue multiplicity " +
            std::to_string(branch.size() - 1) + ", cofactor degree " +
            std::to_string(cof.size() - 1));

  // The construction is deterministic end to end.
  FamilyForm again = family_lift(ctx_above(), seed, 2, 4, 12);
  CHECK(again.lambda2 == fam.lambda2);
  CHECK(again.phi == fam.phi);

  // The Teichmuller average leaves no component in foreign central
  // sectors: the trivial-character weight-4 functional pairs to zero at
  // sampling resolution (scalars act by z^(k-2) only mod 7^m).
  PolyForm s4 = specialize_form(fam.phi, 4);
  for (const auto& a : s4.v)
    for (uint64_t x : a.c) CHECK(x % 49 == 0);
}

TEST_CASE("weight-8 specialization matches the independent extraction") {
  const FamilyForm& fam = slice();
  const Eigenform& w8 = ref8().f;
  // Cell level 2 caps higher-weight values at 7^2.
  uint64_t pm = 49;

  PolyForm s8 = specialize_form(fam.phi, 8);
  size_t pi = 0, pj = 0;
  bool found = false;
  for (size_t i = 0; i < w8.form.v.size() && !found; ++i)
    for (size_t j = 0; j < w8.form.v[i].c.size() && !found; ++j)
      if (w8.form.v[i].c[j] % 7 != 0) {
        pi = i;
        pj = j;
        found = true;
      }
  REQUIRE(found);
  uint64_t lam8 = mulmod(s8.v[pi].c[pj] % pm,
                         inv_unit(w8.form.v[pi].c[pj] % pm, 7, 2), pm);
  CHECK(lam8 % 7 != 0);
  for (size_t i = 0; i < s8.v.size(); ++i)
    for (size_t j = 0; j < s8.v[i].c.size(); ++j)
      CHECK(s8.v[i].c[j] % pm == mulmod(lam8, w8.form.v[i].c[j] % pm, pm));

  // U_p commutes with specialization mod 7^2, so the slice inherits the
  // weight-8 U_p eigenvalue.
  PolyForm u8 = specialize_form(hecke_meas(ctx_above(), 7, fam.phi), 8);
  uint64_t scale = mulmod(w8.up % pm, lam8, pm);
  for (size_t i = 0; i < u8.v.size(); ++i)
    for (size_t j = 0; j < u8.v[i].c.size(); ++j)
      CHECK(u8.v[i].c[j] % pm == mulmod(scale, w8.form.v[i].c[j] % pm, pm));
}

TEST_CASE("value precision equal to the cell level is on the nose") {
  FamilyForm fam = family_lift(ctx_above(), seed2().f, 2, 2, 10);
  const Eigenform& w8 = ref8().f;
  uint64_t pm = 49;

  CHECK(fam.lambda2 % 7 != 0);
  PolyForm s8 = specialize_form(fam.phi, 8);
  size_t pi = 0, pj = 0;
  bool found = false;
  for (size_t i = 0; i < w8.form.v.size() && !found; ++i)
    for (size_t j = 0; j < w8.form.v[i].c.size() && !found; ++j)
      if (w8.form.v[i].c[j] % 7 != 0) {
        pi = i;
        pj = j;
        found = true;
      }
  REQUIRE(found);
  uint64_t lam8 = mulmod(s8.v[pi].c[pj], inv_unit(w8.form.v[pi].c[pj] % pm, 7, 2), pm);
  CHECK(lam8 % 7 != 0);
  for (size_t i = 0; i < s8.v.size(); ++i)
    for (size_t j = 0; j < s8.v[i].c.size(); ++j)
      CHECK(s8.v[i].c[j] == mulmod(lam8, w8.form.v[i].c[j] % pm, pm));
}

TEST_CASE("seed and parameter validation") {
  // Higher-weight seeds are not a base of the slice.
  CHECK_THROWS_AS(family_lift(ctx_above(), ref8().f, 2, 4, 4), Error);
  // A form without U_p (wrong class set, no stabilization) is rejected.
  Eigenform flat = eigenform_extract(ctx_below(), 2, {{2, 5}}, {2});
  CHECK_THROWS_AS(family_lift(ctx_above(), flat, 2, 4, 4), Error);
  // Value precision cannot exceed the context.
  CHECK_THROWS_AS(family_lift(ctx_above(), seed2().f, 2, 9, 4), Error);
}
