#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "quatheta/classset.hpp"
#include "quatheta/error.hpp"
#include "quatheta/forms.hpp"
#include "quatheta/hecke.hpp"
#include "quatheta/padic.hpp"

using namespace qth;

namespace {

struct Rng {
  uint64_t s = 0x243f6a8885a308d3ull;
  uint64_t next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return s >> 11;
  }
};

// Discriminant-11 instance at p = 7: level-1 and level-p class sets.
const ClassSet& cs_level1() {
  static ClassSet cs = build_class_set(3, -143, 7, 0, 8);
  return cs;
}

const ClassSet& cs_level7() {
  static ClassSet cs = build_class_set(3, -143, 7, 1, 8);
  return cs;
}

PolyForm random_pform(Rng& rng, const ClassSet& cs, int k, int e) {
  PolyForm f = pform_zero(cs, k, e);
  for (auto& a : f.v)
    for (auto& x : a.c) x = rng.next() % a.pe;
  return f;
}

MeasForm random_mform(Rng& rng, const ClassSet& cs, int m, int prec) {
  MeasForm f = mform_zero(cs, m, prec);
  for (auto& mu : f.v)
    for (uint64_t y = 0; y < mu.pm; ++y)
      for (uint64_t x = 0; x < mu.pm; ++x) {
        if (x % mu.p == 0 && y % mu.p == 0) continue;
        mu.t[x + mu.pm * y] = rng.next() % mu.pe;
      }
  return f;
}

PolyForm constant_form(const ClassSet& cs, int e, uint64_t c) {
  PolyForm f = pform_zero(cs, 2, e);
  for (auto& a : f.v) a.c[0] = c;
  return f;
}

}

TEST_CASE("stabilizer units and the symmetrizer") {
  HeckeContext ctx = make_hecke_context(cs_level1(), 6);
  std::vector<Int> w = {ctx.units[0].size(), ctx.units[1].size()};
  std::sort(w.begin(), w.end());
  CHECK(w == std::vector<Int>{2, 3});

  HeckeContext ctx7 = make_hecke_context(cs_level7(), 6);
  for (size_t i = 0; i < ctx7.units.size(); i++)
    CHECK(Int(ctx7.units[i].size()) == cs_level7().weights[i]);

  Rng rng;
  // Weight 2: the stabilizer acts trivially, so symmetrize is the identity.
  PolyForm f2 = random_pform(rng, cs_level1(), 2, 6);
  CHECK(symmetrize_poly(ctx, f2) == f2);

  // Idempotence and Hecke stability of the legal subspace.
  PolyForm f8 = symmetrize_poly(ctx, random_pform(rng, cs_level1(), 8, 6));
  CHECK(symmetrize_poly(ctx, f8) == f8);
  PolyForm tf = hecke_poly(ctx, 2, f8);
  CHECK(symmetrize_poly(ctx, tf) == tf);

  MeasForm m8 = symmetrize_meas(ctx7, random_mform(rng, cs_level7(), 2, 4));
  CHECK(symmetrize_meas(ctx7, m8) == m8);
}

TEST_CASE("weight-2 operators match the counting matrices") {
  HeckeContext ctx = make_hecke_context(cs_level1(), 6);
  HeckeContext ctx7 = make_hecke_context(cs_level7(), 6);
  uint64_t pe = ctx.pe;
  Rng rng;

  for (uint64_t ell : {2, 3, 5}) {
    IntMat b = brandt_matrix(cs_level1(), context_table(ctx, ell));
    PolyForm f = random_pform(rng, cs_level1(), 2, 6);
    PolyForm tf = hecke_poly(ctx, ell, f);
    for (size_t i = 0; i < f.v.size(); i++) {
      uint64_t acc = 0;
      for (size_t j = 0; j < f.v.size(); j++)
        acc = addmod(acc,
                     mulmod(b[i][j].convert_to<uint64_t>(), f.v[j].c[0], pe),
                     pe);
      CHECK(tf.v[i].c[0] == acc);
    }
    // Constant series: eigenvalue ell + 1.
    PolyForm c = constant_form(cs_level1(), 6, 3);
    CHECK(hecke_poly(ctx, ell, c) == pform_scale(c, ell + 1));
  }
  // U_p sums p cosets: eigenvalue p on constants.
  PolyForm c7 = constant_form(cs_level7(), 6, 1);
  CHECK(hecke_poly(ctx7, 7, c7) == pform_scale(c7, 7));

  // T_2 on the discriminant-11 class set: trace 1, determinant -6, the
  // classical eigenvalue pair {3, -2}.
  Mat t2 = hecke_matrix(ctx, 2, 2);
  CHECK(addmod(t2[0][0], t2[1][1], pe) == 1);
  uint64_t det = submod(mulmod(t2[0][0], t2[1][1], pe),
                        mulmod(t2[0][1], t2[1][0], pe), pe);
  CHECK(det == pe - 6);
}

TEST_CASE("eigenform extraction pins the elliptic eigensystem") {
  HeckeContext ctx = make_hecke_context(cs_level1(), 6);
  uint64_t pe = ctx.pe;

  Eigenform f = eigenform_extract(ctx, 2, {{2, 5}}, {3, 5, 7, 13});
  CHECK(f.a.at(2) == pe - 2);
  CHECK(f.a.at(3) == pe - 1);
  CHECK(f.a.at(5) == 1);
  CHECK(f.a.at(7) == pe - 2);
  CHECK(f.a.at(13) == 4);
  CHECK(!f.has_up);

  // The other branch is the constant series; its extraction is refused.
  CHECK_THROWS_AS(eigenform_extract(ctx, 2, {{2, 3}}, {3}), Error);
}

TEST_CASE("weight-8 commutation and extraction at the tame level") {
  HeckeContext ctx = make_hecke_context(cs_level1(), 6);
  Rng rng;
  for (int it = 0; it < 5; it++) {
    PolyForm f = symmetrize_poly(ctx, random_pform(rng, cs_level1(), 8, 6));
    CHECK(hecke_poly(ctx, 2, hecke_poly(ctx, 3, f)) ==
          hecke_poly(ctx, 3, hecke_poly(ctx, 2, f)));
  }

  // The ordinary weight-8 eigensystem with the same residues as the
  // elliptic one; T_7's unit seed separates it from non-ordinary
  // congruent company.
  Eigenform f8 = eigenform_extract(ctx, 8, {{2, 5}, {3, 6}, {5, 1}, {7, 5}},
                                   {});
  CHECK(f8.a.at(2) % 7 == 5);
  CHECK(f8.a.at(3) % 7 == 6);
  CHECK(f8.a.at(5) % 7 == 1);
  CHECK(f8.a.at(7) % 7 == 5);
}

TEST_CASE("specialization intertwines the global operators") {
  HeckeContext ctx7 = make_hecke_context(cs_level7(), 6);
  Rng rng;
  for (uint64_t ell : {2, 3, 7}) {
    // Weight 2 is exact at any value precision.
    for (int it = 0; it < 4; it++) {
      MeasForm mf = random_mform(rng, cs_level7(), 2, 6);
      CHECK(specialize_form(hecke_meas(ctx7, ell, mf), 2) ==
            hecke_poly(ctx7, ell, specialize_form(mf, 2)));
    }
    // Higher weight: exact on the nose when the value precision does not
    // exceed the cell level.
    for (int it = 0; it < 4; it++) {
      MeasForm mf = random_mform(rng, cs_level7(), 2, 2);
      CHECK(specialize_form(hecke_meas(ctx7, ell, mf), 4) ==
            hecke_poly(ctx7, ell, specialize_form(mf, 4)));
      CHECK(specialize_form(hecke_meas(ctx7, ell, mf), 8) ==
            hecke_poly(ctx7, ell, specialize_form(mf, 8)));
    }
  }
}

TEST_CASE("ordinary projector on polynomial forms") {
  HeckeContext ctx = make_hecke_context(cs_level7(), 4);
  uint64_t pe = ctx.pe;
  OrdTranscript tr;
  Mat e = ordinary_matrix(ctx, 2, 64, &tr);
  CHECK(tr.stabilized);
  CHECK(tr.base_exp == 6 * 343);
  CHECK(mat_mul(e, e, pe) == e);
  // Rank = ordinary multiplicity at weight 2 and level 7 * 11: the unit-root
  // stabilization of the elliptic form plus the five forms new at both
  // primes; the constant series and the other stabilization die.
  uint64_t trace = 0;
  for (size_t i = 0; i < e.size(); i++) trace = addmod(trace, e[i][i], pe);
  CHECK(trace == 6);

  // Unit eigenforms are fixed exactly.
  Eigenform f = eigenform_extract(ctx, 2, {{2, 5}, {7, 5}}, {3});
  CHECK(ordinary_poly(ctx, f.form, nullptr) == f.form);

  // The constant series has U_p response p: it is annihilated.
  PolyForm c = constant_form(cs_level7(), 4, 1);
  CHECK(ordinary_poly(ctx, c, nullptr) == pform_scale(c, 0));
}

TEST_CASE("ordinary projector on measure forms") {
  HeckeContext ctx = make_hecke_context(cs_level7(), 4);
  Rng rng;
  MeasForm f = symmetrize_meas(ctx, random_mform(rng, cs_level7(), 2, 4));
  OrdTranscript tr;
  MeasForm ef = ordinary_meas(ctx, f, 128, &tr);
  CHECK(tr.stabilized);
  CHECK(tr.krylov_dim > 0);
  OrdTranscript tr2;
  CHECK(ordinary_meas(ctx, ef, 128, &tr2) == ef);
  CHECK(tr2.krylov_dim <= tr.krylov_dim);
  // The projector is a limit of U_p powers, so it commutes with U_p.
  CHECK(ordinary_meas(ctx, hecke_meas(ctx, 7, f), 128, nullptr) ==
        hecke_meas(ctx, 7, ef));
}

TEST_CASE("p-stabilization across levels") {
  HeckeContext below = make_hecke_context(cs_level1(), 6);
  HeckeContext above = make_hecke_context(cs_level7(), 6);
  uint64_t pe = below.pe;

  Stabilization st = p_stabilize(below, above, 2, {{2, 5}, {3, 6}},
                                 {2, 3, 5, 13});
  CHECK(st.ap == pe - 2);
  CHECK(st.f.a.at(2) == pe - 2);
  CHECK(st.f.a.at(13) == 4);
  CHECK(st.f.has_up);
  // alpha is the unit root of X^2 + 2X + 7, = 5 mod 7, 26 mod 49.
  CHECK(st.alpha == hensel_root({7, 2, 1}, 5, 7, 6));
  CHECK(st.alpha % 49 == 26);

  Stabilization st8 = p_stabilize(below, above, 8,
                                  {{2, 5}, {3, 6}, {5, 1}, {7, 5}}, {2, 3, 5});
  CHECK(st8.ap % 7 == 5);
  CHECK(st8.alpha % 7 == 5);
  CHECK(st8.f.a.at(2) % 7 == 5);
}

TEST_CASE("involution and duality pairing") {
  HeckeContext ctx = make_hecke_context(cs_level7(), 6);
  const ClassSet& cs = cs_level7();
  AtkinLehner al = atkin_lehner(ctx);
  for (size_t i = 0; i < al.perm.size(); i++) {
    CHECK(al.perm[size_t(al.perm[i])] == int(i));
    // The reducing multipliers absorb one power of p in reduced norm.
    Rat nr = q_nrd(cs.alg, al.mult[i]);
    Int num = numerator(nr), den = denominator(nr);
    CHECK(num % 7 == 0);
    CHECK((num / 7) % 7 != 0);
    CHECK(den % 7 != 0);
  }

  Rng rng;
  for (int it = 0; it < 10; it++) {
    PolyForm f = random_pform(rng, cs, 2, 6);
    PolyForm g = random_pform(rng, cs, 2, 6);
    for (uint64_t ell : {2, 3, 7}) {
      CHECK(duality_pairing(ctx, al, hecke_poly(ctx, ell, f), g) ==
            duality_pairing(ctx, al, f, hecke_poly(ctx, ell, g)));
    }
  }
}
