#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quatheta/abelian.hpp"
#include "quatheta/error.hpp"
#include "quatheta/groupring.hpp"
#include "quatheta/padic.hpp"

#include <cstdint>
#include <random>

using namespace qth;

// Hand-checked values, frozen before the routines were written:
//   5 * 10 = 50 = 1 + 49            -> inv(5) mod 7^2 = 10
//   x^2+2x+7 at 26: 676+52+7 = 735 = 15*49 -> unit root is 26 mod 7^2
static constexpr uint64_t kInv5Mod49 = 10;
static constexpr uint64_t kUnitRootMod49 = 26;

TEST_CASE("residue kernels") {
  CHECK(pp_pow(7, 2) == 49);
  CHECK(pp_pow(7, 16) == pp_pow(7, 8) * pp_pow(7, 8));
  CHECK_THROWS_AS(pp_pow(7, 30), Error);
  CHECK(powmod(3, 6, 7) == 1);
  CHECK(mulmod(pp_pow(7, 8), pp_pow(7, 8), pp_pow(7, 16)) == 0);
  CHECK(val_p(490, 7) == 2);
  CHECK(val_p(70, 7) == 1);
  CHECK(val_p(343, 7) == 3);
}

TEST_CASE("unit inverse") {
  CHECK(inv_unit(5, 7, 2) == kInv5Mod49);
  uint64_t q = pp_pow(7, 16);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    uint64_t a = rng() % q;
    if (a % 7 == 0) a += 1;
    CHECK(mulmod(a, inv_unit(a, 7, 16), q) == 1);
  }
  CHECK_THROWS_AS(inv_unit(14, 7, 3), Error);
}

TEST_CASE("unit square roots") {
  auto r = unit_sqrt(4, 7, 6);
  REQUIRE(r.has_value());
  uint64_t q = pp_pow(7, 6);
  CHECK((*r == 2 || *r == q - 2));

  // -143 = 4 mod 7 is a unit square at p = 7.
  uint64_t qq = pp_pow(7, 16);
  uint64_t m143 = qq - 143;
  auto s = unit_sqrt(m143, 7, 16);
  REQUIRE(s.has_value());
  CHECK(mulmod(*s, *s, qq) == m143);

  CHECK_FALSE(unit_sqrt(3, 7, 6).has_value());
}

TEST_CASE("hensel lift of the ordinary root") {
  // x^2 + 2x + 7: the root that is a unit (the other has valuation 1).
  std::vector<uint64_t> f = {7, 2, 1};
  uint64_t q = pp_pow(7, 2);
  CHECK(hensel_root(f, 5, 7, 2) == kUnitRootMod49);

  uint64_t Q = pp_pow(7, 16);
  uint64_t alpha = hensel_root(f, 5, 7, 16);
  CHECK(alpha % 7 == 5);
  CHECK(addmod(addmod(mulmod(alpha, alpha, Q), mulmod(2, alpha, Q), Q), 7, Q) == 0);
  // alpha * beta = 7 and alpha + beta = -2 for the companion root.
  uint64_t beta = submod(Q - 2, alpha, Q);
  CHECK(mulmod(alpha, beta, Q) == 7);
  (void)q;
}

TEST_CASE("teichmuller lift") {
  uint64_t q = pp_pow(7, 6);
  uint64_t w = teichmuller(3, 7, 6);
  CHECK(w % 7 == 3);
  CHECK(powmod(w, 6, q) == 1);
  CHECK(teichmuller(1, 7, 6) == 1);
}

TEST_CASE("PadicApprox precision rules") {
  auto a = PadicApprox::make(7, 6, 123456);
  auto b = PadicApprox::make(7, 3, 45);
  CHECK(a.add(b).prec == 3);
  CHECK(a.mul(b).prec == 3);
  CHECK(a.sub(a).valuation() == 6);

  auto c = PadicApprox::make(7, 5, 3 * 49);
  CHECK(c.valuation() == 2);
  auto d = c.div_pow_p(2);
  CHECK(d.prec == 3);
  CHECK(d.value == 3);
  CHECK_THROWS_AS(c.div_pow_p(1).div(PadicApprox::make(7, 4, 14)), Error);

  auto u = PadicApprox::make(7, 6, 5);
  CHECK(a.div(u).mul(u).eq_mod(a, 6));
}

TEST_CASE("cyclotomic integers, level 1") {
  // Sum of all p-th roots of unity vanishes.
  auto s = CycElt::zero(7, 1, 6);
  for (uint64_t k = 0; k < 7; ++k) s = s.add(CycElt::zeta_pow(7, 1, 6, k));
  CHECK(s == CycElt::zero(7, 1, 6));

  auto z = CycElt::zeta_pow(7, 1, 6, 1);
  auto z7 = CycElt::scalar(7, 1, 6, 1);
  auto acc = CycElt::scalar(7, 1, 6, 1);
  for (int i = 0; i < 7; ++i) acc = acc.mul(z);
  CHECK(acc == z7);

  auto one = CycElt::scalar(7, 1, 6, 1);
  CHECK_FALSE(one.sub(z).is_unit());  // 1 - zeta generates the maximal ideal
  CHECK(one.add(z).is_unit());
}

TEST_CASE("cyclotomic integers, level 2") {
  auto z = CycElt::zeta_pow(7, 2, 4, 1);
  auto acc = CycElt::scalar(7, 2, 4, 1);
  for (int i = 0; i < 49; ++i) acc = acc.mul(z);
  CHECK(acc == CycElt::scalar(7, 2, 4, 1));

  auto s = CycElt::zero(7, 2, 4);
  for (uint64_t k = 0; k < 49; ++k) s = s.add(CycElt::zeta_pow(7, 2, 4, k));
  CHECK(s == CycElt::zero(7, 2, 4));

  // Associativity spot check on random triples.
  std::mt19937_64 rng(5);
  auto rnd = [&]() {
    auto x = CycElt::zero(7, 2, 4);
    for (auto& v : x.c) v = rng() % pp_pow(7, 4);
    return x;
  };
  for (int i = 0; i < 10; ++i) {
    auto a = rnd(), b = rnd(), c = rnd();
    CHECK(a.mul(b).mul(c) == a.mul(b.mul(c)));
    CHECK(a.mul(b) == b.mul(a));
    CHECK(a.mul(b.add(c)) == a.mul(b).add(a.mul(c)));
  }
}

TEST_CASE("abelian structure recovery") {
  // Z/12 as an opaque law.
  auto iso = analyze_abelian(12, 0, [](uint32_t a, uint32_t b) { return (a + b) % 12; });
  REQUIRE(iso.group->n == 12);
  CHECK(iso.group->orders == std::vector<uint32_t>{4, 3});

  // Z/2 x Z/4 as an opaque law on pairs encoded as a + 2b.
  auto mul24 = [](uint32_t x, uint32_t y) {
    uint32_t a = (x % 2 + y % 2) % 2, b = (x / 2 + y / 2) % 4;
    return a + 2 * b;
  };
  auto iso2 = analyze_abelian(8, 0, mul24);
  CHECK(iso2.group->orders == std::vector<uint32_t>{4, 2});
  for (uint32_t x = 0; x < 8; ++x)
    for (uint32_t y = 0; y < 8; ++y) {
      uint32_t lhs = iso2.to_structured[mul24(x, y)];
      uint32_t rhs = iso2.group->op(iso2.to_structured[x], iso2.to_structured[y]);
      CHECK(lhs == rhs);
    }

  auto g = FinAbGroup::make({2, 7, 7});
  CHECK(g->order_of(g->compose({1, 3, 0})) == 14);
  CHECK(g->pow(g->compose({0, 1, 1}), 7) == g->id());
  CHECK_FALSE(g->is_cyclic_p_power(7));
  CHECK(FinAbGroup::make({49})->is_cyclic_p_power(7));
}

TEST_CASE("group ring arithmetic") {
  auto G = FinAbGroup::make({4});
  auto x = GroupRingElt::dirac(7, 6, G, 1);
  auto y = GroupRingElt::dirac(7, 6, G, 3);
  auto z = x.mul(y);
  CHECK(z.c[0] == 1);  // g * g^3 = id
  CHECK(z.c[1] == 0);

  auto w = x.add(y).involute();
  CHECK(w.c[3] == 1);
  CHECK(w.c[1] == 1);
  CHECK(w.augment() == 2);

  // Projection along Z/4 -> Z/2.
  auto H = FinAbGroup::make({2});
  std::vector<uint32_t> hom = {0, 1, 0, 1};
  auto pr = x.add(y).project(H, hom);
  CHECK(pr.c[1] == 2);
  CHECK(pr.c[0] == 0);

  // Factorial denominators: 3! = 6 is a 7-unit.
  auto d = GroupRingElt::dirac(7, 6, G, 0, 6);
  d.denom_factorial = 3;
  auto cleared = d.clear_denominator();
  CHECK(cleared.c[0] == 1);
  CHECK(d.add(GroupRingElt::dirac(7, 6, G, 0, 1)).eq_mod(
      GroupRingElt::dirac(7, 6, G, 0, 2), 6));

  auto rt = GroupRingElt::from_json(d.to_json());
  CHECK(rt.eq_mod(d, 6));
  CHECK(rt.denom_factorial == d.denom_factorial);
}

TEST_CASE("character evaluation") {
  auto G = FinAbGroup::make({7});
  auto all = GroupRingElt::zero(7, 4, G);
  for (auto& v : all.c) v = 1;
  // Nontrivial character sums to zero over the full group.
  auto s = eval_character(all, 1, {1});
  CHECK(s == CycElt::zero(7, 1, 4));
  // Trivial character gives the augmentation.
  auto t = eval_character(all, 1, {0});
  CHECK(t == CycElt::scalar(7, 1, 4, 7));

  auto x = GroupRingElt::dirac(7, 4, G, 2, 5);
  auto v = eval_character(x, 1, {1});
  CHECK(v == CycElt::zeta_pow(7, 1, 4, 2).scale(5));
}
