#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quatheta/error.hpp"
#include "quatheta/padic.hpp"
#include "quatheta/upoly.hpp"

using namespace qth;

namespace {

std::vector<uint64_t> from_roots(const std::vector<uint64_t>& roots,
                                 uint64_t pe) {
  std::vector<uint64_t> f = {1};
  for (uint64_t r : roots) f = up_mul(f, {(pe - r % pe) % pe, 1}, pe);
  return f;
}

}

TEST_CASE("ring operations and division") {
  uint64_t pe = pp_pow(7, 3);
  std::vector<uint64_t> a = {2, 3, 1};  // X^2 + 3X + 2 = (X+1)(X+2)
  CHECK(up_mul({1, 1}, {2, 1}, pe) == a);
  auto [q, r] = up_divmod(a, {1, 1}, pe);
  CHECK(q == std::vector<uint64_t>{2, 1});
  CHECK(r.empty());
  auto [q2, r2] = up_divmod(a, {5, 1}, pe);  // remainder a(-5) = 12
  CHECK(r2 == std::vector<uint64_t>{12});
  CHECK(up_eval(a, pe - 5, pe) == 12);
  CHECK_THROWS_AS(up_divmod(a, {3, 2}, pe), Error);  // non-monic divisor
}

TEST_CASE("roots with multiplicity over the residue field") {
  uint64_t pe = pp_pow(7, 2);
  auto f = from_roots({2, 9, 3}, pe);  // 9 = 2 mod 7: double root
  auto roots = up_roots_mod_p(f, 7);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == std::pair<uint64_t, int>{2, 2});
  CHECK(roots[1] == std::pair<uint64_t, int>{3, 1});
}

TEST_CASE("branch splitting recovers an integer factorization") {
  int e = 4;
  uint64_t pe = pp_pow(7, e);
  // Branch of 2 mod 7 inside (X-2)(X-9)(X-3)(X-5): exactly (X-2)(X-9).
  auto f = from_roots({2, 9, 3, 5}, pe);
  auto [g, h] = up_branch_split(f, 2, 7, e);
  CHECK(g == from_roots({2, 9}, pe));
  CHECK(h == from_roots({3, 5}, pe));
  CHECK(up_mul(g, h, pe) == f);
  // h is a unit at the branch point.
  CHECK(up_eval(h, 2, pe) % 7 != 0);

  // Whole polynomial in one branch: trivial cofactor.
  auto f2 = from_roots({1, 15}, pe);
  auto [g2, h2] = up_branch_split(f2, 1, 7, e);
  CHECK(g2 == f2);
  CHECK(h2 == std::vector<uint64_t>{1});

  CHECK_THROWS_AS(up_branch_split(f, 4, 7, e), Error);  // not a root
}

TEST_CASE("bezout lift at full precision") {
  int e = 5;
  uint64_t pe = pp_pow(7, e);
  auto g = from_roots({2, 9}, pe);
  auto h = from_roots({3, 5, 12}, pe);
  auto [u, v] = up_bezout(g, h, 7, e);
  CHECK(u.size() <= 3);
  CHECK(v.size() <= 2);
  auto one = up_add(up_mul(u, g, pe), up_mul(v, h, pe), pe);
  CHECK(one == std::vector<uint64_t>{1});
}
