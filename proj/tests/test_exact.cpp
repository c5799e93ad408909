#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "quatheta/exact.hpp"

#include <random>

using namespace qth;

static IntMat rnd_mat(std::mt19937_64& rng, size_t m, size_t n, int lim) {
  IntMat a(m, std::vector<Int>(n));
  for (auto& row : a)
    for (auto& x : row) x = static_cast<int64_t>(rng() % (2 * lim + 1)) - lim;
  return a;
}

TEST_CASE("determinants") {
  IntMat a = {{2, 0}, {0, 3}};
  CHECK(int_det(a) == 6);
  IntMat b = {{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
  CHECK(int_det(b) == -3);
  IntMat c = {{1, 2}, {2, 4}};
  CHECK(int_det(c) == 0);

  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    IntMat m = rnd_mat(rng, 4, 4, 8);
    Rat rd = rat_det(rat_from_int(m));
    CHECK(Rat(int_det(m)) == rd);
  }
}

TEST_CASE("hnf: row span and unimodularity") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    IntMat a = rnd_mat(rng, 4, 4, 10);
    IntMat u;
    IntMat h = row_hnf(a, &u);
    CHECK((int_det(u) == 1 || int_det(u) == -1));
    IntMat ua = int_mul(u, a);
    for (size_t i = 0; i < h.size(); ++i) CHECK(ua[i] == h[i]);
    for (size_t i = h.size(); i < 4; ++i)
      for (auto& x : ua[i]) CHECK(x == 0);
    // Pivots positive, column-monotone, entries above reduced.
    size_t last = 0;
    for (size_t r = 0; r < h.size(); ++r) {
      size_t piv = 0;
      while (piv < h[r].size() && h[r][piv] == 0) ++piv;
      REQUIRE(piv < h[r].size());
      CHECK(h[r][piv] > 0);
      if (r > 0) CHECK(piv > last);
      for (size_t r2 = 0; r2 < r; ++r2) {
        CHECK(h[r2][piv] >= 0);
        CHECK(h[r2][piv] < h[r][piv]);
      }
      last = piv;
    }
    // HNF is a canonical form: stable under another pass.
    CHECK(row_hnf(h) == h);
  }
}

TEST_CASE("left kernel") {
  IntMat a = {{1, 2}, {2, 4}, {0, 1}};
  IntMat k = left_kernel(a);
  REQUIRE(k.size() == 1);
  // Kernel row is +/-(2, -1, 0).
  CHECK(k[0][0] * 2 + k[0][1] * 4 + k[0][2] * 0 == k[0][0] * 2 + k[0][1] * 4);
  CHECK(k[0][0] + 2 * k[0][1] == 0);
  CHECK(2 * k[0][0] + 4 * k[0][1] + k[0][2] == 0);

  IntMat full = {{1, 0}, {0, 1}};
  CHECK(left_kernel(full).empty());
}

TEST_CASE("rational inverse") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    IntMat m = rnd_mat(rng, 3, 3, 6);
    if (int_det(m) == 0) continue;
    auto inv = rat_inverse(rat_from_int(m));
    REQUIRE(inv.has_value());
    RatMat prod = rat_mul(*inv, rat_from_int(m));
    for (size_t i = 0; i < 3; ++i)
      for (size_t j = 0; j < 3; ++j) CHECK(prod[i][j] == Rat(i == j ? 1 : 0));
  }
  CHECK_FALSE(rat_inverse(rat_from_int({{1, 2}, {2, 4}})).has_value());
}

TEST_CASE("exact sqrt bounds") {
  CHECK(floor_sqrt(Rat(49)) == 7);
  CHECK(floor_sqrt(Rat(48)) == 6);
  CHECK(floor_sqrt(Rat(1, 2)) == 0);
  CHECK(floor_sqrt(Rat(9, 4)) == 1);
  CHECK(floor_add_sqrt(Rat(0), Rat(2)) == 1);
  CHECK(floor_add_sqrt(Rat(3, 2), Rat(4)) == 3);      // 1.5 + 2
  CHECK(ceil_sub_sqrt(Rat(3, 2), Rat(4)) == 0);       // ceil(-0.5)
  CHECK(ceil_sub_sqrt(Rat(-1, 2), Rat(1, 4)) == -1);  // ceil(-1)
}

TEST_CASE("short vectors: cubic and hexagonal counts") {
  // Z^4, vectors of norm <= 1 up to sign: the 4 unit vectors.
  RatMat id4 = rat_from_int(int_identity(4));
  auto v1 = short_vectors(id4, 1);
  CHECK(v1.size() == 4);
  // Norm <= 2 adds (+-1, +-1) pairs in 6 coordinate planes, 2 sign patterns
  // each up to global sign: 4 + 12 = 16.
  auto v2 = short_vectors(id4, 2);
  CHECK(v2.size() == 16);
  for (auto& v : v2) {
    Int q = 0;
    for (auto& x : v) q += x * x;
    CHECK(q >= 1);
    CHECK(q <= 2);
  }

  // Hexagonal lattice: 6 minimal vectors, 3 up to sign.
  RatMat hex = {{2, 1}, {1, 2}};
  CHECK(short_vectors(hex, 2).size() == 3);
  CHECK(short_vectors(hex, 5).size() == 3);  // next norm is 6
  CHECK(short_vectors(hex, 6).size() == 6);
}
