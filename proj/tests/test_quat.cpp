#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "quatheta/padic.hpp"
#include "quatheta/quat.hpp"
#include "quatheta/split.hpp"

using namespace qth;

namespace {

const QuatAlg kAlg{-3, -143};

QLat omax_cached() {
  static QLat o = maximal_order(kAlg, 3, 11);
  return o;
}

}  // namespace

TEST_CASE("quaternion arithmetic basics") {
  Quat i{0, 1, 0, 0, 1}, j{0, 0, 1, 0, 1};
  Quat k = q_mul(kAlg, i, j);
  CHECK(k == Quat{0, 0, 0, 1, 1});
  CHECK(q_mul(kAlg, i, i) == Quat::integer(-3));
  CHECK(q_mul(kAlg, j, j) == Quat::integer(-143));
  CHECK(q_mul(kAlg, j, i) == Quat{0, 0, 0, -1, 1});
  CHECK(q_mul(kAlg, k, k) == Quat::integer(-429));

  Quat t = theta_elt(3);
  CHECK(q_trd(t) == 3);
  CHECK(q_nrd(kAlg, t) == 3);
  // theta satisfies x^2 - 3x + 3 = 0
  Quat lhs = q_sub(q_mul(kAlg, t, t), q_scale(t, 3));
  CHECK(q_add(lhs, Quat::integer(3)).is_zero());

  Quat x{1, 2, 3, 4, 5};
  CHECK(q_mul(kAlg, x, q_conj(x)) == q_from_coords({q_nrd(kAlg, x), 0, 0, 0}));
  CHECK(q_mul(kAlg, x, q_inv(kAlg, x)) == Quat::integer(1));

  // multiplication is associative (spot check)
  Quat y{2, -1, 0, 3, 7}, z{0, 5, -2, 1, 3};
  CHECK(q_mul(kAlg, q_mul(kAlg, x, y), z) == q_mul(kAlg, x, q_mul(kAlg, y, z)));
  // trd and nrd are multiplicative / additive as expected
  CHECK(q_nrd(kAlg, q_mul(kAlg, x, y)) == q_nrd(kAlg, x) * q_nrd(kAlg, y));
  CHECK(q_trd(q_add(x, y)) == q_trd(x) + q_trd(y));
}

TEST_CASE("hilbert symbol and ramification") {
  CHECK(hilbert_symbol(-1, -1, 2) == -1);
  CHECK(hilbert_symbol(-1, -1, 0) == -1);
  CHECK(hilbert_symbol(-1, -1, 3) == 1);
  CHECK(hilbert_symbol(2, 7, 7) == 1);   // 2 = 3^2 mod 7
  CHECK(hilbert_symbol(3, 7, 7) == -1);  // 3 is not a square mod 7

  // Hamilton quaternions ramify exactly at 2 (and infinity).
  CHECK(ramified_primes(QuatAlg{-1, -1}) == std::vector<Int>{2});

  // product formula over all places for a sample of pairs
  std::vector<std::pair<int, int>> pairs = {
      {-3, -143}, {-1, -1}, {2, 3}, {-6, 10}, {15, -21}, {-2, -5},
      {30, 77},   {-7, -7}, {5, 5}, {12, -9}};
  for (auto [a, b] : pairs) {
    int prod = hilbert_symbol(a, b, 0);
    std::vector<Int> places = {2, 3, 5, 7, 11, 13};
    // include every prime dividing a or b
    for (Int q : {Int(17), Int(19), Int(23), Int(29), Int(31), Int(37), Int(41),
                  Int(43), Int(47), Int(53), Int(59), Int(61), Int(71), Int(77),
                  Int(101), Int(143)})
      places.push_back(q);
    for (const auto& q : places) {
      // skip non-primes in the convenience list
      bool prime = q > 1;
      for (Int d = 2; d * d <= q; ++d)
        if (q % d == 0) { prime = false; break; }
      if (!prime) continue;
      prod *= hilbert_symbol(a, b, q);
    }
    CHECK(prod == 1);
  }
}

TEST_CASE("beta search pins the algebra") {
  CHECK(find_beta(3, 11, 7, 1) == -143);
  CHECK(ramified_primes(kAlg) == std::vector<Int>{11});
  // -143 = 1 mod 8, a square unit mod 7 (4 = 2^2), a unit mod 3
  CHECK(hilbert_symbol(-3, -143, 7) == 1);
  CHECK(hilbert_symbol(-3, -143, 2) == 1);
  CHECK(hilbert_symbol(-3, -143, 13) == 1);
}

TEST_CASE("lattice operations") {
  QLat std_ord = standard_order(kAlg, 3);
  CHECK(is_order(kAlg, std_ord));
  CHECK(lat_contains(std_ord, Quat::integer(1)));
  CHECK(lat_contains(std_ord, theta_elt(3)));
  CHECK(!lat_contains(std_ord, q_scale(theta_elt(3), Rat(1, 3))));

  // O_K O_K-module structure: theta * basis stays inside
  auto bs = lat_basis(std_ord);
  for (const auto& b : bs)
    CHECK(lat_contains(std_ord, q_mul(kAlg, theta_elt(3), b)));

  QLat dbl = lat_scale(std_ord, 2);
  CHECK(lat_add(std_ord, dbl) == std_ord);
  CHECK(lat_intersect(std_ord, dbl) == dbl);
  CHECK(lat_det(dbl) / lat_det(std_ord) == 16);

  QLat prod = lat_mul(kAlg, std_ord, std_ord);
  CHECK(prod == std_ord);
}

TEST_CASE("standard order and maximal order") {
  QLat std_ord = standard_order(kAlg, 3);
  CHECK(order_disc(kAlg, std_ord) == 429);  // 3 * 11 * 13

  QLat omax = omax_cached();
  CHECK(is_order(kAlg, omax));
  CHECK(order_disc(kAlg, omax) == 11);
  CHECK(lat_add(omax, std_ord) == omax);
  CHECK(lat_det(std_ord) / lat_det(omax) == 39);  // index 39 = 3 * 13

  CHECK(right_order(kAlg, omax) == omax);
  CHECK(left_order(kAlg, omax) == omax);

  // a principal right ideal: right order is O, left order is a conjugate
  Quat x{1, 1, 1, 0, 1};
  QLat ideal = lat_mul_elt(kAlg, x, omax);
  CHECK(right_order(kAlg, ideal) == omax);
  QLat lo = left_order(kAlg, ideal);
  CHECK(is_order(kAlg, lo));
  CHECK(order_disc(kAlg, lo) == 11);
  CHECK(ideal_nrd(ideal, omax) == q_nrd(kAlg, x));

  CHECK(ideal_nrd(lat_elt_mul(kAlg, omax, theta_elt(3)), omax) == 3);
  Quat y{2, 0, 1, 0, 1};
  CHECK(q_nrd(kAlg, y) == 147);
  CHECK(ideal_nrd(lat_elt_mul(kAlg, omax, y), omax) == 147);

  // unit count of the maximal order: |O^x| is 4 or 6 for this algebra
  auto g = nrd_gram(kAlg, omax);
  auto units = short_vectors(g, Rat(1));
  size_t count = 0;
  for (const auto& v : units) {
    Rat n = 0;
    for (int r = 0; r < 4; ++r)
      for (int s = 0; s < 4; ++s) n += g[r][s] * v[r] * v[s];
    if (n == 1) ++count;
  }
  // short_vectors returns one of each +-pair
  CHECK((2 * count == 4 || 2 * count == 6));
}

TEST_CASE("splitting at p in the companion form") {
  QLat omax = omax_cached();
  LocalSplitting sp = split_order(kAlg, 3, omax, 7, 16);
  uint64_t qe = pp_pow(7, 16);
  CHECK(sp.qe == qe);

  Mat2 mt = sp.eval(theta_elt(3));
  CHECK(mt == Mat2{3, qe - 3, 1, 0});

  uint64_t s = mulmod(2, 1, qe);
  {
    auto root = unit_sqrt(submod(0, 143 % qe, qe), 7, 16);
    REQUIRE(root.has_value());
    s = *root;
    CHECK(s % 7 == 2);
    CHECK(mulmod(s, s, qe) == submod(0, 143 % qe, qe));
  }
  Quat j{0, 0, 1, 0, 1};
  Mat2 mj = sp.eval(j);
  CHECK(mj == Mat2{negmod(s, qe), mulmod(3, s, qe), 0, s});

  // j theta = conj(theta) j
  Quat tbar = q_sub(Quat::integer(3), theta_elt(3));
  CHECK(m2_mul(mj, mt, qe) == m2_mul(sp.eval(tbar), mj, qe));

  // the same splitting through the dedicated constructor
  LocalSplitting sp2 = split_theta_form(kAlg, 3, omax, 7, 16);
  for (int r = 0; r < 4; ++r) CHECK(sp.img[r] == sp2.img[r]);
}

TEST_CASE("splittings at auxiliary primes") {
  QLat omax = omax_cached();
  // 2: theta form (beta = 1 mod 8); 3, 13: conjugated forms at saturation
  // primes; 5: both constants nonsquare, norm-equation form.
  for (auto [q, e] : std::vector<std::pair<uint64_t, int>>{
           {2, 12}, {3, 6}, {5, 6}, {13, 5}}) {
    LocalSplitting sp = split_order(kAlg, 3, omax, q, e);
    uint64_t qe = pp_pow(q, e);
    Mat2 mt = sp.eval(theta_elt(3));
    // theta's companion relation survives conjugation
    Mat2 lhs = m2_mul(mt, mt, qe);
    Mat2 rhs = m2_sub(m2_scale(mt, 3 % qe, qe), m2_scalar(3 % qe), qe);
    CHECK(lhs == rhs);
    CHECK(m2_det(mt, qe) == 3 % qe);
    Quat j{0, 0, 1, 0, 1};
    Mat2 mj = sp.eval(j);
    uint64_t beta = submod(0, 143 % qe, qe);
    CHECK(m2_mul(mj, mj, qe) == m2_scalar(beta));
  }
  CHECK_THROWS(split_order(kAlg, 3, omax, 11, 4));
}

TEST_CASE("eichler orders at p") {
  QLat omax = omax_cached();
  LocalSplitting sp = split_order(kAlg, 3, omax, 7, 16);
  QLat r0 = eichler_order(omax, sp, 0);
  CHECK(r0 == omax);
  QLat r1 = eichler_order(omax, sp, 1);
  QLat r2 = eichler_order(omax, sp, 2);
  CHECK(is_order(kAlg, r1));
  CHECK(is_order(kAlg, r2));
  CHECK(order_disc(kAlg, r1) == 77);
  CHECK(order_disc(kAlg, r2) == 539);
  CHECK(lat_add(r1, omax) == omax);
  CHECK(lat_add(r2, r1) == r1);
  CHECK(lat_det(r1) / lat_det(omax) == 7);
  CHECK(lat_det(r2) / lat_det(r1) == 7);
  // lower-left entries vanish to the right order
  auto bs = lat_basis(r2);
  for (const auto& b : bs) CHECK(sp.eval(b).c % 49 == 0);
}
