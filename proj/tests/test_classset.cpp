#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "quatheta/classset.hpp"
#include "quatheta/error.hpp"

using namespace qth;

namespace {

// Oracle: Eichler class numbers for the algebra ramified at {11, inf} by the
// classical formula h = (1/12) phi(11) psi(N) + e2 + e3, with the elliptic
// terms counting optimal embeddings of Z[i] and Z[omega].
//   N = 1:  h = 10/12      + 1/2 + 2/3 = 2
//   N = 7:  h = 80/12      + 0   + 4/3 = 8
//   N = 49: h = 560/12     + 0   + 4/3 = 48
// (e2 vanishes for 7 | N since -1 is not a square mod 7; e3 doubles since
// 7 splits in Q(omega).)

bool all_two_power(const ClassSet& cs) {
  for (const auto& rep : cs.reps) {
    Rat n = ideal_nrd(rep, cs.order);
    Int num = numerator(n);
    if (denominator(n) != 1) return false;
    while (num % 2 == 0) num /= 2;
    if (num != 1) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("mass formula values") {
  CHECK(mass_formula(2, 1) == Rat(1, 24));  // Hurwitz order, w = 12
  CHECK(mass_formula(11, 1) == Rat(5, 12));
  CHECK(mass_formula(11, 7) == Rat(10, 3));
  CHECK(mass_formula(11, 49) == Rat(70, 3));
}

TEST_CASE("level one class set") {
  ClassSet cs = build_class_set(3, -143, 7, 0, 12);
  REQUIRE(cs.reps.size() == 2);
  CHECK(cs.order == cs.omax);
  CHECK(cs.reps[0] == cs.order);
  CHECK(cs.lorders[0] == cs.omax);
  CHECK(class_mass(cs) == Rat(5, 12));

  auto w = cs.weights;
  std::sort(w.begin(), w.end());
  CHECK(w == std::vector<Int>{2, 3});
  CHECK(all_two_power(cs));

  // each rep reduces to itself by a unit
  for (size_t j = 0; j < cs.reps.size(); ++j) {
    auto [idx, x] = reduce_to_class(cs, cs.reps[j]);
    CHECK(idx == static_cast<int>(j));
    CHECK(q_nrd(cs.alg, x) == 1);
  }

  // a principal translate reduces back with the right multiplier
  Quat t = theta_elt(3);
  QLat moved = lat_mul_elt(cs.alg, t, cs.reps[1]);
  auto [idx, x] = reduce_to_class(cs, moved);
  CHECK(idx == 1);
  CHECK(lat_mul_elt(cs.alg, x, cs.reps[1]) == moved);
}

TEST_CASE("neighbor lattices") {
  ClassSet cs = build_class_set(3, -143, 7, 0, 12);
  for (uint64_t ell : {2u, 3u, 5u, 13u}) {
    auto nbs = neighbors(cs, cs.order, ell);
    REQUIRE(nbs.size() == ell + 1);
    for (size_t i = 0; i < nbs.size(); ++i) {
      CHECK(lat_det(nbs[i]) / lat_det(cs.order) == Rat(Int(ell) * Int(ell)));
      CHECK(ideal_nrd(nbs[i], cs.order) == Rat(Int(ell)));
      for (const auto& b : lat_basis(nbs[i])) CHECK(lat_contains(cs.order, b));
      for (size_t j = i + 1; j < nbs.size(); ++j) CHECK(!(nbs[i] == nbs[j]));
    }
  }
  CHECK_THROWS(neighbors(cs, cs.order, 11));
}

TEST_CASE("level seven class set") {
  ClassSet cs = build_class_set(3, -143, 7, 1, 12);
  REQUIRE(cs.reps.size() == 8);
  CHECK(class_mass(cs) == Rat(10, 3));
  CHECK(lat_det(cs.order) / lat_det(cs.omax) == 7);
  for (const auto& b : lat_basis(cs.order)) CHECK(lat_contains(cs.omax, b));

  auto w = cs.weights;
  std::sort(w.begin(), w.end());
  CHECK(w == std::vector<Int>{1, 1, 1, 1, 1, 1, 3, 3});
  CHECK(all_two_power(cs));
}

TEST_CASE("level forty-nine class set") {
  ClassSet cs = build_class_set(3, -143, 7, 2, 12);
  REQUIRE(cs.reps.size() == 48);
  CHECK(class_mass(cs) == Rat(70, 3));
  CHECK(lat_det(cs.order) / lat_det(cs.omax) == 49);

  Int threes = 0;
  for (const auto& wi : cs.weights) {
    CHECK((wi == 1 || wi == 3));
    if (wi == 3) ++threes;
  }
  CHECK(threes == 2);
  CHECK(all_two_power(cs));
}
