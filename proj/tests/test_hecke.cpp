#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "quatheta/error.hpp"
#include "quatheta/hecke.hpp"

using namespace qth;

namespace {

const ClassSet& cs0() {
  static ClassSet cs = build_class_set(3, -143, 7, 0, 12);
  return cs;
}

const ClassSet& cs1() {
  static ClassSet cs = build_class_set(3, -143, 7, 1, 12);
  return cs;
}

// Point count of y^2 + y = x^3 - x^2 - 10x - 20 over F_ell, with the point
// at infinity; good reduction away from 11.
Int ap_oracle(uint64_t ell) {
  Int count = 1;
  auto red = [&](Int v) {
    v %= Int(ell);
    if (v < 0) v += ell;
    return v.convert_to<uint64_t>();
  };
  for (uint64_t x = 0; x < ell; ++x)
    for (uint64_t y = 0; y < ell; ++y) {
      uint64_t lhs = (y * y + y) % ell;
      Int xi(x);
      uint64_t rhs = red(xi * xi * xi - xi * xi - 10 * xi - 20);
      if (lhs == rhs) ++count;
    }
  return Int(ell) + 1 - count;
}

IntMat shifted(const IntMat& b, const Int& s) {
  IntMat m = b;
  for (size_t i = 0; i < m.size(); ++i) m[i][i] += s;
  return m;
}

bool is_zero(const IntMat& m) {
  for (const auto& row : m)
    for (const auto& v : row)
      if (v != 0) return false;
  return true;
}

// Remainder of the monic division p(x) / d(x), coefficients ascending.
std::vector<Rat> poly_rem(std::vector<Rat> p, const std::vector<Rat>& d) {
  while (p.size() >= d.size()) {
    Rat lead = p.back() / d.back();
    size_t off = p.size() - d.size();
    for (size_t i = 0; i < d.size(); ++i) p[off + i] -= lead * d[i];
    p.pop_back();
  }
  return p;
}

bool divides(const std::vector<Rat>& d, const std::vector<Int>& p) {
  std::vector<Rat> pr(p.begin(), p.end());
  for (const auto& c : poly_rem(pr, d))
    if (c != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("characteristic polynomial") {
  IntMat a = {{2, 1}, {0, 3}};
  CHECK(char_poly(a) == std::vector<Int>{6, -5, 1});
  IntMat n = {{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  CHECK(char_poly(n) == std::vector<Int>{0, 0, 0, 1});
}

TEST_CASE("point count oracle") {
  CHECK(ap_oracle(2) == -2);
  CHECK(ap_oracle(3) == -1);
  CHECK(ap_oracle(5) == 1);
  CHECK(ap_oracle(7) == -2);
  CHECK(ap_oracle(13) == 4);
}

TEST_CASE("level one eigenvalue anchors") {
  const ClassSet& cs = cs0();
  for (uint64_t ell : {2u, 3u, 5u, 7u, 13u}) {
    HeckeTable t = hecke_table(cs, ell);
    IntMat b = brandt_matrix(cs, t);
    Int al = ap_oracle(ell);
    for (const auto& row : t.rows) CHECK(row.size() == ell + 1);
    // spectrum is exactly {ell + 1, a_ell}
    CHECK(b[0][0] + b[1][1] == Int(ell) + 1 + al);
    CHECK(is_zero(int_mul(shifted(b, -al), shifted(b, -Int(ell) - 1))));
    // self-adjoint for the 1/w-weighted pairing
    CHECK(b[0][1] * cs.weights[1] == b[1][0] * cs.weights[0]);
    // multipliers carry the coset ideal back: x * reps[cls] has norm ell
    for (size_t i = 0; i < t.rows.size(); ++i)
      for (const auto& e : t.rows[i]) {
        Rat nx = q_nrd(cs.alg, e.mult);
        Rat scale = ideal_nrd(cs.reps[i], cs.order) /
                    ideal_nrd(cs.reps[e.cls], cs.order);
        CHECK(nx == Rat(Int(ell)) * scale);
      }
  }
}

TEST_CASE("hecke operators commute") {
  const ClassSet& cs = cs0();
  IntMat b2 = brandt_matrix(cs, hecke_table(cs, 2));
  IntMat b3 = brandt_matrix(cs, hecke_table(cs, 3));
  CHECK(int_mul(b2, b3) == int_mul(b3, b2));
}

TEST_CASE("level seven tables") {
  const ClassSet& cs = cs1();
  IntMat b2 = brandt_matrix(cs, hecke_table(cs, 2));
  IntMat b3 = brandt_matrix(cs, hecke_table(cs, 3));
  HeckeTable ut = up_table(cs);
  for (const auto& row : ut.rows) CHECK(row.size() == 7);
  IntMat u7 = brandt_matrix(cs, ut);

  CHECK(int_mul(b2, b3) == int_mul(b3, b2));
  CHECK(int_mul(b2, u7) == int_mul(u7, b2));
  CHECK(int_mul(b3, u7) == int_mul(u7, b3));

  // weighted self-adjointness of T_ell at level p
  size_t h = cs.reps.size();
  for (size_t i = 0; i < h; ++i)
    for (size_t j = 0; j < h; ++j)
      CHECK(b2[i][j] * cs.weights[j] == b2[j][i] * cs.weights[i]);

  // the level-11 system survives twice: (x + 2)^2 (x - 3) divides charpoly(T_2)
  auto p2 = char_poly(b2);
  CHECK(divides({Rat(4), Rat(4), Rat(1)}, p2));    // (x + 2)^2
  CHECK(divides({Rat(-3), Rat(1)}, p2));           // x - 3
  // stabilization quadratic x^2 + 2x + 7 and the coset-count eigenvalue 7
  auto pu = char_poly(u7);
  CHECK(divides({Rat(7), Rat(2), Rat(1)}, pu));
  CHECK(divides({Rat(-7), Rat(1)}, pu));
}
