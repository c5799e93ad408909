#pragma once

#include <array>
#include <cstdint>

#include "quatheta/quat.hpp"

namespace qth {

// 2x2 matrix with entries in Z/m for a prime-power modulus m.
struct Mat2 {
  uint64_t a = 0, b = 0, c = 0, d = 0;
  bool operator==(const Mat2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
};

Mat2 m2_id();
Mat2 m2_scalar(uint64_t s);
Mat2 m2_add(const Mat2& x, const Mat2& y, uint64_t m);
Mat2 m2_sub(const Mat2& x, const Mat2& y, uint64_t m);
Mat2 m2_mul(const Mat2& x, const Mat2& y, uint64_t m);
Mat2 m2_scale(const Mat2& x, uint64_t s, uint64_t m);
uint64_t m2_det(const Mat2& x, uint64_t m);
Mat2 m2_adj(const Mat2& x, uint64_t m);
// Inverse for unit determinant; modulus p^e.
Mat2 m2_inv(const Mat2& x, uint64_t p, int e);
Mat2 m2_reduce(const Mat2& x, uint64_t m);

// Splitting B tensor Q_q -> M_2(Q_q) recorded on a basis of `order`, whose
// images are integral; entries live mod q^e. eval accepts any element with
// q-integral coordinates over that basis.
struct LocalSplitting {
  uint64_t q = 0;
  int e = 0;
  uint64_t qe = 0;
  QLat order;
  RatMat coord_inv;
  std::array<Mat2, 4> img;

  Mat2 eval(const Quat& x) const;
};

// The distinguished form: theta goes to its companion matrix
// [[tr, -nm], [1, 0]] and j to sqrt(beta) [[-1, tr], [0, 1]]. Requires beta
// to be a square unit at q (mod 8 condition when q = 2) and the order's
// coordinates over (1, theta, j, theta j) to be q-integral.
LocalSplitting split_theta_form(const QuatAlg& alg, const Int& dk,
                                const QLat& order, uint64_t q, int e);

// General constructor: theta form when beta is a square unit at q, else a
// diagonal form when -dk is a square unit, else a generic norm-equation
// form; conjugated so the (q-maximal) order maps onto M_2(Z_q), certified
// by a unit determinant on the images.
LocalSplitting split_order(const QuatAlg& alg, const Int& dk,
                           const QLat& order, uint64_t q, int e);

// Suborder of omax cut out by vanishing of the lower-left entry mod q^m
// under sp (an Eichler-type level condition at one prime).
QLat eichler_order(const QLat& omax, const LocalSplitting& sp, int m);

}
