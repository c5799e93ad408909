#pragma once

#include <cstdint>
#include <vector>

#include "quatheta/classset.hpp"

namespace qth {

// One coset's worth of a Hecke operator at a class representative: the coset
// ideal equals mult * reps[cls]. The coefficient action at p is recovered
// from mult through the stored splitting when forms are evaluated.
struct HeckeEntry {
  int cls = 0;
  Quat mult;
};

struct HeckeTable {
  uint64_t ell = 0;  // the prime; for rows built from U_p cosets, ell == p
  bool at_p = false;
  std::vector<std::vector<HeckeEntry>> rows;  // rows[i]: ell + 1 (or p) entries
};

// T_ell table from the ell + 1 neighbor ideals of each representative.
// Every multiplier is certified to lie in the local unit group at p
// (lower-left entry 0 mod p^m, unit determinant).
HeckeTable hecke_table(const ClassSet& cs, uint64_t ell);

// U_p table from the p coset ideals {x in I_i : x in h_a R_p locally},
// h_a = [[p, -a],[0,1]], a in [0, p). Requires m >= 1. Multipliers are
// certified to factor as h_a times a local unit of the level order.
HeckeTable up_table(const ClassSet& cs);

// Weight-2 matrix: b[i][j] = #{a : rows[i][a].cls == j}. Row sums are the
// coset count; acts on functions by (T f)(i) = sum_j b[i][j] f(j).
IntMat brandt_matrix(const ClassSet& cs, const HeckeTable& t);

}
