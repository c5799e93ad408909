#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "quatheta/quat.hpp"
#include "quatheta/split.hpp"

namespace qth {

// Right ideal classes of the level-p^m order inside the maximal order,
// with reps of 2-power norm (so every rep is trivial at p and at the odd
// ramified primes). reps[0] is the order itself.
struct ClassSet {
  QuatAlg alg;
  Int dk;
  uint64_t p = 0;
  int m = 0;
  int prec = 0;
  QLat omax;
  QLat order;
  LocalSplitting sp;  // splitting of omax at p, mod p^prec
  std::vector<QLat> reps;
  std::vector<QLat> lorders;
  std::vector<Int> weights;  // w_i = |O_l(I_i)^x| / 2
};

ClassSet build_class_set(const Int& dk, const Int& beta, uint64_t p, int m,
                         int prec);

// sum_i 1 / (2 w_i)
Rat class_mass(const ClassSet& cs);
// (1/24) prod_{q | nminus} (q - 1) * psi(level), psi(n) = n prod_{l | n} (1 + 1/l)
Rat mass_formula(const Int& nminus, const Int& level);

// The ell + 1 index-ell^2 sublattices of I that are right modules over
// cs.order, for ell coprime to p and the discriminant.
std::vector<QLat> neighbors(const ClassSet& cs, const QLat& ideal, uint64_t ell);

// Class index j and x with ideal = x * reps[j]; fails if no class matches.
std::pair<int, Quat> reduce_to_class(const ClassSet& cs, const QLat& ideal);
std::optional<std::pair<int, Quat>> try_reduce_to_class(const ClassSet& cs,
                                                        const QLat& ideal);

// Number of unit pairs: |L^x| / 2 for the order L (norm-1 vectors up to sign).
Int unit_pairs(const QuatAlg& alg, const QLat& order);

}
