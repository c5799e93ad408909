#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quatheta/forms.hpp"

namespace qth {

// Finite slice of the ordinary family through a weight-2 p-stabilized
// eigenform: a measure-valued form phi whose weight-k specializations are,
// up to one scalar per weight, the eigenforms the seed deforms into. The
// slice is certified through its specializations, never as a raw table:
// lambda2 records the scalar at weight 2, where the identity
//   specialize_form(phi, 2) == lambda2 * seed.form
// is checked coordinatewise at full value precision before returning, and
// lambda2 is required to be a unit (a zero of the branch at weight 2, or a
// seed with multiplicity, would surface here). Higher weights carry their
// own scalars and are cross-checked by callers against independently
// extracted eigenforms; their values are exact mod p^min(prec, m).
struct FamilyForm {
  Eigenform seed;  // weight-2 ordinary seed, on the same class set as phi
  MeasForm phi;
  uint64_t lambda2 = 0;
  std::vector<std::string> transcript;
};

// Build the slice by draining a Dirac lift of the seed. Start from point
// masses sized by the seed coordinates, symmetrize, and average over the
// Teichmuller scalars (the seed's central character is trivial on them, so
// the average fixes its branch and removes every other tame central
// sector). Then alternate, for the given number of rounds, a normalized
// U_p application with normalized applications of h(T_ell) for ell in
// {2, 3}, where h is the unit-branch cofactor of the weight-2
// characteristic polynomial of T_ell at the seed's residue: on the seed
// branch each step scales by a unit, while every component over a foreign
// residue, and every non-ordinary component, loses at least one power of p
// per round in each weight specialization. Rounds should exceed prec by a
// safety margin; the weight-2 certificate decides whether they did. If the
// weight-2 scalar of the drained lift is not a unit the Dirac cell is
// retried at other primitive cells before giving up.
FamilyForm family_lift(HeckeContext& ctx, const Eigenform& seed, int m_cells,
                       int prec, int rounds);

}
