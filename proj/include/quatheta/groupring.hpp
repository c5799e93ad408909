#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "quatheta/abelian.hpp"
#include "quatheta/padic.hpp"

namespace qth {

// An element of (1/denom_factorial!) * (Z/p^M)[G] for a finite abelian G.
// The factorial denominator is carried symbolically and only cleared when it
// is a p-unit; that keeps every stored coefficient integral.
struct GroupRingElt {
  uint64_t p = 0;
  int M = 0;
  std::shared_ptr<const FinAbGroup> G;
  int denom_factorial = 0;
  std::vector<uint64_t> c;

  static GroupRingElt zero(uint64_t p, int M, std::shared_ptr<const FinAbGroup> G);
  static GroupRingElt dirac(uint64_t p, int M, std::shared_ptr<const FinAbGroup> G,
                            uint32_t g, uint64_t coeff = 1);

  GroupRingElt add(const GroupRingElt& o) const;
  GroupRingElt sub(const GroupRingElt& o) const;
  GroupRingElt mul(const GroupRingElt& o) const;
  GroupRingElt scale(uint64_t v) const;
  // Coefficient-wise involution g -> g^{-1}.
  GroupRingElt involute() const;
  // Sum of coefficients (image under G -> 1), including the denominator,
  // which must be a p-unit to clear.
  uint64_t augment() const;
  // Push forward along a group homomorphism given elementwise.
  GroupRingElt project(std::shared_ptr<const FinAbGroup> H,
                       const std::vector<uint32_t>& index_map) const;
  // Clear the factorial denominator by dividing coefficients; requires
  // denom_factorial! to be a p-unit (throws DivisionByNonUnit otherwise).
  GroupRingElt clear_denominator() const;

  bool eq_mod(const GroupRingElt& o, int digits) const;
  bool is_zero_mod(int digits) const;

  std::string to_json() const;
  static GroupRingElt from_json(const std::string& text);
};

// Character evaluation: the character sends the i-th mixed-radix generator
// of G to zeta^{k[i]} with zeta a primitive p^r-th root of unity; k[i] must
// satisfy k[i] * orders[i] = 0 mod p^r so the map is a homomorphism. The
// factorial denominator must be a p-unit.
CycElt eval_character(const GroupRingElt& x, int r, const std::vector<uint64_t>& k);

}
