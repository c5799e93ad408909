#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace qth {

// Residue arithmetic mod q where q = p^e fits in 64 bits; products go
// through __int128. These are the hot-path kernels; PadicApprox below is the
// precision-tracking wrapper used at API boundaries.

inline uint64_t addmod(uint64_t a, uint64_t b, uint64_t q) {
  uint64_t s = a + b;
  if (s >= q || s < a) s -= q;
  return s;
}

inline uint64_t submod(uint64_t a, uint64_t b, uint64_t q) {
  return a >= b ? a - b : a + (q - b);
}

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t q) {
  return static_cast<uint64_t>(static_cast<__uint128_t>(a) * b % q);
}

inline uint64_t negmod(uint64_t a, uint64_t q) { return a ? q - a : 0; }

uint64_t powmod(uint64_t a, uint64_t n, uint64_t q);

// p^e, checked to fit in uint64_t.
uint64_t pp_pow(uint64_t p, int e);

// v_p(x) for x != 0.
int val_p(uint64_t x, uint64_t p);

// Inverse of a unit mod p^e (throws DivisionByNonUnit if p | a).
uint64_t inv_unit(uint64_t a, uint64_t p, int e);

// Square root of a unit square mod p^e, for odd p. Empty if a is a
// non-square unit. Requires p odd and a a unit.
std::optional<uint64_t> unit_sqrt(uint64_t a, uint64_t p, int e);

// Newton lift of a simple root: f given by coefficients f[0] + f[1] x + ...
// mod p^e, r0 a root mod p with f'(r0) a unit. Returns the root mod p^e.
uint64_t hensel_root(const std::vector<uint64_t>& f, uint64_t r0, uint64_t p, int e);

// Teichmueller representative of a mod p^e (the (p-1)-st root of unity
// congruent to a mod p); a must be a unit.
uint64_t teichmuller(uint64_t a, uint64_t p, int e);

// An element of Z_p known modulo p^prec. Operations take the minimum of the
// operand precisions; dividing by p costs one digit.
struct PadicApprox {
  uint64_t p = 0;
  int prec = 0;
  uint64_t value = 0;  // in [0, p^prec)

  static PadicApprox make(uint64_t p, int prec, uint64_t v);

  PadicApprox add(const PadicApprox& o) const;
  PadicApprox sub(const PadicApprox& o) const;
  PadicApprox mul(const PadicApprox& o) const;
  PadicApprox neg() const;
  // Division by a unit (throws DivisionByNonUnit otherwise).
  PadicApprox div(const PadicApprox& o) const;
  // Exact division by p^k: requires p^k | value; precision drops by k.
  PadicApprox div_pow_p(int k) const;

  bool is_unit() const { return p != 0 && value % p != 0; }
  // valuation, capped at prec (a value of prec means "0 at this precision").
  int valuation() const;
  bool eq_mod(const PadicApprox& o, int digits) const;
};

// An element of Z_p[zeta] with zeta a primitive p^r-th root of unity, in the
// power basis 1, X, ..., X^{phi(p^r)-1} mod the p^r-th cyclotomic polynomial,
// coefficients mod p^e.
struct CycElt {
  uint64_t p = 0;
  int r = 1;
  int e = 1;
  std::vector<uint64_t> c;  // size phi(p^r) = (p-1) p^{r-1}

  static CycElt zero(uint64_t p, int r, int e);
  static CycElt scalar(uint64_t p, int r, int e, uint64_t v);
  static CycElt zeta_pow(uint64_t p, int r, int e, uint64_t k);

  int degree() const { return static_cast<int>(c.size()); }

  CycElt add(const CycElt& o) const;
  CycElt sub(const CycElt& o) const;
  CycElt mul(const CycElt& o) const;
  CycElt scale(uint64_t v) const;

  // Image under zeta -> 1 (ring map to Z/p^e).
  uint64_t augment() const;
  // Units of Z_p[zeta]: exactly the elements with unit augmentation.
  bool is_unit() const;
  bool operator==(const CycElt& o) const = default;
};

}
