#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "quatheta/exact.hpp"

namespace qth {

// B = (a, b / Q): i^2 = a, j^2 = b, ij = -ji =: k. Definite when a, b < 0.
struct QuatAlg {
  Int a, b;
};

// Element x + y i + z j + w k over a common positive denominator.
struct Quat {
  Int x = 0, y = 0, z = 0, w = 0;
  Int d = 1;

  static Quat integer(Int n) { return {std::move(n), 0, 0, 0, 1}; }
  void normalize();
  bool operator==(const Quat& o) const;
  bool is_zero() const { return x == 0 && y == 0 && z == 0 && w == 0; }
};

Quat q_add(const Quat& p, const Quat& q);
Quat q_sub(const Quat& p, const Quat& q);
Quat q_mul(const QuatAlg& alg, const Quat& p, const Quat& q);
Quat q_conj(const Quat& p);
Quat q_scale(const Quat& p, const Rat& s);
Rat q_trd(const Quat& p);
Rat q_nrd(const QuatAlg& alg, const Quat& p);
// Inverse in B (nonzero input).
Quat q_inv(const QuatAlg& alg, const Quat& p);

// Row vector of the four coordinates as rationals.
std::vector<Rat> q_coords(const Quat& p);
Quat q_from_coords(const std::vector<Rat>& c);

// Matrix of right multiplication v -> v * q on coordinate row vectors
// (row r = coords of e_r * q), and of left multiplication v -> q * v.
RatMat rmul_matrix(const QuatAlg& alg, const Quat& q);
RatMat lmul_matrix(const QuatAlg& alg, const Quat& q);

// Full-rank Z-lattice in B: rows of b are coordinates scaled by 1/den.
// Kept in canonical form: b in HNF, den minimal positive.
struct QLat {
  IntMat b;
  Int den = 1;

  bool operator==(const QLat& o) const { return den == o.den && b == o.b; }
};

QLat lat_from_gens(const std::vector<Quat>& gens);
std::array<Quat, 4> lat_basis(const QLat& l);
bool lat_contains(const QLat& l, const Quat& q);
QLat lat_add(const QLat& a, const QLat& b);
QLat lat_intersect(const QLat& a, const QLat& b);
QLat lat_mul(const QuatAlg& alg, const QLat& a, const QLat& b);
QLat lat_scale(const QLat& a, const Rat& s);
QLat lat_mul_elt(const QuatAlg& alg, const Quat& x, const QLat& a);  // x * L
QLat lat_elt_mul(const QuatAlg& alg, const QLat& a, const Quat& x);  // L * x
QLat lat_conj(const QLat& a);
Rat lat_det(const QLat& a);  // |det| of the basis over (1,i,j,k)

// {x in B : L x <= L} and {x in B : x L <= L}.
QLat right_order(const QuatAlg& alg, const QLat& l);
QLat left_order(const QuatAlg& alg, const QLat& l);

bool is_order(const QuatAlg& alg, const QLat& l);
// Reduced discriminant of an order (positive integer d with det of the
// trace pairing equal to d^2).
Int order_disc(const QuatAlg& alg, const QLat& order);

// Gram matrix of the reduced norm on the lattice basis (positive definite
// for definite B).
RatMat nrd_gram(const QuatAlg& alg, const QLat& l);

// Reduced norm of a right ideal relative to its order: the positive rational
// with nrd(I)^4 = det(I)/det(O) ... taken as the exact 4th root.
Rat ideal_nrd(const QLat& ideal, const QLat& order);

// Distinct prime factors of |n|, ascending.
std::vector<Int> prime_factors(Int n);

// Hilbert symbol (a, b)_v for v prime or 0 meaning the infinite place.
int hilbert_symbol(Int a, Int b, const Int& v);

// Primes at which (a, b / Q) ramifies, ascending (finite places only).
std::vector<Int> ramified_primes(const QuatAlg& alg);

// Minimal |beta| with beta < 0, (-dk, beta) ramified exactly at the primes
// dividing nminus (and infinity), beta a unit square mod every q | pnplus,
// and beta a unit mod every q | dk.
Int find_beta(const Int& dk, const Int& nminus, const Int& p, const Int& nplus);

// theta = (dk + sqrt(-dk)) / 2 for dk = |disc K| = 3 mod 4; trace dk,
// norm dk(dk+1)/4. Requires alg.a == -dk.
Quat theta_elt(const Int& dk);
// O_K + O_K j inside (-dk, beta).
QLat standard_order(const QuatAlg& alg, const Int& dk);

// A maximal order containing the standard order, found by saturating with
// radical idealizers; checks the reduced discriminant equals target.
QLat maximal_order(const QuatAlg& alg, const Int& dk, const Int& target_disc);

}
