#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

namespace qth {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using IntMat = std::vector<std::vector<Int>>;
using RatMat = std::vector<std::vector<Rat>>;

IntMat int_identity(size_t n);
IntMat int_mul(const IntMat& a, const IntMat& b);
IntMat int_transpose(const IntMat& a);
Int int_det(IntMat a);  // fraction-free elimination

RatMat rat_from_int(const IntMat& a);
RatMat rat_mul(const RatMat& a, const RatMat& b);
std::optional<RatMat> rat_inverse(RatMat a);
Rat rat_det(RatMat a);

// Row Hermite normal form: returns H with the same row span as A over Z,
// pivots positive, entries above each pivot reduced into [0, pivot), zero
// rows trimmed. If U is non-null it receives a unimodular matrix with
// U*A = H_full (H padded back with the zero rows at the bottom).
IntMat row_hnf(const IntMat& a, IntMat* u = nullptr);

// Basis (rows) of the left kernel {x : x A = 0} over Z.
IntMat left_kernel(const IntMat& a);

// floor(sqrt(q)) for q >= 0.
Int floor_sqrt(const Rat& q);
// Largest integer k with k <= c + sqrt(q), and smallest k with k >= c - sqrt(q).
Int floor_add_sqrt(const Rat& c, const Rat& q);
Int ceil_sub_sqrt(const Rat& c, const Rat& q);

// All nonzero integer vectors x, taken up to sign, with x G x^T <= bound.
// G must be symmetric positive definite. Deterministic order.
std::vector<std::vector<Int>> short_vectors(const RatMat& g, const Rat& bound);

// Basis (rows, HNF) of {v in Z^n : (v C)_e = 0 mod mods[e] for every e},
// where C is n x E and mods has E entries.
IntMat congruence_kernel(const IntMat& c, const std::vector<Int>& mods);

// Coefficients of det(xI - A), ascending, monic of degree n.
std::vector<Int> char_poly(const IntMat& a);

}
