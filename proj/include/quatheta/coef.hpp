#pragma once

#include <cstdint>
#include <vector>

#include "quatheta/split.hpp"

namespace qth {

// Homogeneous polynomial of degree k-2 in X, Y with coefficients mod p^e,
// stored on the basis X^{k-2-i} Y^i, i = 0..k-2.
struct Poly {
  uint64_t p = 0;
  int e = 0;
  uint64_t pe = 0;
  int k = 2;
  std::vector<uint64_t> c;

  bool operator==(const Poly& o) const = default;
};

Poly poly_zero(uint64_t p, int e, int k);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, uint64_t s);

// Monomial basis v_m = X^{k/2-1-m} Y^{k/2-1+m} of the weight-k module,
// -(k/2-1) <= m <= k/2-1 (k even).
Poly poly_vm(uint64_t p, int e, int k, int m);

// Right substitution action (P|g)(X,Y) = P(dX - cY, -bX + aY).
Poly act_pk(const Poly& a, const Mat2& g);

// Plain left substitution P((X,Y)g) = P(aX + cY, bX + dY), no determinant
// normalization (integral for integral g).
Poly subst_lk(const Mat2& g, const Poly& a);

// rho_k(g) P = det(g)^{-(k-2)/2} P((X,Y)g); k even, det(g) a unit.
Poly rho_k(const Mat2& g, const Poly& a);

// <P,Q> = sum_i (-1)^i P_i Q_{k-2-i} / binom(k-2,i); k even, k-2 < p so the
// binomials are units. Central scalars of determinant one act trivially.
uint64_t pairing_k(const Poly& a, const Poly& b);

// Measure on the primitive vectors of (Z/p^m)^2 with values mod p^prec,
// dense table indexed x + p^m y; imprimitive entries are identically zero.
struct FiniteMeasure {
  uint64_t p = 0;
  int m = 1;
  int prec = 1;
  uint64_t pm = 0, pe = 0;
  std::vector<uint64_t> t;

  bool operator==(const FiniteMeasure& o) const = default;
};

FiniteMeasure meas_zero(uint64_t p, int m, int prec);
void meas_set(FiniteMeasure& mu, uint64_t x, uint64_t y, uint64_t v);
FiniteMeasure meas_add(const FiniteMeasure& a, const FiniteMeasure& b);
FiniteMeasure meas_sub(const FiniteMeasure& a, const FiniteMeasure& b);
FiniteMeasure meas_scale(const FiniteMeasure& a, uint64_t s);
// Augmentation: total mass.
uint64_t meas_mass(const FiniteMeasure& mu);

// (mu|g)(f) = mu(v -> f(v g)); mass landing on imprimitive vectors is
// dropped, keeping the support invariant. g taken mod p^m.
FiniteMeasure pushforward(const FiniteMeasure& mu, const Mat2& g);

// ([z] mu)(f) = mu(v -> f(z v)) for a unit z.
FiniteMeasure weight_act(const FiniteMeasure& mu, uint64_t z);

// Project from cell level m to m-1: each coarse cell gets the sum of its
// p^2 subcells.
FiniteMeasure coarsen(const FiniteMeasure& mu);

// Riemann sum of int eps(x) (xY - yX)^{k-2} dmu over {x a unit}, one sample
// per cell (the canonical lift); exact for k = 2, sampling error divisible
// by p^m otherwise. eps, when given, is a value table indexed by x mod p^m
// (unit positions only), e.g. a tame character; omitted means trivial.
Poly specialize(const FiniteMeasure& mu, int k);
Poly specialize(const FiniteMeasure& mu, int k,
                const std::vector<uint64_t>& eps);

// Binary format: magic, header (p, m, M), then the primitive cells in
// row-major order, each value as M base-p digits.
std::vector<uint8_t> meas_serialize(const FiniteMeasure& mu);
FiniteMeasure meas_deserialize(const std::vector<uint8_t>& bytes);

}
