#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "quatheta/abelian.hpp"
#include "quatheta/classset.hpp"
#include "quatheta/coef.hpp"
#include "quatheta/forms.hpp"
#include "quatheta/split.hpp"

namespace qth {

// p-adic data of the CM embedding K = Q(theta) -> B at the working prime:
// the two roots t, tbar of the reduced characteristic polynomial of theta
// (eigenvalues of i_p(theta)), the pinned square root of beta read off the
// splitting, delta = t - tbar (unit, p unramified), and the idempotent e
// with i_p(theta) = t e + tbar (1 - e), all mod p^prec.
//
// Orientation constant: t is the Hensel lift of the smaller residue mod p.
// Swapping t and tbar conjugates every CM point and inverts the class-group
// labels; every identity certified downstream sums over full orbits, so the
// label choice is a convention, recorded here once.
struct VarsigmaData {
  uint64_t p = 0;
  int prec = 0;
  uint64_t pe = 0;
  Int dk;
  bool split = true;
  uint64_t tr = 0, nm = 0;  // trace and norm of theta mod p^prec
  uint64_t t = 0, tbar = 0;
  uint64_t sqrt_beta = 0;
  uint64_t delta = 0;
  Mat2 idem;
  int s = 0;   // conductor exponent this instance was built for
  Mat2 mat;    // the conductor-p^s adele component at p
};

// The adele component at p of a conductor-p^s CM point:
// [[t,-1],[1,0]] diag(p^s, 1) when p splits in K, [[0,1],[-1,0]] diag(p^s, 1)
// when p is inert. det = p^s times a unit. Components away from p are
// trivial for this instance (no split tame level).
VarsigmaData build_varsigma(const ClassSet& cs, int s);
Mat2 varsigma_matrix(const VarsigmaData& vs, int s);

// [[1, sqrt_beta],[0, p^n sqrt_beta delta]] (split case): conjugates the
// unit group of Z + p^n O_K into the diagonal torus, which is what makes
// pairings against its image independent of idele representatives.
// det = p^n sqrt_beta delta.
Mat2 z_matrix(const VarsigmaData& vs, int n);

// i_p of the idele equal to u at the place of t and 1 elsewhere:
// u e + (1 - e).
Mat2 idele_matrix(const VarsigmaData& vs, uint64_t u);

// A conductor-p^{n+m} CM point on the level-p^m class set, stored as the
// explicit p-component of its adele; all other components are trivial
// (class representatives have 2-power norm, tame split level is 1).
// det(adele) = unit * p^s with s = n + m.
struct GrossPoint {
  int n = 0;
  int m = 0;
  int s = 0;
  Mat2 adele;
};

// Constructs the base point and certifies both embedding conditions at
// conductor p^{n+m}: the order cut out of K by the conjugated level order
// is exactly Z + p^{n+m} O_K, and the wild unit congruence below matches.
// Throws heegner-optimality when either certificate fails.
GrossPoint gross_point(const ClassSet& cs, const VarsigmaData& vs, int n);

// Exact c with K cap (adele R_m adele^{-1}) = Z + p^c O_K, computed as a
// congruence kernel over the basis {1, theta}. s is the determinant
// valuation of the adele.
int conductor_exponent(const ClassSet& cs, const Mat2& adele, int s);

// Wild congruence condition at level m: inside Z + p^cexp O_K, the units
// congruent to 1 mod p^m O_K coincide with the units the adele conjugates
// into 1 + (upper triangular mod p^m). Both sides contain 1, so this is an
// equality of difference lattices.
bool wild_optimal(const ClassSet& cs, const Mat2& adele, int s, int cexp);

// The class group of Z + p^n O_K for class number one K: cyclic, generated
// by the image of a fixed primitive root mod p^n modulo the image of the
// unit torsion of O_K. Class i carries the canonical idele representative
// (unit[i], 1) supported at the places above p (stored as the plain integer
// lift), and a representative prime ideal (ideal_ell[i], theta - ideal_r[i])
// coprime to p and the quaternion discriminant.
struct PicardGroupData {
  int n = 0;
  uint64_t p = 0;
  uint64_t pn = 1;
  uint64_t order = 1;
  uint64_t gen = 1;
  std::shared_ptr<const FinAbGroup> grp;
  std::vector<uint64_t> unit;
  std::vector<uint64_t> ideal_ell;
  std::vector<uint64_t> ideal_r;
};

// Requires p split in K and h_K = 1 (certified against the reduced binary
// quadratic form count of discriminant -dk). The group order is checked
// against the order-class-number formula h_K p^{n-1}(p - 1) / [O_K^x : O^x].
PicardGroupData picard_group(const VarsigmaData& vs, int n);

// Index of the class containing the unit idele (u, 1), by discrete
// logarithm modulo the torsion image.
uint64_t unit_class(const PicardGroupData& g, uint64_t u);

// P^sigma for sigma the class cls: multiply the adele on the right by
// idele_matrix(unit[cls]). Conductor and level are preserved; requires
// g.n == P.s since the action on conductor-p^s points factors through the
// level-p^s class group and coarser labels would leave the value of a
// positive-weight form depending on the lift.
GrossPoint galois_translate(const VarsigmaData& vs, const PicardGroupData& g,
                            const GrossPoint& P, uint64_t cls);

// Certified reduction of a point adele to the class set: adele = i_p(x) u
// locally at p with x the global multiplier of the congruence ideal
// {v : i_p(v) in adele R_p}, and u a unit of the level order recorded mod
// p^val_e, val_e = prec - s. Values of forms at the point are the class
// coefficient twisted by u.
struct PointCoset {
  int cls = 0;
  Mat2 u;
  int val_e = 0;
};

PointCoset reduce_point(const ClassSet& cs, const GrossPoint& P);

// Value of a form at a point: f.v[cls] | u. Polynomial values need
// coefficient precision at most val_e; measure values need both the value
// precision and the cell level within val_e. The constant weight-2 form
// evaluates to 1 at every point.
Poly evaluate_at_point(HeckeContext& ctx, const PolyForm& f,
                       const GrossPoint& P);
FiniteMeasure evaluate_at_point(HeckeContext& ctx, const MeasForm& f,
                                const GrossPoint& P);

// Convenience composition: value at the cls-translate of P.
Poly evaluate_at_point(HeckeContext& ctx, const PolyForm& f,
                       const VarsigmaData& vs, const PicardGroupData& g,
                       const GrossPoint& P, uint64_t cls);

}
