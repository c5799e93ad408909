#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quatheta/classset.hpp"
#include "quatheta/coef.hpp"
#include "quatheta/hecke.hpp"

namespace qth {

// Algebraic automorphic form on the class set: one coefficient value per
// ideal class. Polynomial values for a fixed weight, measure values for the
// family carrier. Legal forms are invariant under the local unit action of
// each left-order stabilizer; symmetrize_* projects onto that subspace.
struct PolyForm {
  std::vector<Poly> v;
  bool operator==(const PolyForm&) const = default;
};

struct MeasForm {
  std::vector<FiniteMeasure> v;
  bool operator==(const MeasForm&) const = default;
};

PolyForm pform_zero(const ClassSet& cs, int k, int e);
PolyForm pform_add(const PolyForm& a, const PolyForm& b);
PolyForm pform_sub(const PolyForm& a, const PolyForm& b);
PolyForm pform_scale(const PolyForm& a, uint64_t s);

MeasForm mform_zero(const ClassSet& cs, int m, int prec);
MeasForm mform_add(const MeasForm& a, const MeasForm& b);
MeasForm mform_sub(const MeasForm& a, const MeasForm& b);
MeasForm mform_scale(const MeasForm& a, uint64_t s);

// Componentwise weight-k specialization. Exact at any value precision for
// k = 2; for k > 2 the sampling error is divisible by p^m, so values are
// on the nose when the precision is at most the cell level.
PolyForm specialize_form(const MeasForm& f, int k);

// Hecke operators on forms. Tables and the matching coefficient twists are
// built on demand and cached; ell == p selects U_p once the class set has
// positive level. Twists are certified inside the level monoid (lower left
// divisible by p^m, unit upper left) before use.
struct HeckeContext {
  const ClassSet* cs = nullptr;
  int e = 0;  // coefficient precision
  uint64_t pe = 0;
  // Norm-one units of each left order, one element per +-u pair; the full
  // stabilizer is these together with their negatives.
  std::vector<std::vector<Quat>> units;
  std::vector<std::vector<Mat2>> unit_mats;  // local images, mod p^e
  std::map<uint64_t, HeckeTable> tables;
  std::map<uint64_t, std::vector<std::vector<Mat2>>> twists;
};

HeckeContext make_hecke_context(const ClassSet& cs, int e);
const HeckeTable& context_table(HeckeContext& ctx, uint64_t ell);
const std::vector<std::vector<Mat2>>& context_twists(HeckeContext& ctx,
                                                     uint64_t ell);

PolyForm hecke_poly(HeckeContext& ctx, uint64_t ell, const PolyForm& f);
MeasForm hecke_meas(HeckeContext& ctx, uint64_t ell, const MeasForm& f);

// Average over each class stabilizer (projector onto legal forms).
PolyForm symmetrize_poly(const HeckeContext& ctx, const PolyForm& f);
MeasForm symmetrize_meas(const HeckeContext& ctx, const MeasForm& f);

// Dense matrices mod p^e acting on coordinate columns.
using Mat = std::vector<std::vector<uint64_t>>;

Mat mat_mul(const Mat& a, const Mat& b, uint64_t pe);
std::vector<uint64_t> mat_vec(const Mat& a, const std::vector<uint64_t>& v,
                              uint64_t pe);

// Coordinates of a polynomial form on the class-delta basis (class major,
// then descending X-degree), and the matrix of T_ell there.
std::vector<uint64_t> pform_coords(const PolyForm& f);
PolyForm pform_from_coords(const ClassSet& cs, int k, int e,
                           const std::vector<uint64_t>& c);
Mat hecke_matrix(HeckeContext& ctx, uint64_t ell, int k);
Mat symmetrizer_matrix(HeckeContext& ctx, int k);

// Ordinary projector e = lim U_p^(n!). The matrix path uses that unit
// eigenvalues satisfy x^((p-1)p^(e-1)) = 1 mod p^e on the nose: that power
// of U_p is squared until it stabilizes, and the fixed point is idempotent
// by construction. The measure path never materializes a matrix on the
// cell space: it finds a verified recurrence for U_p on the Krylov chain
// of the input and evaluates the limit in closed form as the Bezout
// idempotent separating the unit-root branch of the recurrence from the
// rest.
struct OrdTranscript {
  uint64_t base_exp = 0;    // matrix path: exponent before squaring
  int doublings = 0;        // matrix path: squarings until stable
  bool stabilized = false;
  int krylov_dim = -1;      // measure path: certified recurrence degree
};

Mat ordinary_matrix(HeckeContext& ctx, int k, int max_doublings,
                    OrdTranscript* tr);
PolyForm ordinary_poly(HeckeContext& ctx, const PolyForm& f,
                       OrdTranscript* tr);
MeasForm ordinary_meas(HeckeContext& ctx, const MeasForm& f, int budget,
                       OrdTranscript* tr);

// Eigenform cut out by residual seeds (ell, eigenvalue mod p). For each
// seeded operator the characteristic polynomial branch through the seed is
// split off by Hensel lifting and the matching spectral projector applied;
// the survivor must be one-dimensional. Eigenvalues are certified by exact
// matrix-vector comparison at full precision.
struct Eigenform {
  int k = 2;
  PolyForm form;                 // normalized: some coordinate is 1
  std::map<uint64_t, uint64_t> a;  // eigenvalues mod p^e, keyed by ell
  uint64_t up = 0;               // U_p eigenvalue when the level is positive
  bool has_up = false;
};

Eigenform eigenform_extract(HeckeContext& ctx, int k,
                            const std::vector<std::pair<uint64_t, uint64_t>>& seeds,
                            const std::vector<uint64_t>& tabulate);

// Ordinary p-stabilization: re-extract at level divisible by p with the
// unit root of X^2 - a_p X + p^(k-1) as the U_p seed, then certify that the
// tame eigenvalues agree with the level-prime-to-p form and that U_p's
// eigenvalue satisfies the Hecke quadratic at full precision.
struct Stabilization {
  Eigenform f;       // the stabilized form, on the positive-level class set
  uint64_t ap = 0;   // T_p eigenvalue below
  uint64_t alpha = 0;  // unit root = U_p eigenvalue above
};

Stabilization p_stabilize(HeckeContext& below, HeckeContext& above, int k,
                          const std::vector<std::pair<uint64_t, uint64_t>>& seeds,
                          const std::vector<uint64_t>& tabulate);

// Atkin-Lehner involution at p^m: J_i = {x in I_i : i_p(x) in tau R_p},
// tau = [[0,1],[-p^m,0]]. Each J_i has index p^(2m) in I_i and lands in the
// same genus; perm records its class, mult the reducing multiplier.
struct AtkinLehner {
  std::vector<int> perm;
  std::vector<Quat> mult;
};

AtkinLehner atkin_lehner(HeckeContext& ctx);

// Height pairing on weight-2 forms twisted by the involution:
// sum_i (2 w_i)^-1 f(b_i) g(b_tau(i)). Hecke operators are self-adjoint
// for this pairing.
uint64_t duality_pairing(HeckeContext& ctx, const AtkinLehner& al,
                         const PolyForm& f, const PolyForm& g);

}
