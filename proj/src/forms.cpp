#include "quatheta/forms.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "quatheta/error.hpp"
#include "quatheta/padic.hpp"
#include "quatheta/upoly.hpp"

namespace qth {

namespace {

uint64_t int_residue(const Int& n, uint64_t pe) {
  Int r = n % pe;
  if (r < 0) r += pe;
  return r.convert_to<uint64_t>();
}

uint64_t rat_residue(const Rat& r, uint64_t p, int e, uint64_t pe) {
  Int den = denominator(r);
  require(den % p != 0, "forms-residue", "denominator not a unit at p");
  return mulmod(int_residue(numerator(r), pe),
                inv_unit(int_residue(den, pe), p, e), pe);
}

int val_capped(uint64_t x, uint64_t p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (x % p == 0 && v < cap) { x /= p; ++v; }
  return v;
}

void check_pform(const ClassSet& cs, const PolyForm& f) {
  require(f.v.size() == cs.reps.size(), "forms-shape",
          "form does not match the class set");
  for (const auto& a : f.v)
    require(a.p == cs.p && a.k == f.v[0].k && a.e == f.v[0].e, "forms-shape",
            "mixed weights or precisions in one form");
}

void check_mform(const ClassSet& cs, const MeasForm& f) {
  require(f.v.size() == cs.reps.size(), "forms-shape",
          "form does not match the class set");
  for (const auto& a : f.v)
    require(a.p == cs.p && a.m == f.v[0].m && a.prec == f.v[0].prec,
            "forms-shape", "mixed cell levels or precisions in one form");
}

}  // namespace

PolyForm pform_zero(const ClassSet& cs, int k, int e) {
  PolyForm f;
  f.v.assign(cs.reps.size(), poly_zero(cs.p, e, k));
  return f;
}

PolyForm pform_add(const PolyForm& a, const PolyForm& b) {
  require(a.v.size() == b.v.size(), "forms-shape", "class counts differ");
  PolyForm r = a;
  for (size_t i = 0; i < r.v.size(); i++) r.v[i] = poly_add(a.v[i], b.v[i]);
  return r;
}

PolyForm pform_sub(const PolyForm& a, const PolyForm& b) {
  require(a.v.size() == b.v.size(), "forms-shape", "class counts differ");
  PolyForm r = a;
  for (size_t i = 0; i < r.v.size(); i++) r.v[i] = poly_sub(a.v[i], b.v[i]);
  return r;
}

PolyForm pform_scale(const PolyForm& a, uint64_t s) {
  PolyForm r = a;
  for (auto& x : r.v) x = poly_scale(x, s);
  return r;
}

MeasForm mform_zero(const ClassSet& cs, int m, int prec) {
  MeasForm f;
  f.v.assign(cs.reps.size(), meas_zero(cs.p, m, prec));
  return f;
}

MeasForm mform_add(const MeasForm& a, const MeasForm& b) {
  require(a.v.size() == b.v.size(), "forms-shape", "class counts differ");
  MeasForm r = a;
  for (size_t i = 0; i < r.v.size(); i++) r.v[i] = meas_add(a.v[i], b.v[i]);
  return r;
}

MeasForm mform_sub(const MeasForm& a, const MeasForm& b) {
  require(a.v.size() == b.v.size(), "forms-shape", "class counts differ");
  MeasForm r = a;
  for (size_t i = 0; i < r.v.size(); i++) r.v[i] = meas_sub(a.v[i], b.v[i]);
  return r;
}

MeasForm mform_scale(const MeasForm& a, uint64_t s) {
  MeasForm r = a;
  for (auto& x : r.v) x = meas_scale(x, s);
  return r;
}

PolyForm specialize_form(const MeasForm& f, int k) {
  PolyForm r;
  r.v.reserve(f.v.size());
  for (const auto& mu : f.v) r.v.push_back(specialize(mu, k));
  return r;
}

HeckeContext make_hecke_context(const ClassSet& cs, int e) {
  require(e >= 1 && e <= cs.prec, "forms-precision",
          "coefficient precision exceeds the stored splitting");
  HeckeContext ctx;
  ctx.cs = &cs;
  ctx.e = e;
  ctx.pe = pp_pow(cs.p, e);
  uint64_t pm = pp_pow(cs.p, cs.m);
  for (size_t i = 0; i < cs.reps.size(); i++) {
    auto basis = lat_basis(cs.lorders[i]);
    auto sv = short_vectors(nrd_gram(cs.alg, cs.lorders[i]), Rat(1));
    std::vector<Quat> us;
    std::vector<Mat2> ms;
    for (const auto& x : sv) {
      Quat u = Quat::integer(0);
      for (size_t r = 0; r < 4; r++)
        u = q_add(u, q_scale(basis[r], Rat(x[r])));
      if (q_nrd(cs.alg, u) != 1) continue;
      Mat2 mm = m2_reduce(cs.sp.eval(u), ctx.pe);
      require(mm.c % pm == 0, "forms-unit",
              "left-order unit leaves the level monoid");
      require(m2_det(mm, ctx.pe) % cs.p != 0, "forms-unit",
              "left-order unit image not invertible");
      us.push_back(u);
      ms.push_back(mm);
    }
    require(Int(us.size()) == cs.weights[i], "forms-unit",
            "norm-one unit count disagrees with the class weight");
    ctx.units.push_back(std::move(us));
    ctx.unit_mats.push_back(std::move(ms));
  }
  return ctx;
}

const HeckeTable& context_table(HeckeContext& ctx, uint64_t ell) {
  auto it = ctx.tables.find(ell);
  if (it != ctx.tables.end()) return it->second;
  const ClassSet& cs = *ctx.cs;
  HeckeTable t = (ell == cs.p && cs.m >= 1) ? up_table(cs)
                                            : hecke_table(cs, ell);
  return ctx.tables.emplace(ell, std::move(t)).first->second;
}

const std::vector<std::vector<Mat2>>& context_twists(HeckeContext& ctx,
                                                     uint64_t ell) {
  auto it = ctx.twists.find(ell);
  if (it != ctx.twists.end()) return it->second;
  const ClassSet& cs = *ctx.cs;
  const HeckeTable& t = context_table(ctx, ell);
  uint64_t pe = ctx.pe;
  uint64_t pm = pp_pow(cs.p, cs.m);
  std::vector<std::vector<Mat2>> tw(t.rows.size());
  for (size_t i = 0; i < t.rows.size(); i++) {
    for (const auto& entry : t.rows[i]) {
      // The coefficient twist of a coset multiplier x is det((h_a)_p) times
      // the inverse of i_p(x): the adjugate scaled by the unit
      // nrd(x) / det((h_a)_p). Since i_p(x) = h_a u with u a level-order
      // unit, the twist equals u^-1 adj(h_a) and stays in the level monoid.
      Mat2 img = m2_reduce(cs.sp.eval(entry.mult), pe);
      Rat sc = q_nrd(cs.alg, entry.mult);
      if (t.at_p) sc /= Int(cs.p);
      uint64_t su = rat_residue(sc, cs.p, ctx.e, pe);
      require(su % cs.p != 0, "forms-twist",
              "coset norm does not match the table's determinant content");
      Mat2 w = m2_scale(m2_adj(img, pe), inv_unit(su, cs.p, ctx.e), pe);
      require(w.c % pm == 0, "forms-twist", "twist leaves the level monoid");
      if (cs.m >= 1)
        require(w.a % cs.p != 0, "forms-twist", "twist upper-left not a unit");
      uint64_t det = m2_det(w, pe);
      if (t.at_p)
        require(det % cs.p == 0 &&
                    (ctx.e == 1 || (det / cs.p) % cs.p != 0),
                "forms-twist", "twist determinant valuation is not one");
      else
        require(det % cs.p != 0, "forms-twist",
                "twist determinant is not a unit");
      tw[i].push_back(w);
    }
  }
  return ctx.twists.emplace(ell, std::move(tw)).first->second;
}

PolyForm hecke_poly(HeckeContext& ctx, uint64_t ell, const PolyForm& f) {
  const ClassSet& cs = *ctx.cs;
  check_pform(cs, f);
  require(f.v[0].e <= ctx.e, "forms-precision",
          "form precision exceeds the context");
  const HeckeTable& t = context_table(ctx, ell);
  const auto& tw = context_twists(ctx, ell);
  PolyForm out = pform_zero(cs, f.v[0].k, f.v[0].e);
  for (size_t i = 0; i < t.rows.size(); i++)
    for (size_t a = 0; a < t.rows[i].size(); a++)
      out.v[i] = poly_add(out.v[i],
                          act_pk(f.v[t.rows[i][a].cls], tw[i][a]));
  return out;
}

MeasForm hecke_meas(HeckeContext& ctx, uint64_t ell, const MeasForm& f) {
  const ClassSet& cs = *ctx.cs;
  check_mform(cs, f);
  require(f.v[0].m <= ctx.e, "forms-precision",
          "cell level exceeds the twist precision");
  const HeckeTable& t = context_table(ctx, ell);
  const auto& tw = context_twists(ctx, ell);
  MeasForm out = mform_zero(cs, f.v[0].m, f.v[0].prec);
  for (size_t i = 0; i < t.rows.size(); i++)
    for (size_t a = 0; a < t.rows[i].size(); a++)
      out.v[i] = meas_add(out.v[i],
                          pushforward(f.v[t.rows[i][a].cls], tw[i][a]));
  return out;
}

PolyForm symmetrize_poly(const HeckeContext& ctx, const PolyForm& f) {
  const ClassSet& cs = *ctx.cs;
  check_pform(cs, f);
  uint64_t pe = f.v[0].pe;
  int e = f.v[0].e;
  PolyForm out = pform_zero(cs, f.v[0].k, e);
  for (size_t i = 0; i < f.v.size(); i++) {
    // Sum over the full unit group {+-u}; both signs matter for the cell
    // action even though they agree on even-weight polynomials.
    for (const auto& u : ctx.unit_mats[i]) {
      out.v[i] = poly_add(out.v[i], act_pk(f.v[i], u));
      out.v[i] = poly_add(out.v[i], act_pk(f.v[i], m2_scale(u, pe - 1, pe)));
    }
    uint64_t ord = int_residue(2 * cs.weights[i], pe);
    out.v[i] = poly_scale(out.v[i], inv_unit(ord, cs.p, e));
  }
  return out;
}

MeasForm symmetrize_meas(const HeckeContext& ctx, const MeasForm& f) {
  const ClassSet& cs = *ctx.cs;
  check_mform(cs, f);
  require(f.v[0].m <= ctx.e, "forms-precision",
          "cell level exceeds the twist precision");
  uint64_t pe = f.v[0].pe;
  int e = f.v[0].prec;
  MeasForm out = mform_zero(cs, f.v[0].m, e);
  for (size_t i = 0; i < f.v.size(); i++) {
    for (const auto& u : ctx.unit_mats[i]) {
      out.v[i] = meas_add(out.v[i], pushforward(f.v[i], u));
      out.v[i] = meas_add(out.v[i],
                          pushforward(f.v[i], m2_scale(u, ctx.pe - 1, ctx.pe)));
    }
    uint64_t ord = int_residue(2 * cs.weights[i], pe);
    out.v[i] = meas_scale(out.v[i], inv_unit(ord, cs.p, e));
  }
  return out;
}

Mat mat_mul(const Mat& a, const Mat& b, uint64_t pe) {
  size_t n = a.size(), m = b[0].size(), l = b.size();
  Mat r(n, std::vector<uint64_t>(m, 0));
  for (size_t i = 0; i < n; i++)
    for (size_t t = 0; t < l; t++) {
      uint64_t x = a[i][t];
      if (x == 0) continue;
      for (size_t j = 0; j < m; j++)
        r[i][j] = addmod(r[i][j], mulmod(x, b[t][j], pe), pe);
    }
  return r;
}

std::vector<uint64_t> mat_vec(const Mat& a, const std::vector<uint64_t>& v,
                              uint64_t pe) {
  std::vector<uint64_t> r(a.size(), 0);
  for (size_t i = 0; i < a.size(); i++)
    for (size_t j = 0; j < v.size(); j++)
      r[i] = addmod(r[i], mulmod(a[i][j], v[j], pe), pe);
  return r;
}

std::vector<uint64_t> pform_coords(const PolyForm& f) {
  std::vector<uint64_t> c;
  for (const auto& a : f.v) c.insert(c.end(), a.c.begin(), a.c.end());
  return c;
}

PolyForm pform_from_coords(const ClassSet& cs, int k, int e,
                           const std::vector<uint64_t>& c) {
  PolyForm f = pform_zero(cs, k, e);
  require(c.size() == f.v.size() * size_t(k - 1), "forms-shape",
          "coordinate length does not match");
  size_t at = 0;
  for (auto& a : f.v)
    for (auto& x : a.c) x = c[at++] % a.pe;
  return f;
}

namespace {

Mat mat_id(size_t n) {
  Mat r(n, std::vector<uint64_t>(n, 0));
  for (size_t i = 0; i < n; i++) r[i][i] = 1;
  return r;
}

Mat mat_pow(Mat a, uint64_t n, uint64_t pe) {
  Mat r = mat_id(a.size());
  while (n) {
    if (n & 1) r = mat_mul(r, a, pe);
    n >>= 1;
    if (n) a = mat_mul(a, a, pe);
  }
  return r;
}

Mat op_matrix(HeckeContext& ctx, int k,
              const std::function<PolyForm(const PolyForm&)>& op) {
  const ClassSet& cs = *ctx.cs;
  size_t n = cs.reps.size() * size_t(k - 1);
  Mat m(n, std::vector<uint64_t>(n, 0));
  for (size_t j = 0; j < n; j++) {
    std::vector<uint64_t> delta(n, 0);
    delta[j] = 1;
    auto col = pform_coords(op(pform_from_coords(cs, k, ctx.e, delta)));
    for (size_t i = 0; i < n; i++) m[i][j] = col[i];
  }
  return m;
}

}  // namespace

Mat hecke_matrix(HeckeContext& ctx, uint64_t ell, int k) {
  return op_matrix(ctx, k, [&](const PolyForm& f) {
    return hecke_poly(ctx, ell, f);
  });
}

Mat symmetrizer_matrix(HeckeContext& ctx, int k) {
  return op_matrix(ctx, k, [&](const PolyForm& f) {
    return symmetrize_poly(ctx, f);
  });
}

namespace {

// Squares a until it stabilizes; the fixed point is idempotent on the nose.
Mat stabilize_power(Mat a, uint64_t pe, int max_doublings, OrdTranscript* tr) {
  for (int t = 0; t <= max_doublings; t++) {
    Mat b = mat_mul(a, a, pe);
    if (b == a) {
      if (tr) {
        tr->doublings = t;
        tr->stabilized = true;
      }
      return a;
    }
    a = std::move(b);
  }
  fail("forms-ordinary", "projector power did not stabilize within budget");
}

}  // namespace

Mat ordinary_matrix(HeckeContext& ctx, int k, int max_doublings,
                    OrdTranscript* tr) {
  const ClassSet& cs = *ctx.cs;
  require(cs.m >= 1, "forms-ordinary",
          "ordinary projector needs positive wild level");
  uint64_t base = uint64_t(cs.p - 1) * pp_pow(cs.p, ctx.e - 1);
  if (tr) *tr = OrdTranscript{base, 0, false};
  Mat u = hecke_matrix(ctx, cs.p, k);
  return stabilize_power(mat_pow(std::move(u), base, ctx.pe), ctx.pe,
                         max_doublings, tr);
}

PolyForm ordinary_poly(HeckeContext& ctx, const PolyForm& f,
                       OrdTranscript* tr) {
  check_pform(*ctx.cs, f);
  require(f.v[0].e == ctx.e, "forms-precision",
          "ordinary projector wants the context precision");
  Mat e = ordinary_matrix(ctx, f.v[0].k, 64, tr);
  return pform_from_coords(*ctx.cs, f.v[0].k, ctx.e,
                           mat_vec(e, pform_coords(f), ctx.pe));
}

namespace {

std::vector<uint64_t> mform_flat(const MeasForm& f) {
  std::vector<uint64_t> r;
  for (const auto& mu : f.v) r.insert(r.end(), mu.t.begin(), mu.t.end());
  return r;
}

// Try to solve sum_s c_s cols[s] = w mod p^e. Elimination picks the
// remaining entry of least valuation each round, so divisions stay exact;
// the candidate is verified against the original system before being
// returned, making a wrong answer impossible (only a missed one, which the
// caller treats as independence).
std::optional<std::vector<uint64_t>> solve_columns(
    const std::vector<std::vector<uint64_t>>& cols,
    const std::vector<uint64_t>& w, uint64_t p, int e, uint64_t pe) {
  size_t n = w.size(), nc = cols.size();
  std::vector<std::vector<uint64_t>> aug(n, std::vector<uint64_t>(nc + 1));
  for (size_t r = 0; r < n; r++) {
    for (size_t s = 0; s < nc; s++) aug[r][s] = cols[s][r];
    aug[r][nc] = w[r];
  }
  std::vector<char> rowdone(n, 0), coldone(nc, 0);
  struct Piv {
    size_t r, s;
    int a;
    uint64_t uinv;
  };
  std::vector<Piv> pivs;
  while (true) {
    int best = e;
    size_t br = n, bs = nc;
    for (size_t r = 0; r < n; r++) {
      if (rowdone[r]) continue;
      for (size_t s = 0; s < nc; s++) {
        if (coldone[s] || aug[r][s] == 0) continue;
        int v = val_capped(aug[r][s], p, e);
        if (v < best) { best = v; br = r; bs = s; }
      }
    }
    if (br == n) break;
    uint64_t pa = pp_pow(p, best);
    uint64_t uinv = inv_unit((aug[br][bs] / pa) % pe, p, e);
    for (size_t r = 0; r < n; r++) {
      if (r == br || rowdone[r] || aug[r][bs] == 0) continue;
      uint64_t c = mulmod((aug[r][bs] / pa) % pe, uinv, pe);
      for (size_t s = 0; s <= nc; s++)
        aug[r][s] = submod(aug[r][s], mulmod(c, aug[br][s], pe), pe);
    }
    pivs.push_back({br, bs, best, uinv});
    rowdone[br] = 1;
    coldone[bs] = 1;
  }
  for (size_t r = 0; r < n; r++)
    if (!rowdone[r] && aug[r][nc] != 0) return std::nullopt;
  std::vector<uint64_t> c(nc, 0);
  for (size_t t = pivs.size(); t-- > 0;) {
    const Piv& pv = pivs[t];
    uint64_t rhs = aug[pv.r][nc];
    for (size_t s = 0; s < nc; s++)
      if (s != pv.s && c[s] != 0)
        rhs = submod(rhs, mulmod(aug[pv.r][s], c[s], pe), pe);
    uint64_t pa = pp_pow(p, pv.a);
    if (rhs % pa != 0) return std::nullopt;
    c[pv.s] = mulmod((rhs / pa) % pe, pv.uinv, pe);
  }
  for (size_t r = 0; r < n; r++) {
    uint64_t acc = 0;
    for (size_t s = 0; s < nc; s++)
      acc = addmod(acc, mulmod(c[s], cols[s][r], pe), pe);
    if (acc != w[r] % pe) return std::nullopt;
  }
  return c;
}

}  // namespace

MeasForm ordinary_meas(HeckeContext& ctx, const MeasForm& f, int budget,
                       OrdTranscript* tr) {
  const ClassSet& cs = *ctx.cs;
  check_mform(cs, f);
  require(cs.m >= 1, "forms-ordinary",
          "ordinary projector needs positive wild level");
  require(f.v[0].m <= ctx.e, "forms-precision",
          "cell level exceeds the twist precision");
  int prec = f.v[0].prec;
  uint64_t pe = f.v[0].pe, p = cs.p;
  if (tr) *tr = OrdTranscript{0, 0, false, -1};

  // Krylov chain U_p^j f until a verified recurrence g(U_p)f = 0. Inside
  // Z/p^prec[X]/(g) the limit of X^(n!) is computable in closed form: split
  // g at the residue 0 into a branch with non-unit roots and a branch with
  // unit constant term; the limit is the Bezout idempotent that is 1 on the
  // unit branch and 0 on the other (non-unit powers die under n!, units
  // reach 1 once their order divides n!). Evaluating that polynomial on the
  // chain gives e(f) exactly, and e(e(f)) = e(f) is then an algebraic
  // identity modulo the certified recurrence.
  std::vector<MeasForm> kry = {f};
  std::vector<std::vector<uint64_t>> flats = {mform_flat(f)};
  bool zero = true;
  for (uint64_t x : flats[0])
    if (x != 0) { zero = false; break; }
  if (zero) {
    if (tr) { tr->krylov_dim = 0; tr->stabilized = true; }
    return f;
  }
  size_t d = 0;
  std::vector<uint64_t> relation;
  for (int j = 1; j <= budget; j++) {
    kry.push_back(hecke_meas(ctx, cs.p, kry.back()));
    flats.push_back(mform_flat(kry.back()));
    if (j > 32 && j % (j > 96 ? 4 : 8) != 0 && j != budget) continue;
    auto c = solve_columns(
        {flats.begin(), flats.end() - 1}, flats.back(), p, prec, pe);
    if (c) {
      relation = std::move(*c);
      d = size_t(j);
      break;
    }
  }
  require(d > 0, "forms-ordinary",
          "no certified recurrence for U_p within the chain budget");
  if (tr) tr->krylov_dim = int(d);

  std::vector<uint64_t> g(d + 1, 0);
  g[d] = 1;
  for (size_t i = 0; i < d; i++) g[i] = submod(0, relation[i], pe);
  std::vector<uint64_t> epoly;
  if (up_eval(g, 0, pe) % p != 0) {
    epoly = {1};  // U_p invertible on the whole cyclic span
  } else {
    auto [g0, g1] = up_branch_split(g, 0, p, prec);
    if (g1.size() == 1) {
      epoly = {};  // every root is a non-unit: the limit is zero
    } else {
      auto [ba, bb] = up_bezout(g0, g1, p, prec);
      epoly = up_mul(ba, g0, pe);  // deg < d, no reduction needed
      auto sq = up_divmod(up_mul(epoly, epoly, pe), g, pe).second;
      require(up_trim(sq) == up_trim(epoly), "forms-ordinary",
              "branch idempotent fails its own square check");
    }
  }
  MeasForm out = mform_scale(f, 0);
  for (size_t j = 0; j < epoly.size(); j++)
    if (epoly[j]) out = mform_add(out, mform_scale(kry[j], epoly[j]));
  if (tr) tr->stabilized = true;
  return out;
}

namespace {

// Reduced column echelon basis of a span, with unit pivots. Saturation is
// forced: a generating set of a direct summand must reduce to unit pivots,
// anything else trips the certificate.
struct SubBasis {
  std::vector<std::vector<uint64_t>> cols;
  std::vector<size_t> piv;
};

SubBasis echelon_image(const std::vector<std::vector<uint64_t>>& gens,
                       uint64_t p, uint64_t pe, int e) {
  SubBasis b;
  // A generator divisible by p may still be expressible over pivots that
  // appear later in the list, so such columns are deferred and retried.
  // Once a pass produces no new pivot the deferred columns have been
  // reduced against the complete basis, and any nonzero leftover really
  // does witness a non-saturated span.
  std::vector<std::vector<uint64_t>> todo = gens;
  while (!todo.empty()) {
    std::vector<std::vector<uint64_t>> defer;
    bool progress = false;
    for (auto& w0 : todo) {
      auto w = std::move(w0);
      for (size_t s = 0; s < b.cols.size(); s++) {
        uint64_t c = w[b.piv[s]];
        if (c == 0) continue;
        for (size_t r = 0; r < w.size(); r++)
          w[r] = submod(w[r], mulmod(c, b.cols[s][r], pe), pe);
      }
      size_t pos = w.size();
      for (size_t r = 0; r < w.size(); r++)
        if (w[r] % p != 0) { pos = r; break; }
      if (pos == w.size()) {
        for (uint64_t x : w)
          if (x != 0) {
            defer.push_back(std::move(w));
            break;
          }
        continue;
      }
      uint64_t sc = inv_unit(w[pos], p, e);
      for (auto& x : w) x = mulmod(x, sc, pe);
      for (size_t s = 0; s < b.cols.size(); s++) {
        uint64_t c = b.cols[s][pos];
        if (c == 0) continue;
        for (size_t r = 0; r < w.size(); r++)
          b.cols[s][r] = submod(b.cols[s][r], mulmod(c, w[r], pe), pe);
      }
      b.piv.push_back(pos);
      b.cols.push_back(std::move(w));
      progress = true;
    }
    require(defer.empty() || progress, "forms-saturate",
            "span of an idempotent image is not saturated");
    todo = std::move(defer);
  }
  return b;
}

std::vector<std::vector<uint64_t>> mat_cols(const Mat& m) {
  std::vector<std::vector<uint64_t>> c(m[0].size(),
                                       std::vector<uint64_t>(m.size()));
  for (size_t i = 0; i < m.size(); i++)
    for (size_t j = 0; j < m[i].size(); j++) c[j][i] = m[i][j];
  return c;
}

// Coordinates of u on the reduced echelon basis; exactness is the runtime
// certificate that the subspace really is preserved.
std::vector<uint64_t> basis_coords(const SubBasis& b,
                                   const std::vector<uint64_t>& u,
                                   uint64_t pe, const char* what) {
  std::vector<uint64_t> c(b.cols.size());
  for (size_t s = 0; s < b.cols.size(); s++) c[s] = u[b.piv[s]];
  for (size_t r = 0; r < u.size(); r++) {
    uint64_t acc = 0;
    for (size_t s = 0; s < b.cols.size(); s++)
      acc = addmod(acc, mulmod(c[s], b.cols[s][r], pe), pe);
    require(acc == u[r] % pe, "forms-invariance", what);
  }
  return c;
}

// Matrix of T_ell restricted to the span of the basis columns, certified
// exact (the operator must preserve the span mod p^e).
Mat restrict_op(HeckeContext& ctx, uint64_t ell, int k, const SubBasis& b) {
  const ClassSet& cs = *ctx.cs;
  size_t d = b.cols.size();
  Mat m(d, std::vector<uint64_t>(d, 0));
  for (size_t s = 0; s < d; s++) {
    auto tf = pform_coords(
        hecke_poly(ctx, ell, pform_from_coords(cs, k, ctx.e, b.cols[s])));
    auto c = basis_coords(b, tf, ctx.pe,
                          "operator leaves the invariant subspace");
    for (size_t r = 0; r < d; r++) m[r][s] = c[r];
  }
  return m;
}

std::vector<uint64_t> charpoly_mod(const Mat& m, uint64_t pe) {
  IntMat a(m.size(), std::vector<Int>(m.size()));
  for (size_t i = 0; i < m.size(); i++)
    for (size_t j = 0; j < m.size(); j++) a[i][j] = Int(m[i][j]);
  auto cp = char_poly(a);
  std::vector<uint64_t> f(cp.size());
  for (size_t i = 0; i < cp.size(); i++) f[i] = int_residue(cp[i], pe);
  return f;
}

Mat up_eval_mat(const std::vector<uint64_t>& q, const Mat& x, uint64_t pe) {
  size_t n = x.size();
  Mat r(n, std::vector<uint64_t>(n, 0));
  for (size_t i = q.size(); i-- > 0;) {
    r = mat_mul(r, x, pe);
    for (size_t t = 0; t < n; t++) r[t][t] = addmod(r[t][t], q[i], pe);
  }
  return r;
}

}  // namespace

Eigenform eigenform_extract(
    HeckeContext& ctx, int k,
    const std::vector<std::pair<uint64_t, uint64_t>>& seeds,
    const std::vector<uint64_t>& tabulate) {
  const ClassSet& cs = *ctx.cs;
  require(!seeds.empty(), "forms-eigen", "no residual seeds given");
  uint64_t p = cs.p, pe = ctx.pe;

  Mat sym = symmetrizer_matrix(ctx, k);
  SubBasis basis = echelon_image(mat_cols(sym), p, pe, ctx.e);
  require(!basis.cols.empty(), "forms-eigen",
          "no stabilizer-invariant forms at this weight");

  for (const auto& [ell, res] : seeds) {
    Mat t = restrict_op(ctx, ell, k, basis);
    auto f = charpoly_mod(t, pe);
    require(up_eval(f, res % p, p) % p == 0, "forms-eigen-missing",
            "seed residue is not an eigenvalue of the restricted operator");
    auto [g1, h1] = up_branch_split(f, res % p, p, ctx.e);
    auto [bu, bv] = up_bezout(g1, h1, p, ctx.e);
    Mat proj = up_eval_mat(up_mul(bv, h1, pe), t, pe);
    require(mat_mul(proj, proj, pe) == proj, "forms-eigen",
            "branch projector is not idempotent");
    SubBasis inner = echelon_image(mat_cols(proj), p, pe, ctx.e);
    require(!inner.cols.empty(), "forms-eigen-missing",
            "seeded eigensystem was eliminated by a later operator");
    std::vector<std::vector<uint64_t>> amb;
    for (const auto& ic : inner.cols) {
      std::vector<uint64_t> col(basis.cols[0].size(), 0);
      for (size_t s = 0; s < basis.cols.size(); s++) {
        if (ic[s] == 0) continue;
        for (size_t r = 0; r < col.size(); r++)
          col[r] = addmod(col[r], mulmod(ic[s], basis.cols[s][r], pe), pe);
      }
      amb.push_back(std::move(col));
    }
    basis = echelon_image(amb, p, pe, ctx.e);
  }
  require(basis.cols.size() == 1, "forms-eigen-multiplicity",
          "seeded eigenspace is not one-dimensional");

  Eigenform out;
  out.k = k;
  out.form = pform_from_coords(cs, k, ctx.e, basis.cols[0]);

  std::vector<uint64_t> ells = tabulate;
  for (const auto& [ell, res] : seeds) ells.push_back(ell);
  std::sort(ells.begin(), ells.end());
  ells.erase(std::unique(ells.begin(), ells.end()), ells.end());
  size_t tame = 0, eis = 0;
  for (uint64_t ell : ells) {
    auto tf = pform_coords(hecke_poly(ctx, ell, out.form));
    uint64_t a = tf[basis.piv[0]];
    auto cf = basis_coords(basis, tf, pe, "eigenvector response not scalar");
    require(cf.size() == 1 && cf[0] == a, "forms-eigen",
            "eigenvalue read-off mismatch");
    if (ell == p && cs.m >= 1) {
      out.up = a;
      out.has_up = true;
    } else {
      out.a[ell] = a;
      tame++;
      if (a == (ell + 1) % pe) eis++;
    }
  }
  for (const auto& [ell, res] : seeds) {
    uint64_t a = (ell == p && cs.m >= 1) ? out.up : out.a[ell];
    require((a + p - res % p) % p == 0, "forms-eigen",
            "certified eigenvalue drifts from its seed");
  }
  require(tame == 0 || eis < tame, "forms-eigen-eisenstein",
          "responses match the constant series at every tame prime");
  return out;
}

Stabilization p_stabilize(
    HeckeContext& below, HeckeContext& above, int k,
    const std::vector<std::pair<uint64_t, uint64_t>>& seeds,
    const std::vector<uint64_t>& tabulate) {
  const ClassSet& cs0 = *below.cs;
  const ClassSet& cs1 = *above.cs;
  require(cs0.m == 0 && cs1.m >= 1 && cs0.p == cs1.p && cs0.dk == cs1.dk,
          "forms-stabilize", "need matching class sets at level 1 and p^m");
  require(below.e == above.e, "forms-stabilize", "precision mismatch");
  uint64_t p = cs0.p, pe = below.pe;

  // Below p the T_p response is an ordinary seed like any other; above,
  // it is replaced by the unit-root seed for U_p.
  std::vector<uint64_t> tab = tabulate;
  tab.push_back(p);
  Eigenform f0 = eigenform_extract(below, k, seeds, tab);
  uint64_t ap = f0.a.at(p);
  require(ap % p != 0, "forms-stabilize", "form is not ordinary at p");

  std::vector<std::pair<uint64_t, uint64_t>> seeds1;
  for (const auto& s : seeds)
    if (s.first != p) seeds1.push_back(s);
  seeds1.push_back({p, ap % p});
  Eigenform f1 = eigenform_extract(above, k, seeds1, tabulate);
  require(f1.has_up, "forms-stabilize", "stabilized form has no U_p response");

  for (const auto& [ell, a] : f1.a) {
    auto it = f0.a.find(ell);
    if (it != f0.a.end())
      require(it->second == a, "forms-stabilize",
              "tame eigenvalue changed under stabilization");
  }
  // alpha is the unit root: alpha^2 - a_p alpha + p^(k-1) = 0 mod p^e.
  uint64_t alpha = f1.up;
  uint64_t quad = addmod(mulmod(alpha, alpha, pe), powmod(p % pe, k - 1, pe), pe);
  require(quad == mulmod(ap, alpha, pe), "forms-stabilize",
          "U_p eigenvalue does not satisfy the Hecke quadratic");
  return Stabilization{std::move(f1), ap, alpha};
}

AtkinLehner atkin_lehner(HeckeContext& ctx) {
  const ClassSet& cs = *ctx.cs;
  require(cs.m >= 1, "forms-atkin", "involution needs positive wild level");
  Int pm = Int(pp_pow(cs.p, cs.m));
  AtkinLehner al;
  for (size_t i = 0; i < cs.reps.size(); i++) {
    auto basis = lat_basis(cs.reps[i]);
    // J_i = {x in I_i : i_p(x) in tau R_p}: both diagonal entries of the
    // splitting image vanish mod p^m (the lower left already does).
    IntMat cong(4, std::vector<Int>(2));
    for (size_t r = 0; r < 4; r++) {
      Mat2 mm = cs.sp.eval(basis[r]);
      cong[r][0] = Int(mm.a);
      cong[r][1] = Int(mm.d);
    }
    IntMat ker = congruence_kernel(cong, {pm, pm});
    require(ker.size() == 4, "forms-atkin", "twisted sublattice rank drop");
    std::vector<Quat> gens;
    for (const auto& row : ker) {
      Quat g = Quat::integer(0);
      for (size_t r = 0; r < 4; r++)
        g = q_add(g, q_scale(basis[r], Rat(row[r])));
      gens.push_back(g);
    }
    QLat j = lat_from_gens(gens);
    require(lat_det(j) == lat_det(cs.reps[i]) * Rat(pm * pm), "forms-atkin",
            "twisted sublattice index is not p^(2m)");
    auto [cls, x] = reduce_to_class(cs, j);
    al.perm.push_back(cls);
    al.mult.push_back(x);
  }
  for (size_t i = 0; i < al.perm.size(); i++)
    require(al.perm[al.perm[i]] == int(i), "forms-atkin",
            "class permutation is not an involution");
  return al;
}

uint64_t duality_pairing(HeckeContext& ctx, const AtkinLehner& al,
                         const PolyForm& f, const PolyForm& g) {
  const ClassSet& cs = *ctx.cs;
  check_pform(cs, f);
  check_pform(cs, g);
  require(f.v[0].k == 2 && g.v[0].k == 2, "forms-pairing",
          "height pairing is defined on weight-2 forms");
  require(f.v[0].e == ctx.e && g.v[0].e == ctx.e, "forms-pairing",
          "pairing wants the context precision");
  uint64_t pe = ctx.pe, acc = 0;
  for (size_t i = 0; i < f.v.size(); i++) {
    uint64_t ord = int_residue(2 * cs.weights[i], pe);
    uint64_t term = mulmod(f.v[i].c[0], g.v[al.perm[i]].c[0], pe);
    acc = addmod(acc, mulmod(term, inv_unit(ord, cs.p, ctx.e), pe), pe);
  }
  return acc;
}

}
