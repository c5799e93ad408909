#include "quatheta/quat.hpp"

#include <algorithm>

#include "quatheta/error.hpp"

namespace qth {

namespace {

Int gcd_i(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }

Int abs_i(const Int& a) { return a < 0 ? Int(-a) : a; }

}  // namespace

void Quat::normalize() {
  if (d < 0) { x = -x; y = -y; z = -z; w = -w; d = -d; }
  require(d != 0, "quat-zero-den", "quaternion denominator is zero");
  Int g = gcd_i(gcd_i(abs_i(x), abs_i(y)), gcd_i(gcd_i(abs_i(z), abs_i(w)), d));
  if (g > 1) { x /= g; y /= g; z /= g; w /= g; d /= g; }
}

bool Quat::operator==(const Quat& o) const {
  Quat a = *this, b = o;
  a.normalize();
  b.normalize();
  return a.x == b.x && a.y == b.y && a.z == b.z && a.w == b.w && a.d == b.d;
}

Quat q_add(const Quat& p, const Quat& q) {
  Quat r{p.x * q.d + q.x * p.d, p.y * q.d + q.y * p.d, p.z * q.d + q.z * p.d,
         p.w * q.d + q.w * p.d, p.d * q.d};
  r.normalize();
  return r;
}

Quat q_sub(const Quat& p, const Quat& q) {
  Quat r{p.x * q.d - q.x * p.d, p.y * q.d - q.y * p.d, p.z * q.d - q.z * p.d,
         p.w * q.d - q.w * p.d, p.d * q.d};
  r.normalize();
  return r;
}

Quat q_mul(const QuatAlg& alg, const Quat& p, const Quat& q) {
  const Int &a = alg.a, &b = alg.b;
  Quat r;
  r.x = p.x * q.x + a * p.y * q.y + b * p.z * q.z - a * b * p.w * q.w;
  r.y = p.x * q.y + p.y * q.x - b * p.z * q.w + b * p.w * q.z;
  r.z = p.x * q.z + p.z * q.x + a * p.y * q.w - a * p.w * q.y;
  r.w = p.x * q.w + p.w * q.x + p.y * q.z - p.z * q.y;
  r.d = p.d * q.d;
  r.normalize();
  return r;
}

Quat q_conj(const Quat& p) {
  Quat r{p.x, -p.y, -p.z, -p.w, p.d};
  r.normalize();
  return r;
}

Quat q_scale(const Quat& p, const Rat& s) {
  Quat r{p.x * numerator(s), p.y * numerator(s), p.z * numerator(s),
         p.w * numerator(s), p.d * denominator(s)};
  r.normalize();
  return r;
}

Rat q_trd(const Quat& p) { return Rat(2 * p.x, p.d); }

Rat q_nrd(const QuatAlg& alg, const Quat& p) {
  Int n = p.x * p.x - alg.a * p.y * p.y - alg.b * p.z * p.z +
          alg.a * alg.b * p.w * p.w;
  return Rat(n, p.d * p.d);
}

Quat q_inv(const QuatAlg& alg, const Quat& p) {
  Rat n = q_nrd(alg, p);
  require(n != 0, "quat-not-invertible", "zero reduced norm");
  return q_scale(q_conj(p), Rat(1) / n);
}

std::vector<Rat> q_coords(const Quat& p) {
  return {Rat(p.x, p.d), Rat(p.y, p.d), Rat(p.z, p.d), Rat(p.w, p.d)};
}

Quat q_from_coords(const std::vector<Rat>& c) {
  require(c.size() == 4, "quat-coords", "need 4 coordinates");
  Int den = 1;
  for (const auto& r : c) den = den / gcd_i(den, denominator(r)) * denominator(r);
  Quat q{numerator(c[0]) * (den / denominator(c[0])),
         numerator(c[1]) * (den / denominator(c[1])),
         numerator(c[2]) * (den / denominator(c[2])),
         numerator(c[3]) * (den / denominator(c[3])), den};
  q.normalize();
  return q;
}

namespace {

Quat basis_elt(int m) {
  Quat q;
  (m == 0 ? q.x : m == 1 ? q.y : m == 2 ? q.z : q.w) = 1;
  return q;
}

}  // namespace

RatMat rmul_matrix(const QuatAlg& alg, const Quat& q) {
  RatMat m(4, std::vector<Rat>(4));
  for (int r = 0; r < 4; ++r) {
    auto c = q_coords(q_mul(alg, basis_elt(r), q));
    for (int s = 0; s < 4; ++s) m[r][s] = c[s];
  }
  return m;
}

RatMat lmul_matrix(const QuatAlg& alg, const Quat& q) {
  RatMat m(4, std::vector<Rat>(4));
  for (int r = 0; r < 4; ++r) {
    auto c = q_coords(q_mul(alg, q, basis_elt(r)));
    for (int s = 0; s < 4; ++s) m[r][s] = c[s];
  }
  return m;
}

QLat lat_from_gens(const std::vector<Quat>& gens) {
  require(!gens.empty(), "lat-empty", "no generators");
  Int den = 1;
  for (const auto& g : gens) den = den / gcd_i(den, g.d) * g.d;
  IntMat rows;
  for (const auto& g : gens) {
    Int s = den / g.d;
    rows.push_back({g.x * s, g.y * s, g.z * s, g.w * s});
  }
  IntMat h = row_hnf(rows, nullptr);
  require(h.size() == 4, "lat-rank", "lattice not full rank");
  Int g = den;
  for (const auto& row : h)
    for (const auto& v : row) g = gcd_i(g, abs_i(v));
  if (g > 1) {
    den /= g;
    for (auto& row : h)
      for (auto& v : row) v /= g;
  }
  return QLat{std::move(h), std::move(den)};
}

std::array<Quat, 4> lat_basis(const QLat& l) {
  std::array<Quat, 4> out;
  for (int r = 0; r < 4; ++r) {
    Quat q{l.b[r][0], l.b[r][1], l.b[r][2], l.b[r][3], l.den};
    q.normalize();
    out[r] = q;
  }
  return out;
}

bool lat_contains(const QLat& l, const Quat& q) {
  // Solve c * b = den * coords(q) by forward substitution; b is in HNF with
  // nonzero pivots but not necessarily triangular in the strict sense, so
  // use a rational solve against the basis matrix.
  RatMat bm(4, std::vector<Rat>(4));
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) bm[r][s] = Rat(l.b[r][s]);
  auto inv = rat_inverse(bm);
  require(inv.has_value(), "lat-singular", "lattice basis singular");
  auto v = q_coords(q);
  for (int s = 0; s < 4; ++s) {
    Rat c = 0;
    for (int r = 0; r < 4; ++r) c += v[r] * (*inv)[r][s];
    c *= l.den;
    if (denominator(c) != 1) return false;
  }
  return true;
}

QLat lat_add(const QLat& a, const QLat& b) {
  auto ga = lat_basis(a);
  auto gb = lat_basis(b);
  std::vector<Quat> gens(ga.begin(), ga.end());
  gens.insert(gens.end(), gb.begin(), gb.end());
  return lat_from_gens(gens);
}

QLat lat_intersect(const QLat& a, const QLat& b) {
  Int den = a.den / gcd_i(a.den, b.den) * b.den;
  Int sa = den / a.den, sb = den / b.den;
  IntMat stack(8, std::vector<Int>(4));
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) {
      stack[r][s] = a.b[r][s] * sa;
      stack[4 + r][s] = b.b[r][s] * sb;
    }
  IntMat ker = left_kernel(stack);
  require(ker.size() == 4, "lat-intersect-rank", "intersection not full rank");
  std::vector<Quat> gens;
  for (const auto& row : ker) {
    Int cx = 0, cy = 0, cz = 0, cw = 0;
    for (int r = 0; r < 4; ++r) {
      cx += row[r] * stack[r][0];
      cy += row[r] * stack[r][1];
      cz += row[r] * stack[r][2];
      cw += row[r] * stack[r][3];
    }
    Quat g{cx, cy, cz, cw, den};
    g.normalize();
    gens.push_back(g);
  }
  return lat_from_gens(gens);
}

QLat lat_mul(const QuatAlg& alg, const QLat& a, const QLat& b) {
  auto ga = lat_basis(a);
  auto gb = lat_basis(b);
  std::vector<Quat> gens;
  for (const auto& p : ga)
    for (const auto& q : gb) gens.push_back(q_mul(alg, p, q));
  return lat_from_gens(gens);
}

QLat lat_scale(const QLat& a, const Rat& s) {
  require(s != 0, "lat-scale-zero", "scaling lattice by zero");
  auto g = lat_basis(a);
  std::vector<Quat> gens;
  for (const auto& q : g) gens.push_back(q_scale(q, s));
  return lat_from_gens(gens);
}

QLat lat_mul_elt(const QuatAlg& alg, const Quat& x, const QLat& a) {
  auto g = lat_basis(a);
  std::vector<Quat> gens;
  for (const auto& q : g) gens.push_back(q_mul(alg, x, q));
  return lat_from_gens(gens);
}

QLat lat_elt_mul(const QuatAlg& alg, const QLat& a, const Quat& x) {
  auto g = lat_basis(a);
  std::vector<Quat> gens;
  for (const auto& q : g) gens.push_back(q_mul(alg, q, x));
  return lat_from_gens(gens);
}

QLat lat_conj(const QLat& a) {
  auto g = lat_basis(a);
  std::vector<Quat> gens;
  for (const auto& q : g) gens.push_back(q_conj(q));
  return lat_from_gens(gens);
}

Rat lat_det(const QLat& a) {
  Int d = int_det(a.b);
  Rat r(abs_i(d), 1);
  Rat den4 = Rat(a.den) * a.den * a.den * a.den;
  return r / den4;
}

QLat right_order(const QuatAlg& alg, const QLat& l) {
  auto g = lat_basis(l);
  QLat acc;
  bool first = true;
  for (const auto& q : g) {
    QLat cand = lat_mul_elt(alg, q_inv(alg, q), l);
    acc = first ? cand : lat_intersect(acc, cand);
    first = false;
  }
  return acc;
}

QLat left_order(const QuatAlg& alg, const QLat& l) {
  auto g = lat_basis(l);
  QLat acc;
  bool first = true;
  for (const auto& q : g) {
    QLat cand = lat_elt_mul(alg, l, q_inv(alg, q));
    acc = first ? cand : lat_intersect(acc, cand);
    first = false;
  }
  return acc;
}

bool is_order(const QuatAlg& alg, const QLat& l) {
  if (!lat_contains(l, Quat::integer(1))) return false;
  QLat sq = lat_mul(alg, l, l);
  return lat_add(l, sq) == l;
}

Int order_disc(const QuatAlg& alg, const QLat& order) {
  auto g = lat_basis(order);
  RatMat t(4, std::vector<Rat>(4));
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) t[r][s] = q_trd(q_mul(alg, g[r], g[s]));
  Rat det = rat_det(t);
  if (det < 0) det = -det;
  require(denominator(det) == 1, "disc-not-integral", "trace pairing not integral");
  Int n = numerator(det);
  Int root = boost::multiprecision::sqrt(n);
  require(root * root == n, "disc-not-square", "trace pairing det not a square");
  return root;
}

RatMat nrd_gram(const QuatAlg& alg, const QLat& l) {
  auto g = lat_basis(l);
  RatMat m(4, std::vector<Rat>(4));
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      m[r][s] = q_trd(q_mul(alg, g[r], q_conj(g[s]))) / 2;
  return m;
}

Rat ideal_nrd(const QLat& ideal, const QLat& order) {
  // Left multiplication by x has determinant nrd(x)^2, so covolumes scale
  // by the square of the norm.
  Rat ratio = lat_det(ideal) / lat_det(order);
  Int num = numerator(ratio), den = denominator(ratio);
  auto root2 = [](const Int& n) {
    Int r = boost::multiprecision::sqrt(n);
    require(r * r == n, "nrd-not-square", "ideal covolume ratio not a square");
    return r;
  };
  return Rat(root2(num), root2(den));
}

namespace {

// Legendre symbol for odd prime q, u any integer with q not dividing u.
int legendre(Int u, const Int& q) {
  u %= q;
  if (u < 0) u += q;
  Int r = boost::multiprecision::powm(u, (q - 1) / 2, q);
  return r == 1 ? 1 : -1;
}

void split_prime_power(Int n, const Int& q, int& e, Int& u) {
  e = 0;
  u = std::move(n);
  while (u % q == 0) { u /= q; ++e; }
}

}  // namespace

int hilbert_symbol(Int a, Int b, const Int& v) {
  require(a != 0 && b != 0, "hilbert-zero", "hilbert symbol needs nonzero args");
  if (v == 0) return (a < 0 && b < 0) ? -1 : 1;
  if (v == 2) {
    int al, be;
    Int u, w;
    split_prime_power(a, 2, al, u);
    split_prime_power(b, 2, be, w);
    auto eps = [](const Int& x) { return static_cast<int>(((x - 1) / 2) % 2 != 0); };
    auto om = [](const Int& x) { return static_cast<int>(((x * x - 1) / 8) % 2 != 0); };
    int ex = eps(u) * eps(w) + al * om(w) + be * om(u);
    return ex % 2 == 0 ? 1 : -1;
  }
  int al, be;
  Int u, w;
  split_prime_power(a, v, al, u);
  split_prime_power(b, v, be, w);
  int sign = 1;
  if (al % 2 != 0 && be % 2 != 0 && legendre(-1, v) == -1) sign = -sign;
  if (be % 2 != 0 && legendre(u, v) == -1) sign = -sign;
  if (al % 2 != 0 && legendre(w, v) == -1) sign = -sign;
  return sign;
}

std::vector<Int> prime_factors(Int n) {
  std::vector<Int> out;
  if (n < 0) n = -n;
  for (Int q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
    if (n % q == 0) {
      out.push_back(q);
      while (n % q == 0) n /= q;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::vector<Int> ramified_primes(const QuatAlg& alg) {
  std::vector<Int> cands = prime_factors(2 * alg.a * alg.b);
  if (std::find(cands.begin(), cands.end(), Int(2)) == cands.end())
    cands.insert(cands.begin(), 2);
  std::sort(cands.begin(), cands.end());
  std::vector<Int> out;
  for (const auto& q : cands)
    if (hilbert_symbol(alg.a, alg.b, q) == -1) out.push_back(q);
  return out;
}

Int find_beta(const Int& dk, const Int& nminus, const Int& p, const Int& nplus) {
  std::vector<Int> want = prime_factors(nminus);
  std::sort(want.begin(), want.end());
  std::vector<Int> locals = prime_factors(p * nplus);
  std::vector<Int> dkp = prime_factors(dk);
  for (Int n = 1;; ++n) {
    Int beta = -n;
    bool ok = true;
    for (const auto& q : dkp)
      if (beta % q == 0) { ok = false; break; }
    if (!ok) continue;
    for (const auto& q : locals) {
      if (beta % q == 0) { ok = false; break; }
      if (q == 2) {
        Int r = beta % 8;
        if (r < 0) r += 8;
        if (r != 1) { ok = false; break; }
      } else if (legendre(beta, q) != 1) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    QuatAlg alg{-dk, beta};
    if (ramified_primes(alg) == want) return beta;
  }
}

Quat theta_elt(const Int& dk) {
  require(dk % 4 == 3, "theta-disc", "need |disc K| = 3 mod 4");
  Quat t{dk, 1, 0, 0, 2};
  t.normalize();
  return t;
}

QLat standard_order(const QuatAlg& alg, const Int& dk) {
  require(alg.a == -dk, "alg-mismatch", "algebra does not match disc");
  Quat one = Quat::integer(1);
  Quat th = theta_elt(dk);
  Quat j{0, 0, 1, 0, 1};
  return lat_from_gens({one, th, j, q_mul(alg, th, j)});
}

namespace {

// Kernel mod odd prime q of the trace pairing on order/q, as coordinate rows.
std::vector<std::vector<Int>> trace_radical_mod(const QuatAlg& alg,
                                                const QLat& order, const Int& q) {
  auto g = lat_basis(order);
  std::vector<std::vector<Int>> t(4, std::vector<Int>(4));
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) {
      Rat tr = q_trd(q_mul(alg, g[r], g[s]));
      Int num = numerator(tr), den = denominator(tr);
      Int dd = den % q;
      require(dd != 0, "radical-den", "trace pairing denominator divisible by q");
      // num/den mod q
      Int inv = boost::multiprecision::powm(((den % q) + q) % q, q - 2, q);
      Int v = ((num % q) * inv) % q;
      if (v < 0) v += q;
      t[r][s] = v;
    }
  // Gaussian elimination over F_q; collect nullspace rows v with v * t = 0.
  std::vector<std::vector<Int>> m(4, std::vector<Int>(8, 0));
  for (int r = 0; r < 4; ++r) {
    for (int s = 0; s < 4; ++s) m[r][s] = t[r][s];
    m[r][4 + r] = 1;
  }
  int row = 0;
  for (int col = 0; col < 4 && row < 4; ++col) {
    int piv = -1;
    for (int r = row; r < 4; ++r)
      if (m[r][col] % q != 0) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(m[row], m[piv]);
    Int inv = boost::multiprecision::powm(m[row][col], q - 2, q);
    for (auto& v : m[row]) v = ((v * inv) % q + q) % q;
    for (int r = 0; r < 4; ++r) {
      if (r == row) continue;
      Int f = m[r][col] % q;
      if (f == 0) continue;
      for (int s = 0; s < 8; ++s) m[r][s] = (((m[r][s] - f * m[row][s]) % q) + q) % q;
    }
    ++row;
  }
  std::vector<std::vector<Int>> ker;
  for (int r = row; r < 4; ++r)
    ker.push_back(std::vector<Int>(m[r].begin() + 4, m[r].end()));
  return ker;
}

}  // namespace

namespace {

// The radical of o/qo lifted to a lattice (contains qo).
QLat radical_lattice(const QuatAlg& alg, const QLat& o, const Int& q) {
  auto ker = trace_radical_mod(alg, o, q);
  auto g = lat_basis(o);
  std::vector<Quat> gens;
  for (const auto& b : g) gens.push_back(q_scale(b, Rat(q)));
  for (const auto& row : ker) {
    Quat s{0, 0, 0, 0, 1};
    for (int r = 0; r < 4; ++r) s = q_add(s, q_scale(g[r], Rat(row[r])));
    gens.push_back(s);
  }
  return lat_from_gens(gens);
}

// One strict enlargement of o at an odd unramified prime q. The radical
// idealizer handles the non-hereditary case; at a hereditary stall the
// quotient o/J is F_q x F_q, and the idealizer of a maximal two-sided ideal
// above J jumps past it.
QLat enlarge_at(const QuatAlg& alg, const QLat& o, const Int& q, const Int& d) {
  QLat rad = radical_lattice(alg, o, q);
  QLat next = left_order(alg, rad);
  if (order_disc(alg, next) < d) return next;
  next = right_order(alg, rad);
  if (order_disc(alg, next) < d) return next;
  auto g = lat_basis(o);
  // Find w generating o/J over F_q beyond the scalars.
  Quat w;
  bool have_w = false;
  for (int r = 0; r < 4 && !have_w; ++r) {
    bool scalar = false;
    for (Int l = 0; l < q && !scalar; ++l)
      if (lat_contains(rad, q_sub(g[r], Quat::integer(l)))) scalar = true;
    if (!scalar) { w = g[r]; have_w = true; }
  }
  require(have_w, "saturation-quotient", "quotient of order by radical is scalar");
  // Minimal polynomial of w mod J: w^2 = t w - n.
  Int t0 = -1, n0 = 0;
  Quat w2 = q_mul(alg, w, w);
  for (Int t = 0; t < q && t0 < 0; ++t)
    for (Int n = 0; n < q; ++n) {
      Quat c = q_add(q_sub(w2, q_scale(w, Rat(t))), Quat::integer(n));
      if (lat_contains(rad, c)) { t0 = t; n0 = n; break; }
    }
  require(t0 >= 0, "saturation-minpoly", "no quadratic relation in the quotient");
  for (Int l = 0; l < q; ++l) {
    if ((l * l - t0 * l + n0) % q != 0) continue;
    // P = J + o (w - l) o, a maximal two-sided ideal above J.
    std::vector<Quat> gens;
    auto rb = lat_basis(rad);
    gens.insert(gens.end(), rb.begin(), rb.end());
    Quat wl = q_sub(w, Quat::integer(l));
    for (const auto& x : g)
      for (const auto& y : g) gens.push_back(q_mul(alg, q_mul(alg, x, wl), y));
    QLat pid = lat_intersect(lat_from_gens(gens), o);
    QLat cand = left_order(alg, pid);
    if (order_disc(alg, cand) < d) return cand;
    cand = right_order(alg, pid);
    if (order_disc(alg, cand) < d) return cand;
  }
  fail("saturation-stuck", "no enlargement found at q");
}

}  // namespace

QLat maximal_order(const QuatAlg& alg, const Int& dk, const Int& target_disc) {
  QLat o = standard_order(alg, dk);
  Int d = order_disc(alg, o);
  require(d % target_disc == 0, "disc-target", "target disc does not divide start disc");
  int guard = 0;
  while (d != target_disc) {
    require(++guard <= 64, "saturation-loop", "order saturation did not terminate");
    Int f = d / target_disc;
    auto qs = prime_factors(f);
    Int q = qs.front();
    require(q % 2 == 1, "saturation-even", "even saturation prime unsupported");
    QLat next = enlarge_at(alg, o, q, d);
    Int dn = order_disc(alg, next);
    require(dn < d, "saturation-no-progress", "enlargement made no progress");
    require(lat_add(next, o) == next, "saturation-shrank", "idealizer lost the order");
    require(is_order(alg, next), "saturation-not-order", "idealizer gave a non-order");
    o = next;
    d = dn;
  }
  require(is_order(alg, o), "maximal-not-order", "saturation produced a non-order");
  return o;
}

}
