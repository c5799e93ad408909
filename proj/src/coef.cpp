#include "quatheta/coef.hpp"

#include "quatheta/error.hpp"
#include "quatheta/padic.hpp"

namespace qth {

namespace {

void check_same(const Poly& a, const Poly& b) {
  require(a.p == b.p && a.e == b.e && a.k == b.k, "poly-mismatch",
          "polynomial operands disagree in modulus or weight");
}

// Pascal's triangle mod p^e; rows up to n. Valid as unit data only while
// n < p, which every caller below enforces where inverses are taken.
std::vector<std::vector<uint64_t>> binom_rows(int n, uint64_t pe) {
  std::vector<std::vector<uint64_t>> b(n + 1);
  for (int i = 0; i <= n; ++i) {
    b[i].assign(i + 1, 1);
    for (int j = 1; j < i; ++j) b[i][j] = addmod(b[i - 1][j - 1], b[i - 1][j], pe);
  }
  return b;
}

// Coefficients of (uX + vY)^n on X^{n-j} Y^j.
std::vector<uint64_t> linear_pow(uint64_t u, uint64_t v, int n, uint64_t pe) {
  auto bin = binom_rows(n, pe);
  std::vector<uint64_t> out(n + 1);
  uint64_t up = 1;
  std::vector<uint64_t> vp(n + 1);
  vp[0] = 1;
  for (int j = 1; j <= n; ++j) vp[j] = mulmod(vp[j - 1], v % pe, pe);
  for (int j = n; j >= 0; --j) {
    out[j] = mulmod(bin[n][j], mulmod(up, vp[j], pe), pe);
    up = mulmod(up, u % pe, pe);
  }
  return out;
}

// P composed with X -> l1, Y -> l2 for linear forms l1 = (u1, v1), l2 = (u2, v2).
Poly substitute(const Poly& a, uint64_t u1, uint64_t v1, uint64_t u2,
                uint64_t v2) {
  Poly out = poly_zero(a.p, a.e, a.k);
  int n = a.k - 2;
  for (int i = 0; i <= n; ++i) {
    if (a.c[i] == 0) continue;
    auto f = linear_pow(u1, v1, n - i, a.pe);
    auto g = linear_pow(u2, v2, i, a.pe);
    for (int r = 0; r <= n - i; ++r)
      for (int s = 0; s <= i; ++s) {
        uint64_t term = mulmod(a.c[i], mulmod(f[r], g[s], a.pe), a.pe);
        out.c[r + s] = addmod(out.c[r + s], term, a.pe);
      }
  }
  return out;
}

void check_meas(const FiniteMeasure& a, const FiniteMeasure& b) {
  require(a.p == b.p && a.m == b.m && a.prec == b.prec, "measure-mismatch",
          "measure operands disagree in cell level or precision");
}

}  // namespace

Poly poly_zero(uint64_t p, int e, int k) {
  require(k >= 2, "poly-weight", "weight below two");
  Poly a;
  a.p = p;
  a.e = e;
  a.pe = pp_pow(p, e);
  a.k = k;
  a.c.assign(k - 1, 0);
  return a;
}

Poly poly_add(const Poly& a, const Poly& b) {
  check_same(a, b);
  Poly out = a;
  for (size_t i = 0; i < out.c.size(); ++i) out.c[i] = addmod(a.c[i], b.c[i], a.pe);
  return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  check_same(a, b);
  Poly out = a;
  for (size_t i = 0; i < out.c.size(); ++i) out.c[i] = submod(a.c[i], b.c[i], a.pe);
  return out;
}

Poly poly_scale(const Poly& a, uint64_t s) {
  Poly out = a;
  for (auto& x : out.c) x = mulmod(x, s % a.pe, a.pe);
  return out;
}

Poly poly_vm(uint64_t p, int e, int k, int m) {
  require(k % 2 == 0, "odd-weight", "v_m basis needs even weight");
  int i = k / 2 - 1 + m;
  require(i >= 0 && i <= k - 2, "poly-index", "basis index out of range");
  Poly a = poly_zero(p, e, k);
  a.c[i] = 1;
  return a;
}

Poly act_pk(const Poly& a, const Mat2& g) {
  // X -> dX - cY, Y -> -bX + aY.
  return substitute(a, g.d % a.pe, negmod(g.c % a.pe, a.pe),
                    negmod(g.b % a.pe, a.pe), g.a % a.pe);
}

Poly subst_lk(const Mat2& g, const Poly& a) {
  // Row vector convention: (X, Y) g = (aX + cY, bX + dY).
  return substitute(a, g.a % a.pe, g.c % a.pe, g.b % a.pe, g.d % a.pe);
}

Poly rho_k(const Mat2& g, const Poly& a) {
  require(a.k % 2 == 0, "odd-weight", "rho_k needs even weight");
  uint64_t det = submod(mulmod(g.a % a.pe, g.d % a.pe, a.pe),
                        mulmod(g.b % a.pe, g.c % a.pe, a.pe), a.pe);
  require(det != 0, "nonunit-det", "determinant vanishes mod p^e");
  // det = p^v u. The normalization det^{-(k-2)/2} is legal when the p-power
  // divides out of every substituted coefficient exactly (e.g. central
  // scalars); otherwise callers must track the loss themselves.
  int v = val_p(det, a.p);
  long long drop = (long long)v * (a.k - 2);
  require(drop % 2 == 0, "nonunit-det",
          "odd p-power determinant has no integral normalization");
  uint64_t unit = det / pp_pow(a.p, v);
  Poly out = subst_lk(g, a);
  uint64_t s = powmod(inv_unit(unit, a.p, a.e), (a.k - 2) / 2, a.pe);
  out = poly_scale(out, s);
  if (drop > 0) {
    // Result precision shrinks by the divided p-power; recorded in out.e.
    int w = int(drop / 2);
    require(a.e > w, "nonunit-det", "p-power normalization exhausts precision");
    uint64_t pw = pp_pow(a.p, w);
    out.e = a.e - w;
    out.pe = pp_pow(a.p, out.e);
    for (auto& x : out.c) {
      require(x % pw == 0, "nonunit-det",
              "p-power normalization does not divide exactly");
      x = (x / pw) % out.pe;
    }
  }
  return out;
}

uint64_t pairing_k(const Poly& a, const Poly& b) {
  check_same(a, b);
  require(a.k % 2 == 0, "odd-weight", "pairing needs even weight");
  int n = a.k - 2;
  require(uint64_t(n) < a.p, "pairing-weight",
          "binomial denominators must be units");
  auto bin = binom_rows(n, a.pe);
  uint64_t acc = 0;
  for (int i = 0; i <= n; ++i) {
    uint64_t term = mulmod(a.c[i], b.c[n - i], a.pe);
    term = mulmod(term, inv_unit(bin[n][i], a.p, a.e), a.pe);
    acc = (i % 2) ? submod(acc, term, a.pe) : addmod(acc, term, a.pe);
  }
  return acc;
}

FiniteMeasure meas_zero(uint64_t p, int m, int prec) {
  require(m >= 1 && prec >= 1, "measure-shape", "cell level and precision positive");
  FiniteMeasure mu;
  mu.p = p;
  mu.m = m;
  mu.prec = prec;
  mu.pm = pp_pow(p, m);
  mu.pe = pp_pow(p, prec);
  mu.t.assign(size_t(mu.pm) * mu.pm, 0);
  return mu;
}

void meas_set(FiniteMeasure& mu, uint64_t x, uint64_t y, uint64_t v) {
  x %= mu.pm;
  y %= mu.pm;
  require(x % mu.p != 0 || y % mu.p != 0, "imprimitive-cell",
          "measure supported on primitive vectors only");
  mu.t[x + mu.pm * y] = v % mu.pe;
}

FiniteMeasure meas_add(const FiniteMeasure& a, const FiniteMeasure& b) {
  check_meas(a, b);
  FiniteMeasure out = a;
  for (size_t i = 0; i < out.t.size(); ++i) out.t[i] = addmod(a.t[i], b.t[i], a.pe);
  return out;
}

FiniteMeasure meas_sub(const FiniteMeasure& a, const FiniteMeasure& b) {
  check_meas(a, b);
  FiniteMeasure out = a;
  for (size_t i = 0; i < out.t.size(); ++i) out.t[i] = submod(a.t[i], b.t[i], a.pe);
  return out;
}

FiniteMeasure meas_scale(const FiniteMeasure& a, uint64_t s) {
  FiniteMeasure out = a;
  s %= a.pe;
  for (auto& x : out.t) x = mulmod(x, s, a.pe);
  return out;
}

uint64_t meas_mass(const FiniteMeasure& mu) {
  uint64_t acc = 0;
  for (auto v : mu.t) acc = addmod(acc, v, mu.pe);
  return acc;
}

FiniteMeasure pushforward(const FiniteMeasure& mu, const Mat2& g) {
  FiniteMeasure out = meas_zero(mu.p, mu.m, mu.prec);
  uint64_t pm = mu.pm;
  uint64_t ga = g.a % pm, gb = g.b % pm, gc = g.c % pm, gd = g.d % pm;
  for (uint64_t y = 0; y < pm; ++y)
    for (uint64_t x = 0; x < pm; ++x) {
      uint64_t v = mu.t[x + pm * y];
      if (v == 0) continue;
      uint64_t wx = (x * ga + y * gc) % pm;
      uint64_t wy = (x * gb + y * gd) % pm;
      if (wx % mu.p == 0 && wy % mu.p == 0) continue;
      size_t j = wx + pm * wy;
      out.t[j] = addmod(out.t[j], v, mu.pe);
    }
  return out;
}

FiniteMeasure weight_act(const FiniteMeasure& mu, uint64_t z) {
  require(z % mu.p != 0, "nonunit-scalar", "weight action needs a unit scalar");
  return pushforward(mu, Mat2{z, 0, 0, z});
}

FiniteMeasure coarsen(const FiniteMeasure& mu) {
  require(mu.m >= 2, "measure-shape", "cannot coarsen below level one");
  FiniteMeasure out = meas_zero(mu.p, mu.m - 1, mu.prec);
  uint64_t pm = mu.pm, pn = out.pm;
  for (uint64_t y = 0; y < pm; ++y)
    for (uint64_t x = 0; x < pm; ++x) {
      uint64_t v = mu.t[x + pm * y];
      if (v == 0) continue;
      size_t j = (x % pn) + pn * (y % pn);
      out.t[j] = addmod(out.t[j], v, out.pe);
    }
  return out;
}

Poly specialize(const FiniteMeasure& mu, int k) {
  return specialize(mu, k, std::vector<uint64_t>());
}

std::vector<uint8_t> meas_serialize(const FiniteMeasure& mu) {
  require(mu.p < 256, "measure-shape", "serialization stores base-p digits");
  std::vector<uint8_t> out = {'Q', 'T', 'H', 'M', '1'};
  auto put32 = [&out](uint64_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
  };
  put32(mu.p);
  put32(uint64_t(mu.m));
  put32(uint64_t(mu.prec));
  for (uint64_t y = 0; y < mu.pm; ++y)
    for (uint64_t x = 0; x < mu.pm; ++x) {
      if (x % mu.p == 0 && y % mu.p == 0) continue;
      uint64_t v = mu.t[x + mu.pm * y];
      for (int d = 0; d < mu.prec; ++d) {
        out.push_back(uint8_t(v % mu.p));
        v /= mu.p;
      }
    }
  return out;
}

FiniteMeasure meas_deserialize(const std::vector<uint8_t>& bytes) {
  require(bytes.size() >= 17 && bytes[0] == 'Q' && bytes[1] == 'T' &&
              bytes[2] == 'H' && bytes[3] == 'M' && bytes[4] == '1',
          "measure-format", "bad magic");
  size_t at = 5;
  auto get32 = [&bytes, &at]() {
    uint64_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint64_t(bytes[at++]) << (8 * i);
    return v;
  };
  uint64_t p = get32();
  int m = int(get32());
  int prec = int(get32());
  FiniteMeasure mu = meas_zero(p, m, prec);
  size_t cells = size_t(mu.pm) * mu.pm - size_t(mu.pm / p) * (mu.pm / p);
  require(bytes.size() == at + cells * size_t(prec), "measure-format",
          "table length mismatch");
  for (uint64_t y = 0; y < mu.pm; ++y)
    for (uint64_t x = 0; x < mu.pm; ++x) {
      if (x % mu.p == 0 && y % mu.p == 0) continue;
      uint64_t v = 0, scale = 1;
      for (int d = 0; d < prec; ++d) {
        uint8_t dig = bytes[at++];
        require(dig < p, "measure-format", "digit out of range");
        v += scale * dig;
        scale *= p;
      }
      mu.t[x + mu.pm * y] = v;
    }
  return mu;
}

Poly specialize(const FiniteMeasure& mu, int k,
                const std::vector<uint64_t>& eps) {
  require(eps.empty() || eps.size() == mu.pm, "character-shape",
          "character table must be indexed by x mod p^m");
  Poly out = poly_zero(mu.p, mu.prec, k);
  int n = k - 2;
  uint64_t pe = out.pe, pm = mu.pm;
  auto bin = binom_rows(n, pe);
  std::vector<uint64_t> ypow(n + 1);
  for (uint64_t x = 0; x < pm; ++x) {
    if (x % mu.p == 0) continue;
    uint64_t ex = eps.empty() ? 1 : eps[x] % pe;
    if (ex == 0) continue;
    for (uint64_t y = 0; y < pm; ++y) {
      uint64_t v = mu.t[x + pm * y];
      if (v == 0) continue;
      v = mulmod(v, ex, pe);
      // (xY - yX)^n contributes binom(n,i) x^i (-y)^{n-i} on X^{n-i} Y^i.
      uint64_t ny = negmod(y % pe, pe);
      ypow[0] = 1;
      for (int j = 1; j <= n; ++j) ypow[j] = mulmod(ypow[j - 1], ny, pe);
      uint64_t xp = 1;
      for (int i = 0; i <= n; ++i) {
        uint64_t term = mulmod(bin[n][i], mulmod(xp, ypow[n - i], pe), pe);
        out.c[i] = addmod(out.c[i], mulmod(v, term, pe), pe);
        xp = mulmod(xp, x % pe, pe);
      }
    }
  }
  return out;
}

}
