#include "quatheta/upoly.hpp"

#include "quatheta/error.hpp"
#include "quatheta/padic.hpp"

namespace qth {

std::vector<uint64_t> up_trim(std::vector<uint64_t> a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

std::vector<uint64_t> up_add(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b, uint64_t pe) {
  std::vector<uint64_t> r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); i++) {
    uint64_t x = i < a.size() ? a[i] : 0;
    uint64_t y = i < b.size() ? b[i] : 0;
    r[i] = addmod(x, y, pe);
  }
  return up_trim(r);
}

std::vector<uint64_t> up_sub(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b, uint64_t pe) {
  std::vector<uint64_t> r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); i++) {
    uint64_t x = i < a.size() ? a[i] : 0;
    uint64_t y = i < b.size() ? b[i] : 0;
    r[i] = submod(x, y, pe);
  }
  return up_trim(r);
}

std::vector<uint64_t> up_mul(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b, uint64_t pe) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint64_t> r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); i++) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); j++)
      r[i + j] = addmod(r[i + j], mulmod(a[i], b[j], pe), pe);
  }
  return up_trim(r);
}

std::vector<uint64_t> up_scale(const std::vector<uint64_t>& a, uint64_t s,
                               uint64_t pe) {
  std::vector<uint64_t> r(a.size());
  for (size_t i = 0; i < a.size(); i++) r[i] = mulmod(a[i], s % pe, pe);
  return up_trim(r);
}

uint64_t up_eval(const std::vector<uint64_t>& a, uint64_t x, uint64_t pe) {
  uint64_t r = 0;
  for (size_t i = a.size(); i-- > 0;) r = addmod(mulmod(r, x % pe, pe), a[i], pe);
  return r;
}

std::pair<std::vector<uint64_t>, std::vector<uint64_t>> up_divmod(
    const std::vector<uint64_t>& a, const std::vector<uint64_t>& b,
    uint64_t pe) {
  require(!b.empty() && b.back() % pe == 1 % pe, "upoly-monic",
          "division requires a monic divisor");
  std::vector<uint64_t> r = a;
  for (auto& x : r) x %= pe;
  r = up_trim(r);
  if (r.size() < b.size()) return {{}, r};
  std::vector<uint64_t> q(r.size() - b.size() + 1, 0);
  for (size_t sh = q.size(); sh-- > 0;) {
    uint64_t c = r[sh + b.size() - 1];
    if (c == 0) continue;
    q[sh] = c;
    for (size_t j = 0; j < b.size(); j++)
      r[sh + j] = submod(r[sh + j], mulmod(c, b[j], pe), pe);
  }
  return {up_trim(q), up_trim(r)};
}

std::vector<std::pair<uint64_t, int>> up_roots_mod_p(
    const std::vector<uint64_t>& a, uint64_t p) {
  std::vector<std::pair<uint64_t, int>> out;
  std::vector<uint64_t> f(a.size());
  for (size_t i = 0; i < a.size(); i++) f[i] = a[i] % p;
  f = up_trim(f);
  for (uint64_t r = 0; r < p; r++) {
    int mult = 0;
    std::vector<uint64_t> lin = {(p - r) % p, 1};
    while (!f.empty() && up_eval(f, r, p) == 0) {
      auto [q, rem] = up_divmod(f, lin, p);
      f = q;
      mult++;
    }
    if (mult > 0) out.push_back({r, mult});
  }
  return out;
}

namespace {

// Extended gcd over F_p for monic coprime g, h: returns (u, v) with
// u*g + v*h = 1, deg u < deg h, deg v < deg g.
std::pair<std::vector<uint64_t>, std::vector<uint64_t>> xgcd_fp(
    const std::vector<uint64_t>& g, const std::vector<uint64_t>& h,
    uint64_t p) {
  std::vector<uint64_t> r0 = g, r1 = h;
  std::vector<uint64_t> u0 = {1}, u1 = {};
  for (auto& x : r0) x %= p;
  for (auto& x : r1) x %= p;
  r0 = up_trim(r0);
  r1 = up_trim(r1);
  while (!r1.empty()) {
    uint64_t lc = r1.back();
    uint64_t lci = inv_unit(lc, p, 1);
    auto r1m = up_scale(r1, lci, p);
    auto [q, rem] = up_divmod(r0, r1m, p);
    q = up_scale(q, lci, p);
    auto u2 = up_sub(u0, up_mul(q, u1, p), p);
    r0 = r1;
    r1 = rem;
    u0 = u1;
    u1 = u2;
  }
  require(r0.size() == 1, "upoly-coprime", "branches share a root mod p");
  uint64_t s = inv_unit(r0[0], p, 1);
  auto u = up_scale(u0, s, p);
  // v = (1 - u*g) / h, exact over F_p.
  auto num = up_sub({1}, up_mul(u, g, p), p);
  uint64_t lci = inv_unit(h.back() % p, p, 1);
  auto [v, rem] = up_divmod(up_scale(num, lci, p),
                            up_scale(h, lci, p), p);
  require(rem.empty(), "upoly-coprime", "bezout division not exact");
  return {u, up_scale(v, lci, p)};
}

}

std::pair<std::vector<uint64_t>, std::vector<uint64_t>> up_branch_split(
    const std::vector<uint64_t>& f, uint64_t r, uint64_t p, int e) {
  uint64_t pe = pp_pow(p, e);
  require(!f.empty() && f.back() % pe == 1, "upoly-monic",
          "branch split requires a monic polynomial");
  // Branch of r mod p: g0 = (X - r)^mult, h0 = f/g0 over F_p.
  std::vector<uint64_t> fp(f.size());
  for (size_t i = 0; i < f.size(); i++) fp[i] = f[i] % p;
  std::vector<uint64_t> g0 = {1}, lin = {(p - r % p) % p, 1};
  fp = up_trim(fp);
  while (up_eval(fp, r % p, p) == 0) {
    auto [q, rem] = up_divmod(fp, lin, p);
    fp = q;
    g0 = up_mul(g0, lin, p);
  }
  require(g0.size() > 1, "upoly-root", "value is not a root mod p");
  std::vector<uint64_t> h0 = fp;
  auto [u, v] = xgcd_fp(g0, h0, p);
  // Linear Hensel: maintain f = g*h mod p^i with g = g0, h = h0 mod p.
  std::vector<uint64_t> g = g0, h = h0;
  uint64_t pi = p;
  for (int i = 1; i < e; i++) {
    auto d = up_sub(f, up_mul(g, h, pe), pe);
    std::vector<uint64_t> dd(d.size());
    for (size_t j = 0; j < d.size(); j++) {
      require(d[j] % pi == 0, "upoly-lift", "factorization defect mismatch");
      dd[j] = (d[j] / pi) % p;
    }
    dd = up_trim(dd);
    // Solve dg*h + dh*g = dd over F_p with deg dg < deg g.
    auto dg = up_divmod(up_mul(v, dd, p), g0, p).second;
    auto num = up_sub(dd, up_mul(h, dg, p), p);
    auto [dh, rem] = up_divmod(num, g0, p);
    require(rem.empty(), "upoly-lift", "correction division not exact");
    for (size_t j = 0; j < dg.size(); j++) {
      if (g.size() < j + 1) g.resize(j + 1, 0);
      g[j] = addmod(g[j], mulmod(dg[j], pi, pe), pe);
    }
    for (size_t j = 0; j < dh.size(); j++) {
      if (h.size() < j + 1) h.resize(j + 1, 0);
      h[j] = addmod(h[j], mulmod(dh[j], pi, pe), pe);
    }
    pi *= p;
  }
  require(up_sub(f, up_mul(g, h, pe), pe).empty(), "upoly-lift",
          "factorization does not reproduce the polynomial");
  return {g, h};
}

std::pair<std::vector<uint64_t>, std::vector<uint64_t>> up_bezout(
    const std::vector<uint64_t>& g, const std::vector<uint64_t>& h,
    uint64_t p, int e) {
  uint64_t pe = pp_pow(p, e);
  auto [u, v] = xgcd_fp(g, h, p);
  // Lift u*g + v*h = 1 from mod p to mod p^e.
  uint64_t pi = p;
  for (int i = 1; i < e; i++) {
    auto d = up_sub({1}, up_add(up_mul(u, g, pe), up_mul(v, h, pe), pe), pe);
    std::vector<uint64_t> dd(d.size());
    for (size_t j = 0; j < d.size(); j++) {
      require(d[j] % pi == 0, "upoly-lift", "bezout defect mismatch");
      dd[j] = (d[j] / pi) % p;
    }
    dd = up_trim(dd);
    auto du = up_divmod(up_mul(u, dd, p), h, p).second;
    auto num = up_sub(dd, up_mul(du, g, p), p);
    auto [dv, rem] = up_divmod(num, h, p);
    require(rem.empty(), "upoly-lift", "bezout correction not exact");
    for (size_t j = 0; j < du.size(); j++) {
      if (u.size() < j + 1) u.resize(j + 1, 0);
      u[j] = addmod(u[j], mulmod(du[j], pi, pe), pe);
    }
    for (size_t j = 0; j < dv.size(); j++) {
      if (v.size() < j + 1) v.resize(j + 1, 0);
      v[j] = addmod(v[j], mulmod(dv[j], pi, pe), pe);
    }
    pi *= p;
  }
  auto chk = up_sub({1}, up_add(up_mul(u, g, pe), up_mul(v, h, pe), pe), pe);
  require(chk.empty(), "upoly-lift", "bezout identity fails at full precision");
  return {u, v};
}

}
