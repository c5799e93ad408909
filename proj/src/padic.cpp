#include "quatheta/padic.hpp"

#include "quatheta/error.hpp"

namespace qth {

uint64_t powmod(uint64_t a, uint64_t n, uint64_t q) {
  uint64_t r = 1 % q;
  a %= q;
  while (n) {
    if (n & 1) r = mulmod(r, a, q);
    a = mulmod(a, a, q);
    n >>= 1;
  }
  return r;
}

uint64_t pp_pow(uint64_t p, int e) {
  require(e >= 0, "BadArgument", "negative exponent");
  uint64_t q = 1;
  for (int i = 0; i < e; ++i) {
    require(q <= UINT64_MAX / p, "PrecisionOverflow", "p^e exceeds 64 bits");
    q *= p;
  }
  return q;
}

int val_p(uint64_t x, uint64_t p) {
  require(x != 0, "BadArgument", "valuation of zero");
  int v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

uint64_t inv_unit(uint64_t a, uint64_t p, int e) {
  uint64_t q = pp_pow(p, e);
  a %= q;
  require(a % p != 0, "DivisionByNonUnit", "inverse of a non-unit");
  // Inverse mod p by Fermat, then Newton x <- x(2 - ax); doubles precision
  // per step, so e steps are more than enough.
  uint64_t x = powmod(a % p, p - 2, p);
  for (int i = 0; i < e; ++i) {
    x = mulmod(x, submod(2 % q, mulmod(a, x, q), q), q);
    if (mulmod(a, x, q) == 1 % q) return x;
  }
  fail("InternalError", "inverse iteration failed");
}

std::optional<uint64_t> unit_sqrt(uint64_t a, uint64_t p, int e) {
  require(p % 2 == 1, "BadArgument", "unit_sqrt requires odd p");
  uint64_t q = pp_pow(p, e);
  a %= q;
  require(a % p != 0, "BadArgument", "unit_sqrt requires a unit");
  if (powmod(a % p, (p - 1) / 2, p) != 1) return std::nullopt;
  // Root mod p: p is small in every intended use, scan.
  uint64_t r = 0;
  for (uint64_t t = 1; t < p; ++t)
    if (mulmod(t, t, p) == a % p) {
      r = t;
      break;
    }
  // Newton: r <- (r + a/r)/2, doubling precision per step.
  uint64_t inv2 = inv_unit(2, p, e);
  for (int i = 0; i < e + 1; ++i) {
    if (mulmod(r, r, q) == a) return r;
    r = mulmod(addmod(r, mulmod(a, inv_unit(r, p, e), q), q), inv2, q);
  }
  require(mulmod(r, r, q) == a, "InternalError", "sqrt iteration failed");
  return r;
}

uint64_t hensel_root(const std::vector<uint64_t>& f, uint64_t r0, uint64_t p, int e) {
  uint64_t q = pp_pow(p, e);
  auto eval = [&](const std::vector<uint64_t>& g, uint64_t x) {
    uint64_t acc = 0;
    for (size_t i = g.size(); i-- > 0;) acc = addmod(mulmod(acc, x, q), g[i] % q, q);
    return acc;
  };
  std::vector<uint64_t> df;
  for (size_t i = 1; i < f.size(); ++i) df.push_back(mulmod(f[i] % q, i % q, q));
  require(eval(f, r0) % p == 0, "BadArgument", "not a root mod p");
  require(eval(df, r0) % p != 0, "BadArgument", "root is not simple mod p");
  uint64_t r = r0 % q;
  // Quadratic convergence; e doublings are plenty.
  for (int i = 0, prec = 1; prec < e; ++i, prec *= 2)
    r = submod(r, mulmod(eval(f, r), inv_unit(eval(df, r), p, e), q), q);
  require(eval(f, r) == 0, "InternalError", "Newton failed to converge");
  return r;
}

uint64_t teichmuller(uint64_t a, uint64_t p, int e) {
  uint64_t q = pp_pow(p, e);
  a %= q;
  require(a % p != 0, "BadArgument", "teichmuller of a non-unit");
  // x^{p^k} stabilizes to the (p-1)-st root of unity.
  uint64_t x = a;
  for (int i = 0; i < e; ++i) x = powmod(x, p, q);
  for (;;) {
    uint64_t y = powmod(x, p, q);
    if (y == x) return x;
    x = y;
  }
}

PadicApprox PadicApprox::make(uint64_t p, int prec, uint64_t v) {
  require(p >= 2 && prec >= 1, "BadArgument", "PadicApprox needs p >= 2, prec >= 1");
  return {p, prec, v % pp_pow(p, prec)};
}

static int common_prec(const PadicApprox& a, const PadicApprox& b) {
  require(a.p == b.p, "BadArgument", "mixed primes");
  return a.prec < b.prec ? a.prec : b.prec;
}

PadicApprox PadicApprox::add(const PadicApprox& o) const {
  int m = common_prec(*this, o);
  uint64_t q = pp_pow(p, m);
  return {p, m, addmod(value % q, o.value % q, q)};
}

PadicApprox PadicApprox::sub(const PadicApprox& o) const {
  int m = common_prec(*this, o);
  uint64_t q = pp_pow(p, m);
  return {p, m, submod(value % q, o.value % q, q)};
}

PadicApprox PadicApprox::mul(const PadicApprox& o) const {
  int m = common_prec(*this, o);
  uint64_t q = pp_pow(p, m);
  return {p, m, mulmod(value % q, o.value % q, q)};
}

PadicApprox PadicApprox::neg() const { return {p, prec, negmod(value, pp_pow(p, prec))}; }

PadicApprox PadicApprox::div(const PadicApprox& o) const {
  int m = common_prec(*this, o);
  uint64_t q = pp_pow(p, m);
  require(o.value % o.p != 0, "DivisionByNonUnit", "division by non-unit");
  return {p, m, mulmod(value % q, inv_unit(o.value, p, m), q)};
}

PadicApprox PadicApprox::div_pow_p(int k) const {
  require(k >= 0 && k < prec, "PrecisionLoss", "division by p^k leaves no digits");
  uint64_t pk = pp_pow(p, k);
  require(value % pk == 0, "DivisionByNonUnit", "value not divisible by p^k");
  return {p, prec - k, value / pk};
}

int PadicApprox::valuation() const {
  if (value == 0) return prec;
  int v = val_p(value, p);
  return v < prec ? v : prec;
}

bool PadicApprox::eq_mod(const PadicApprox& o, int digits) const {
  require(p == o.p, "BadArgument", "mixed primes");
  require(digits <= prec && digits <= o.prec, "PrecisionLoss",
          "comparison beyond tracked precision");
  uint64_t q = pp_pow(p, digits);
  return value % q == o.value % q;
}

CycElt CycElt::zero(uint64_t p, int r, int e) {
  require(r >= 1 && e >= 1, "BadArgument", "CycElt needs r,e >= 1");
  CycElt z;
  z.p = p;
  z.r = r;
  z.e = e;
  z.c.assign((p - 1) * pp_pow(p, r - 1), 0);
  return z;
}

CycElt CycElt::scalar(uint64_t p, int r, int e, uint64_t v) {
  CycElt z = zero(p, r, e);
  z.c[0] = v % pp_pow(p, e);
  return z;
}

CycElt CycElt::zeta_pow(uint64_t p, int r, int e, uint64_t k) {
  // X^k reduced mod Phi_{p^r}: for k in [phi, p^r), X^k = -sum_i X^{i p^{r-1} + (k-phi)}.
  CycElt z = zero(p, r, e);
  uint64_t n = pp_pow(p, r);
  uint64_t phi = z.c.size();
  uint64_t q = pp_pow(p, e);
  k %= n;
  if (k < phi) {
    z.c[k] = 1;
  } else {
    uint64_t off = k - phi;
    for (uint64_t i = 0; i + 1 < p; ++i) z.c[i * pp_pow(p, r - 1) + off] = q - 1;
  }
  return z;
}

static void check_same(const CycElt& a, const CycElt& b) {
  require(a.p == b.p && a.r == b.r && a.e == b.e, "BadArgument", "mixed cyclotomic rings");
}

CycElt CycElt::add(const CycElt& o) const {
  check_same(*this, o);
  CycElt z = *this;
  uint64_t q = pp_pow(p, e);
  for (size_t i = 0; i < c.size(); ++i) z.c[i] = addmod(c[i], o.c[i], q);
  return z;
}

CycElt CycElt::sub(const CycElt& o) const {
  check_same(*this, o);
  CycElt z = *this;
  uint64_t q = pp_pow(p, e);
  for (size_t i = 0; i < c.size(); ++i) z.c[i] = submod(c[i], o.c[i], q);
  return z;
}

CycElt CycElt::scale(uint64_t v) const {
  CycElt z = *this;
  uint64_t q = pp_pow(p, e);
  v %= q;
  for (auto& x : z.c) x = mulmod(x, v, q);
  return z;
}

CycElt CycElt::mul(const CycElt& o) const {
  check_same(*this, o);
  uint64_t q = pp_pow(p, e);
  uint64_t n = pp_pow(p, r);
  size_t phi = c.size();
  uint64_t pr1 = pp_pow(p, r - 1);
  // Convolve with exponents mod p^r (X^{p^r} = 1), then fold [phi, p^r) down
  // using X^{phi + t} = -sum_i X^{i p^{r-1} + t}.
  std::vector<uint64_t> buf(n, 0);
  for (size_t i = 0; i < phi; ++i) {
    if (!c[i]) continue;
    for (size_t j = 0; j < phi; ++j) {
      if (!o.c[j]) continue;
      size_t k = (i + j) % n;
      buf[k] = addmod(buf[k], mulmod(c[i], o.c[j], q), q);
    }
  }
  CycElt z = zero(p, r, e);
  for (size_t k = 0; k < phi; ++k) z.c[k] = buf[k];
  for (size_t k = phi; k < n; ++k) {
    if (!buf[k]) continue;
    uint64_t t = k - phi;
    for (uint64_t i = 0; i + 1 < p; ++i) {
      size_t idx = i * pr1 + t;
      z.c[idx] = submod(z.c[idx], buf[k], q);
    }
  }
  return z;
}

uint64_t CycElt::augment() const {
  uint64_t q = pp_pow(p, e);
  uint64_t s = 0;
  for (auto x : c) s = addmod(s, x, q);
  return s;
}

bool CycElt::is_unit() const { return augment() % p != 0; }

}
