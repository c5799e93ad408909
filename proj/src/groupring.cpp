#include "quatheta/groupring.hpp"

#include <json.hpp>

#include <numeric>

#include "quatheta/error.hpp"

namespace qth {

using nlohmann::json;

GroupRingElt GroupRingElt::zero(uint64_t p, int M, std::shared_ptr<const FinAbGroup> G) {
  require(p >= 2 && M >= 1 && G != nullptr, "BadArgument", "GroupRingElt needs p, M, G");
  GroupRingElt x;
  x.p = p;
  x.M = M;
  x.G = std::move(G);
  x.c.assign(x.G->n, 0);
  return x;
}

GroupRingElt GroupRingElt::dirac(uint64_t p, int M, std::shared_ptr<const FinAbGroup> G,
                                 uint32_t g, uint64_t coeff) {
  GroupRingElt x = zero(p, M, std::move(G));
  require(g < x.G->n, "BadArgument", "group element out of range");
  x.c[g] = coeff % pp_pow(p, M);
  return x;
}

static uint64_t factorial_mod(int k, uint64_t q) {
  uint64_t f = 1 % q;
  for (int i = 2; i <= k; ++i) f = mulmod(f, static_cast<uint64_t>(i) % q, q);
  return f;
}

// Brings both summands to a common factorial denominator. The scaling ratio
// bigger!/smaller! must be a p-unit or precision would silently drop.
static void unify_denoms(GroupRingElt& a, GroupRingElt& b) {
  if (a.denom_factorial == b.denom_factorial) return;
  GroupRingElt& lo = a.denom_factorial < b.denom_factorial ? a : b;
  const GroupRingElt& hi = a.denom_factorial < b.denom_factorial ? b : a;
  uint64_t q = pp_pow(lo.p, lo.M);
  uint64_t ratio = 1;
  for (int i = lo.denom_factorial + 1; i <= hi.denom_factorial; ++i) {
    require(static_cast<uint64_t>(i) % lo.p != 0, "DivisionByNonUnit",
            "cannot unify factorial denominators across a multiple of p");
    ratio = mulmod(ratio, static_cast<uint64_t>(i) % q, q);
  }
  for (auto& x : lo.c) x = mulmod(x, ratio, q);
  lo.denom_factorial = hi.denom_factorial;
}

static void check_compatible(const GroupRingElt& a, const GroupRingElt& b) {
  require(a.p == b.p && a.G && b.G && a.G->orders == b.G->orders, "BadArgument",
          "group ring mismatch");
}

GroupRingElt GroupRingElt::add(const GroupRingElt& o) const {
  check_compatible(*this, o);
  GroupRingElt a = *this, b = o;
  a.M = b.M = std::min(M, o.M);
  unify_denoms(a, b);
  uint64_t q = pp_pow(p, a.M);
  for (uint32_t i = 0; i < G->n; ++i) a.c[i] = addmod(a.c[i] % q, b.c[i] % q, q);
  return a;
}

GroupRingElt GroupRingElt::sub(const GroupRingElt& o) const {
  check_compatible(*this, o);
  GroupRingElt a = *this, b = o;
  a.M = b.M = std::min(M, o.M);
  unify_denoms(a, b);
  uint64_t q = pp_pow(p, a.M);
  for (uint32_t i = 0; i < G->n; ++i) a.c[i] = submod(a.c[i] % q, b.c[i] % q, q);
  return a;
}

GroupRingElt GroupRingElt::mul(const GroupRingElt& o) const {
  check_compatible(*this, o);
  GroupRingElt z = zero(p, std::min(M, o.M), G);
  z.denom_factorial = 0;
  // Product of (1/a!)x * (1/b!)y is represented with denominator max(a,b)!
  // only when the complementary factorial is a unit; keep it simple and
  // clear denominators first (valid for every weight this library pins).
  GroupRingElt a = clear_denominator();
  GroupRingElt b = o.clear_denominator();
  uint64_t q = pp_pow(p, z.M);
  for (uint32_t i = 0; i < G->n; ++i) {
    uint64_t ai = a.c[i] % q;
    if (!ai) continue;
    for (uint32_t j = 0; j < G->n; ++j) {
      uint64_t bj = b.c[j] % q;
      if (!bj) continue;
      uint32_t k = G->op(i, j);
      z.c[k] = addmod(z.c[k], mulmod(ai, bj, q), q);
    }
  }
  return z;
}

GroupRingElt GroupRingElt::scale(uint64_t v) const {
  GroupRingElt z = *this;
  uint64_t q = pp_pow(p, M);
  v %= q;
  for (auto& x : z.c) x = mulmod(x, v, q);
  return z;
}

GroupRingElt GroupRingElt::involute() const {
  GroupRingElt z = zero(p, M, G);
  z.denom_factorial = denom_factorial;
  for (uint32_t i = 0; i < G->n; ++i) z.c[G->inv(i)] = c[i];
  return z;
}

uint64_t GroupRingElt::augment() const {
  GroupRingElt a = clear_denominator();
  uint64_t q = pp_pow(p, M);
  uint64_t s = 0;
  for (auto x : a.c) s = addmod(s, x % q, q);
  return s;
}

GroupRingElt GroupRingElt::project(std::shared_ptr<const FinAbGroup> H,
                                   const std::vector<uint32_t>& index_map) const {
  require(index_map.size() == G->n, "BadArgument", "homomorphism map size mismatch");
  GroupRingElt z = zero(p, M, std::move(H));
  z.denom_factorial = denom_factorial;
  uint64_t q = pp_pow(p, M);
  for (uint32_t i = 0; i < G->n; ++i) {
    require(index_map[i] < z.G->n, "BadArgument", "homomorphism image out of range");
    z.c[index_map[i]] = addmod(z.c[index_map[i]], c[i] % q, q);
  }
  return z;
}

GroupRingElt GroupRingElt::clear_denominator() const {
  if (denom_factorial == 0) return *this;
  uint64_t q = pp_pow(p, M);
  uint64_t f = factorial_mod(denom_factorial, q);
  require(f % p != 0, "DivisionByNonUnit", "factorial denominator is not a p-unit");
  uint64_t finv = inv_unit(f, p, M);
  GroupRingElt z = *this;
  z.denom_factorial = 0;
  for (auto& x : z.c) x = mulmod(x % q, finv, q);
  return z;
}

bool GroupRingElt::eq_mod(const GroupRingElt& o, int digits) const {
  check_compatible(*this, o);
  require(digits <= M && digits <= o.M, "PrecisionLoss", "comparison beyond precision");
  GroupRingElt a = clear_denominator(), b = o.clear_denominator();
  uint64_t q = pp_pow(p, digits);
  for (uint32_t i = 0; i < G->n; ++i)
    if (a.c[i] % q != b.c[i] % q) return false;
  return true;
}

bool GroupRingElt::is_zero_mod(int digits) const {
  require(digits <= M, "PrecisionLoss", "comparison beyond precision");
  GroupRingElt a = clear_denominator();
  uint64_t q = pp_pow(p, digits);
  for (auto x : a.c)
    if (x % q != 0) return false;
  return true;
}

static std::vector<uint64_t> to_digits(uint64_t v, uint64_t p, int M) {
  std::vector<uint64_t> d(M);
  for (int i = 0; i < M; ++i) {
    d[i] = v % p;
    v /= p;
  }
  return d;
}

std::string GroupRingElt::to_json() const {
  json j;
  j["p"] = p;
  j["M"] = M;
  j["group"] = {{"orders", G->orders}};
  j["denom_factorial"] = denom_factorial;
  json coeffs = json::array();
  for (auto v : c) coeffs.push_back(to_digits(v, p, M));
  j["coeffs"] = std::move(coeffs);
  return j.dump();
}

GroupRingElt GroupRingElt::from_json(const std::string& text) {
  json j = json::parse(text);
  uint64_t p = j.at("p").get<uint64_t>();
  int M = j.at("M").get<int>();
  auto G = FinAbGroup::make(j.at("group").at("orders").get<std::vector<uint32_t>>());
  GroupRingElt x = zero(p, M, G);
  x.denom_factorial = j.at("denom_factorial").get<int>();
  const auto& coeffs = j.at("coeffs");
  require(coeffs.size() == G->n, "BadArgument", "coefficient count mismatch");
  for (uint32_t i = 0; i < G->n; ++i) {
    const auto& digits = coeffs.at(i);
    require(digits.size() == static_cast<size_t>(M), "BadArgument", "digit count mismatch");
    uint64_t v = 0;
    for (size_t k = digits.size(); k-- > 0;) {
      uint64_t d = digits.at(k).get<uint64_t>();
      require(d < p, "BadArgument", "digit out of range");
      v = v * p + d;
    }
    x.c[i] = v;
  }
  return x;
}

CycElt eval_character(const GroupRingElt& x, int r, const std::vector<uint64_t>& k) {
  require(k.size() == x.G->orders.size(), "BadArgument", "character exponent count mismatch");
  uint64_t pr = pp_pow(x.p, r);
  for (size_t i = 0; i < k.size(); ++i)
    require(k[i] % (pr / std::gcd(pr, static_cast<uint64_t>(x.G->orders[i]))) == 0,
            "BadArgument", "character is not a homomorphism on factor");
  GroupRingElt a = x.clear_denominator();
  CycElt out = CycElt::zero(x.p, r, x.M);
  for (uint32_t g = 0; g < x.G->n; ++g) {
    if (!a.c[g]) continue;
    auto e = x.G->decomp(g);
    uint64_t ex = 0;
    for (size_t i = 0; i < e.size(); ++i) ex = (ex + k[i] % pr * (e[i] % pr)) % pr;
    out = out.add(CycElt::zeta_pow(x.p, r, x.M, ex).scale(a.c[g]));
  }
  return out;
}

}
