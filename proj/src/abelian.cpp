#include "quatheta/abelian.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "quatheta/error.hpp"

namespace qth {

std::shared_ptr<const FinAbGroup> FinAbGroup::make(std::vector<uint32_t> orders) {
  auto g = std::make_shared<FinAbGroup>();
  uint64_t n = 1;
  for (auto d : orders) {
    require(d >= 1, "BadArgument", "cyclic factor of order 0");
    n *= d;
    require(n <= UINT32_MAX, "BadArgument", "group too large");
  }
  g->orders = std::move(orders);
  g->n = static_cast<uint32_t>(n);
  return g;
}

std::vector<uint32_t> FinAbGroup::decomp(uint32_t a) const {
  std::vector<uint32_t> e(orders.size());
  for (size_t i = 0; i < orders.size(); ++i) {
    e[i] = a % orders[i];
    a /= orders[i];
  }
  return e;
}

uint32_t FinAbGroup::compose(const std::vector<uint32_t>& e) const {
  require(e.size() == orders.size(), "BadArgument", "exponent vector size mismatch");
  uint64_t a = 0, radix = 1;
  for (size_t i = 0; i < orders.size(); ++i) {
    a += static_cast<uint64_t>(e[i] % orders[i]) * radix;
    radix *= orders[i];
  }
  return static_cast<uint32_t>(a);
}

uint32_t FinAbGroup::op(uint32_t a, uint32_t b) const {
  uint64_t out = 0, radix = 1;
  for (auto d : orders) {
    uint32_t s = (a % d + b % d) % d;
    out += static_cast<uint64_t>(s) * radix;
    radix *= d;
    a /= d;
    b /= d;
  }
  return static_cast<uint32_t>(out);
}

uint32_t FinAbGroup::inv(uint32_t a) const {
  uint64_t out = 0, radix = 1;
  for (auto d : orders) {
    uint32_t e = a % d;
    out += static_cast<uint64_t>(e ? d - e : 0) * radix;
    radix *= d;
    a /= d;
  }
  return static_cast<uint32_t>(out);
}

uint32_t FinAbGroup::pow(uint32_t a, uint64_t k) const {
  uint64_t out = 0, radix = 1;
  for (auto d : orders) {
    out += ((a % d) * (k % d) % d) * radix;
    radix *= d;
    a /= d;
  }
  return static_cast<uint32_t>(out);
}

uint32_t FinAbGroup::order_of(uint32_t a) const {
  uint64_t l = 1;
  for (auto d : orders) {
    uint32_t e = a % d;
    a /= d;
    uint32_t o = d / std::gcd(d, e == 0 ? d : e);
    l = std::lcm(l, static_cast<uint64_t>(o));
  }
  return static_cast<uint32_t>(l);
}

bool FinAbGroup::is_cyclic_p_power(uint64_t p) const {
  uint32_t nontrivial = 0;
  for (auto d : orders)
    if (d > 1) ++nontrivial;
  if (nontrivial > 1) return false;
  uint64_t m = n;
  while (m % p == 0) m /= p;
  return m == 1;
}

namespace {

// Subgroup generated so far, as a direct sum of chosen generators; tracks a
// discrete log for every element reached.
struct Span {
  std::vector<uint32_t> elems;             // all elements of the span
  std::vector<int64_t> dlog;               // raw index -> position in elems, -1 if absent
  std::vector<std::vector<uint32_t>> exp;  // position -> exponent vector in gens

  bool contains(uint32_t x) const { return dlog[x] >= 0; }
};

}  // namespace

AbGroupIso analyze_abelian(uint32_t n, uint32_t id,
                           const std::function<uint32_t(uint32_t, uint32_t)>& mul) {
  require(n >= 1, "BadArgument", "empty group");

  auto pw = [&](uint32_t a, uint64_t k) {
    uint32_t r = id;
    while (k) {
      if (k & 1) r = mul(r, a);
      a = mul(a, a);
      k >>= 1;
    }
    return r;
  };
  auto order_of = [&](uint32_t a) {
    uint32_t o = 1;
    uint32_t x = a;
    while (x != id) {
      x = mul(x, a);
      ++o;
      require(o <= n, "BadArgument", "law is not a group of the stated size");
    }
    return o;
  };

  // Primary decomposition: handle each prime dividing |G| separately.
  std::vector<uint32_t> ords(n);
  for (uint32_t i = 0; i < n; ++i) ords[i] = order_of(i);

  std::map<uint32_t, std::vector<uint32_t>> primes;  // prime -> generator orders chosen
  std::vector<std::pair<uint32_t, uint32_t>> gens;   // (element, order), all primes
  {
    uint64_t m = n;
    std::vector<uint32_t> ps;
    for (uint64_t q = 2; q * q <= m; ++q)
      if (m % q == 0) {
        ps.push_back(static_cast<uint32_t>(q));
        while (m % q == 0) m /= q;
      }
    if (m > 1) ps.push_back(static_cast<uint32_t>(m));

    for (uint32_t q : ps) {
      // Sylow subgroup: elements of q-power order.
      std::vector<uint32_t> syl;
      for (uint32_t i = 0; i < n; ++i) {
        uint32_t o = ords[i];
        while (o % q == 0) o /= q;
        if (o == 1) syl.push_back(i);
      }
      Span span;
      span.elems = {id};
      span.dlog.assign(n, -1);
      span.dlog[id] = 0;
      span.exp = {{}};

      while (span.elems.size() < syl.size()) {
        // Element with maximal order modulo the span; ties broken by index
        // for determinism.
        uint32_t best = id, bestord = 1;
        for (uint32_t x : syl) {
          if (span.contains(x)) continue;
          uint32_t o = 1;
          uint32_t y = x;
          while (!span.contains(y)) {
            y = pw(y, q);
            o *= q;
          }
          if (o > bestord) {
            bestord = o;
            best = x;
          }
        }
        uint32_t g = best, d = bestord;
        // g^d lies in the span; purity of the span (max-order-first peeling)
        // guarantees it has a d-th root there. Replace g by g/root so the
        // extension is a direct sum.
        uint32_t s = pw(g, d);
        uint32_t root = id;
        bool found = false;
        for (uint32_t t : span.elems)
          if (pw(t, d) == s) {
            root = t;
            found = true;
            break;
          }
        require(found, "InternalError", "span lost purity during peeling");
        uint32_t rootinv = pw(root, order_of(root) - 1);
        g = mul(g, rootinv);
        require(pw(g, d) == id, "InternalError", "adjusted generator has wrong order");

        for (auto& e : span.exp) e.push_back(0);
        std::vector<uint32_t> prev = span.elems;
        std::vector<std::vector<uint32_t>> prevexp = span.exp;
        uint32_t gp = g;
        for (uint32_t k = 1; k < d; ++k) {
          for (size_t i = 0; i < prev.size(); ++i) {
            uint32_t x = mul(prev[i], gp);
            require(span.dlog[x] < 0, "InternalError", "span extension is not direct");
            span.dlog[x] = static_cast<int64_t>(span.elems.size());
            auto e = prevexp[i];
            e.back() = k;
            span.elems.push_back(x);
            span.exp.push_back(e);
          }
          gp = mul(gp, g);
        }
        gens.emplace_back(g, d);
        primes[q].push_back(d);
      }
    }
  }

  // Assemble: the whole group is the direct sum of the per-prime spans.
  std::vector<uint32_t> factor_orders;
  for (auto& [g, d] : gens) factor_orders.push_back(d);
  if (factor_orders.empty()) factor_orders.push_back(1);
  AbGroupIso iso;
  iso.group = FinAbGroup::make(factor_orders);
  require(iso.group->n == n, "InternalError", "generator orders do not fill the group");

  iso.from_structured.assign(n, id);
  iso.to_structured.assign(n, 0);
  for (uint32_t code = 0; code < n; ++code) {
    auto e = iso.group->decomp(code);
    uint32_t x = id;
    for (size_t i = 0; i < gens.size(); ++i) x = mul(x, pw(gens[i].first, e[i]));
    iso.from_structured[code] = x;
    iso.to_structured[x] = code;
  }
  // Bijectivity check.
  std::vector<bool> seen(n, false);
  for (uint32_t code = 0; code < n; ++code) {
    uint32_t x = iso.from_structured[code];
    require(!seen[x], "InternalError", "group relabeling is not a bijection");
    seen[x] = true;
  }
  return iso;
}

}
