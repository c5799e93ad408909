#include "quatheta/classset.hpp"

#include <algorithm>
#include <deque>

#include "quatheta/error.hpp"
#include "quatheta/padic.hpp"

namespace qth {

Int unit_pairs(const QuatAlg& alg, const QLat& order) {
  auto g = nrd_gram(alg, order);
  auto vecs = short_vectors(g, Rat(1));
  Int count = 0;
  for (const auto& v : vecs) {
    Rat n = 0;
    for (size_t r = 0; r < 4; ++r)
      for (size_t s = 0; s < 4; ++s) n += g[r][s] * v[r] * v[s];
    if (n == 1) ++count;
  }
  return count;
}

Rat class_mass(const ClassSet& cs) {
  Rat m = 0;
  for (const auto& w : cs.weights) m += Rat(1, 2 * w);
  return m;
}

Rat mass_formula(const Int& nminus, const Int& level) {
  Rat m(1, 24);
  for (const auto& q : prime_factors(nminus)) m *= q - 1;
  Rat psi(level);
  for (const auto& q : prime_factors(level)) psi *= Rat(q + 1, q);
  return m * psi;
}

std::vector<QLat> neighbors(const ClassSet& cs, const QLat& ideal, uint64_t ell) {
  Int ellI(ell);
  auto ram = ramified_primes(cs.alg);
  require(std::find(ram.begin(), ram.end(), ellI) == ram.end(),
          "neighbor-prime", "neighbor prime is ramified in the algebra");
  require(cs.m == 0 || ell != cs.p, "neighbor-prime",
          "neighbor prime must avoid p at positive level");
  // Right action of the order basis on ideal/ell*ideal.
  auto ib = lat_basis(ideal);
  auto ob = lat_basis(cs.order);
  RatMat ibm(4, std::vector<Rat>(4));
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) ibm[r][s] = Rat(ideal.b[r][s], ideal.den);
  auto inv = rat_inverse(ibm);
  require(inv.has_value(), "neighbor-basis", "ideal basis singular");
  // act[s][r][t]: coordinates of ib[r] * ob[s] over ib, mod ell
  std::vector<std::vector<std::vector<uint64_t>>> act(
      4, std::vector<std::vector<uint64_t>>(4, std::vector<uint64_t>(4)));
  for (int s = 0; s < 4; ++s)
    for (int r = 0; r < 4; ++r) {
      auto prod = q_coords(q_mul(cs.alg, ib[r], ob[s]));
      for (int t = 0; t < 4; ++t) {
        Rat c = 0;
        for (int u = 0; u < 4; ++u) c += prod[u] * (*inv)[u][t];
        Int den = denominator(c);
        require(den % ellI != 0, "neighbor-coords", "action not integral at ell");
        Int num = numerator(c) % ellI;
        if (num < 0) num += ellI;
        Int dv = den % ellI;
        uint64_t inv_d = inv_unit(dv.convert_to<uint64_t>(), ell, 1);
        act[s][r][t] = mulmod(num.convert_to<uint64_t>(), inv_d, ell);
      }
    }
  // Enumerate 2-dim subspaces of F_ell^4 by reduced row echelon form.
  std::vector<QLat> out;
  auto reduce_vec = [&](std::vector<uint64_t> v, const std::vector<uint64_t>& r1,
                        const std::vector<uint64_t>& r2, int p1, int p2) {
    // subtract multiples of the two echelon rows to clear pivot columns
    uint64_t f1 = v[p1];
    for (int t = 0; t < 4; ++t) v[t] = submod(v[t], mulmod(f1, r1[t], ell), ell);
    uint64_t f2 = v[p2];
    for (int t = 0; t < 4; ++t) v[t] = submod(v[t], mulmod(f2, r2[t], ell), ell);
    return v;
  };
  for (int p1 = 0; p1 < 4; ++p1)
    for (int p2 = p1 + 1; p2 < 4; ++p2) {
      // rows: r1 = e_{p1} + free entries beyond p1 excluding p2,
      //       r2 = e_{p2} + free entries beyond p2
      std::vector<int> free1, free2;
      for (int t = p1 + 1; t < 4; ++t)
        if (t != p2) free1.push_back(t);
      for (int t = p2 + 1; t < 4; ++t) free2.push_back(t);
      size_t n1 = free1.size(), n2 = free2.size();
      uint64_t total = 1;
      for (size_t i = 0; i < n1 + n2; ++i) total *= ell;
      for (uint64_t code = 0; code < total; ++code) {
        std::vector<uint64_t> r1(4, 0), r2(4, 0);
        r1[p1] = 1;
        r2[p2] = 1;
        uint64_t c = code;
        for (size_t i = 0; i < n1; ++i) { r1[free1[i]] = c % ell; c /= ell; }
        for (size_t i = 0; i < n2; ++i) { r2[free2[i]] = c % ell; c /= ell; }
        // stability under the right action
        bool stable = true;
        for (int s = 0; s < 4 && stable; ++s) {
          for (const auto& row : {r1, r2}) {
            std::vector<uint64_t> w(4, 0);
            for (int r = 0; r < 4; ++r)
              for (int t = 0; t < 4; ++t)
                w[t] = addmod(w[t], mulmod(row[r], act[s][r][t], ell), ell);
            auto z = reduce_vec(w, r1, r2, p1, p2);
            for (int t = 0; t < 4; ++t)
              if (z[t] != 0) { stable = false; break; }
            if (!stable) break;
          }
        }
        if (!stable) continue;
        std::vector<Quat> gens;
        for (const auto& row : {r1, r2}) {
          Quat g{0, 0, 0, 0, 1};
          for (int r = 0; r < 4; ++r)
            g = q_add(g, q_scale(ib[r], Rat(Int(row[r]))));
          gens.push_back(g);
        }
        for (const auto& b : ib) gens.push_back(q_scale(b, Rat(ellI)));
        QLat j = lat_from_gens(gens);
        Rat idx = lat_det(j) / lat_det(ideal);
        require(idx == Rat(ellI * ellI), "neighbor-index", "neighbor index wrong");
        out.push_back(j);
      }
    }
  require(out.size() == ell + 1, "neighbor-count",
          "wrong number of stable submodules");
  return out;
}

std::optional<std::pair<int, Quat>> try_reduce_to_class(const ClassSet& cs,
                                                        const QLat& ideal) {
  Rat nj = ideal_nrd(ideal, cs.order);
  for (size_t j = 0; j < cs.reps.size(); ++j) {
    Rat ni = ideal_nrd(cs.reps[j], cs.order);
    QLat c = lat_mul(cs.alg, ideal, lat_conj(cs.reps[j]));
    Rat target = nj * ni;
    auto g = nrd_gram(cs.alg, c);
    auto cb = lat_basis(c);
    auto vecs = short_vectors(g, target);
    for (const auto& v : vecs) {
      Rat n = 0;
      for (size_t r = 0; r < 4; ++r)
        for (size_t s = 0; s < 4; ++s) n += g[r][s] * v[r] * v[s];
      if (n != target) continue;
      Quat y{0, 0, 0, 0, 1};
      for (int r = 0; r < 4; ++r) y = q_add(y, q_scale(cb[r], Rat(v[r])));
      Quat x = q_scale(y, Rat(1) / ni);
      if (lat_mul_elt(cs.alg, x, cs.reps[j]) == ideal)
        return std::make_pair(static_cast<int>(j), x);
    }
  }
  return std::nullopt;
}

std::pair<int, Quat> reduce_to_class(const ClassSet& cs, const QLat& ideal) {
  auto r = try_reduce_to_class(cs, ideal);
  require(r.has_value(), "class-missing", "ideal matches no class rep");
  return *r;
}

ClassSet build_class_set(const Int& dk, const Int& beta, uint64_t p, int m,
                         int prec) {
  ClassSet cs;
  cs.alg = QuatAlg{-dk, beta};
  cs.dk = dk;
  cs.p = p;
  cs.m = m;
  cs.prec = prec;
  auto ram = ramified_primes(cs.alg);
  Int nminus = 1;
  for (const auto& q : ram) nminus *= q;
  cs.omax = maximal_order(cs.alg, dk, nminus);
  cs.sp = split_order(cs.alg, dk, cs.omax, p, prec);
  cs.order = eichler_order(cs.omax, cs.sp, m);
  cs.reps.push_back(cs.order);
  std::deque<size_t> queue{0};
  while (!queue.empty()) {
    size_t i = queue.front();
    queue.pop_front();
    for (const auto& j : neighbors(cs, cs.reps[i], 2)) {
      if (try_reduce_to_class(cs, j).has_value()) continue;
      cs.reps.push_back(j);
      queue.push_back(cs.reps.size() - 1);
    }
  }
  for (const auto& rep : cs.reps) {
    QLat lo = left_order(cs.alg, rep);
    cs.weights.push_back(unit_pairs(cs.alg, lo));
    cs.lorders.push_back(std::move(lo));
  }
  // completeness and non-redundancy certificate
  Int level = Int(pp_pow(p, m));
  require(class_mass(cs) == mass_formula(nminus, level), "class-mass",
          "class set mass does not match the mass formula");
  return cs;
}

}
