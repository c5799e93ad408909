#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace qth {

// Univariate polynomials over Z/p^e: coefficient vectors, ascending degree,
// entries reduced mod p^e. Used for spectral splitting of Hecke matrices.

std::vector<uint64_t> up_trim(std::vector<uint64_t> a);
std::vector<uint64_t> up_add(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b, uint64_t pe);
std::vector<uint64_t> up_sub(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b, uint64_t pe);
std::vector<uint64_t> up_mul(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b, uint64_t pe);
std::vector<uint64_t> up_scale(const std::vector<uint64_t>& a, uint64_t s,
                               uint64_t pe);
uint64_t up_eval(const std::vector<uint64_t>& a, uint64_t x, uint64_t pe);

// Quotient and remainder by a monic divisor.
std::pair<std::vector<uint64_t>, std::vector<uint64_t>> up_divmod(
    const std::vector<uint64_t>& a, const std::vector<uint64_t>& b,
    uint64_t pe);

// Roots of a polynomial over F_p by scanning (p is small here), with
// multiplicities.
std::vector<std::pair<uint64_t, int>> up_roots_mod_p(
    const std::vector<uint64_t>& a, uint64_t p);

// Factor a monic f mod p^e as g*h where g reduces mod p to the full branch
// of the root r (that is, (X - r)^mult exactly) and h(r) is a unit. Hensel
// lifting; requires the two branches coprime mod p, which holds as long as
// f is monic. Returns (g, h).
std::pair<std::vector<uint64_t>, std::vector<uint64_t>> up_branch_split(
    const std::vector<uint64_t>& f, uint64_t r, uint64_t p, int e);

// Bezout pair (u, v) with u*g + v*h = 1 mod p^e for monic g, h coprime
// mod p; deg u < deg h, deg v < deg g.
std::pair<std::vector<uint64_t>, std::vector<uint64_t>> up_bezout(
    const std::vector<uint64_t>& g, const std::vector<uint64_t>& h,
    uint64_t p, int e);

}
