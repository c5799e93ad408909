#include "quatheta/exact.hpp"

#include <algorithm>

#include "quatheta/error.hpp"

namespace qth {

IntMat int_identity(size_t n) {
  IntMat a(n, std::vector<Int>(n, 0));
  for (size_t i = 0; i < n; ++i) a[i][i] = 1;
  return a;
}

IntMat int_mul(const IntMat& a, const IntMat& b) {
  require(!a.empty() && !b.empty() && a[0].size() == b.size(), "BadArgument",
          "matrix shape mismatch");
  IntMat c(a.size(), std::vector<Int>(b[0].size(), 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

IntMat int_transpose(const IntMat& a) {
  if (a.empty()) return {};
  IntMat t(a[0].size(), std::vector<Int>(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

Int int_det(IntMat a) {
  size_t n = a.size();
  require(n > 0 && a[0].size() == n, "BadArgument", "determinant of non-square matrix");
  // Bareiss fraction-free elimination.
  Int prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      size_t s = k + 1;
      while (s < n && a[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(a[k], a[s]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    prev = a[k][k];
  }
  return sign > 0 ? a[n - 1][n - 1] : -a[n - 1][n - 1];
}

RatMat rat_from_int(const IntMat& a) {
  RatMat r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::vector<Rat>(a[i].begin(), a[i].end());
  return r;
}

RatMat rat_mul(const RatMat& a, const RatMat& b) {
  require(!a.empty() && !b.empty() && a[0].size() == b.size(), "BadArgument",
          "matrix shape mismatch");
  RatMat c(a.size(), std::vector<Rat>(b[0].size(), 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

std::optional<RatMat> rat_inverse(RatMat a) {
  size_t n = a.size();
  require(n > 0 && a[0].size() == n, "BadArgument", "inverse of non-square matrix");
  RatMat inv(n, std::vector<Rat>(n, 0));
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    Rat d = a[col][col];
    for (size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      Rat f = a[i][col];
      for (size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[col][j];
        inv[i][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

Rat rat_det(RatMat a) {
  size_t n = a.size();
  require(n > 0 && a[0].size() == n, "BadArgument", "determinant of non-square matrix");
  Rat det = 1;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    Rat d = a[col][col];
    for (size_t i = col + 1; i < n; ++i) {
      if (a[i][col] == 0) continue;
      Rat f = a[i][col] / d;
      for (size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  return det;
}

IntMat row_hnf(const IntMat& a, IntMat* u) {
  size_t m = a.size();
  require(m > 0, "BadArgument", "HNF of empty matrix");
  size_t n = a[0].size();
  IntMat h = a;
  IntMat tr = int_identity(m);

  size_t row = 0;
  for (size_t col = 0; col < n && row < m; ++col) {
    // Clear the column below `row` by gcd steps.
    for (;;) {
      size_t piv = m;
      for (size_t i = row; i < m; ++i)
        if (h[i][col] != 0 && (piv == m || abs(h[i][col]) < abs(h[piv][col]))) piv = i;
      if (piv == m) break;
      std::swap(h[piv], h[row]);
      std::swap(tr[piv], tr[row]);
      bool clean = true;
      for (size_t i = row + 1; i < m; ++i) {
        if (h[i][col] == 0) continue;
        Int q = h[i][col] / h[row][col];
        for (size_t j = 0; j < n; ++j) h[i][j] -= q * h[row][j];
        for (size_t j = 0; j < m; ++j) tr[i][j] -= q * tr[row][j];
        if (h[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (h[row][col] == 0) continue;
    if (h[row][col] < 0) {
      for (auto& x : h[row]) x = -x;
      for (auto& x : tr[row]) x = -x;
    }
    // Reduce the entries above the pivot into [0, pivot).
    for (size_t i = 0; i < row; ++i) {
      Int q = h[i][col] / h[row][col];
      if (h[i][col] - q * h[row][col] < 0) q -= 1;
      if (q == 0) continue;
      for (size_t j = 0; j < n; ++j) h[i][j] -= q * h[row][j];
      for (size_t j = 0; j < m; ++j) tr[i][j] -= q * tr[row][j];
    }
    ++row;
  }
  if (u) *u = tr;
  h.resize(row);
  return h;
}

IntMat left_kernel(const IntMat& a) {
  IntMat u;
  IntMat h = row_hnf(a, &u);
  // Rows of u beyond rank(h) map to zero rows.
  IntMat k;
  for (size_t i = h.size(); i < a.size(); ++i) k.push_back(u[i]);
  if (!k.empty()) k = row_hnf(k);
  return k;
}

Int floor_sqrt(const Rat& q) {
  require(q >= 0, "BadArgument", "sqrt of negative");
  Int a = numerator(q), b = denominator(q);
  // floor(sqrt(a/b)) = floor(isqrt(a*b)/b).
  Int prod = a * b;
  Int r = sqrt(prod);
  return r / b;
}

Int floor_add_sqrt(const Rat& c, const Rat& q) {
  require(q >= 0, "BadArgument", "sqrt of negative");
  // Exact test: k <= c + sqrt(q)  <=>  (k - c) <= 0 or (k - c)^2 <= q.
  auto ok = [&](const Int& k) {
    Rat d = Rat(k) - c;
    return d <= 0 || d * d <= q;
  };
  Int k = numerator(c) / denominator(c) + floor_sqrt(q) + 2;
  while (!ok(k)) --k;
  while (ok(k + 1)) ++k;
  return k;
}

Int ceil_sub_sqrt(const Rat& c, const Rat& q) { return -floor_add_sqrt(-c, q); }

std::vector<std::vector<Int>> short_vectors(const RatMat& g, const Rat& bound) {
  size_t n = g.size();
  require(n > 0 && g[0].size() == n, "BadArgument", "Gram matrix not square");
  require(bound >= 0, "BadArgument", "negative bound");
  // LDL^T: Q(x) = sum_i d[i] (x_i + sum_{j>i} mu[i][j] x_j)^2.
  RatMat mu(n, std::vector<Rat>(n, 0));
  std::vector<Rat> d(n);
  {
    RatMat a = g;
    for (size_t i = 0; i < n; ++i) {
      for (size_t k = 0; k < i; ++k)
        for (size_t j = i; j < n; ++j) a[i][j] -= mu[k][i] * mu[k][j] * d[k];
      d[i] = a[i][i];
      require(d[i] > 0, "BadArgument", "Gram matrix not positive definite");
      for (size_t j = i + 1; j < n; ++j) mu[i][j] = a[i][j] / d[i];
    }
  }

  std::vector<std::vector<Int>> out;
  std::vector<Int> x(n, 0);
  // Depth-first from the last coordinate; emit each +/- pair once by
  // requiring the trailing nonzero coordinate to be positive.
  auto rec = [&](auto&& self, size_t i, const Rat& remaining, bool tail_zero) -> void {
    if (i == SIZE_MAX) {
      for (auto& v : x)
        if (v != 0) {
          out.push_back(x);
          return;
        }
      return;
    }
    Rat center = 0;
    for (size_t j = i + 1; j < n; ++j) center += mu[i][j] * Rat(x[j]);
    Rat q = remaining / d[i];
    Int lo = ceil_sub_sqrt(-center, q);
    Int hi = floor_add_sqrt(-center, q);
    if (tail_zero && lo < 0) lo = 0;
    for (Int v = lo; v <= hi; ++v) {
      x[i] = v;
      Rat t = Rat(v) + center;
      Rat used = d[i] * t * t;
      if (used > remaining) continue;
      self(self, i - 1, remaining - used, tail_zero && v == 0);
    }
    x[i] = 0;
  };
  rec(rec, n - 1, bound, true);
  return out;
}

IntMat congruence_kernel(const IntMat& c, const std::vector<Int>& mods) {
  size_t n = c.size();
  size_t e = mods.size();
  IntMat stack(n + e, std::vector<Int>(e, 0));
  for (size_t r = 0; r < n; ++r) {
    if (c[r].size() != e) fail("congruence-shape", "condition matrix shape mismatch");
    for (size_t s = 0; s < e; ++s) stack[r][s] = c[r][s];
  }
  for (size_t s = 0; s < e; ++s) stack[n + s][s] = mods[s];
  IntMat ker = left_kernel(stack);
  IntMat rows;
  for (const auto& row : ker)
    rows.push_back(std::vector<Int>(row.begin(), row.begin() + n));
  IntMat h = row_hnf(rows, nullptr);
  if (h.size() != n) fail("congruence-rank", "kernel lattice not full rank");
  return h;
}

std::vector<Int> char_poly(const IntMat& a) {
  // Faddeev-LeVerrier: M_1 = A, c_{n-k} = -tr(A M_k)/k with
  // M_{k+1} = A M_k + c_{n-k} A; divisions are exact over Z.
  size_t n = a.size();
  std::vector<Int> c(n + 1, 0);
  c[n] = 1;
  IntMat m = int_identity(n);
  for (size_t k = 1; k <= n; ++k) {
    m = int_mul(a, m);
    Int tr = 0;
    for (size_t i = 0; i < n; ++i) tr += m[i][i];
    if (tr % Int(k) != 0) fail("charpoly-division", "trace step not divisible");
    c[n - k] = -tr / Int(k);
    for (size_t i = 0; i < n; ++i) m[i][i] += c[n - k];
  }
  return c;
}

}
