#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace qth {

// A finite abelian group presented as a product of cyclic factors. Elements
// are indices into the mixed-radix enumeration of exponent vectors: index
// sum_i e_i * prod_{j<i} orders[j] corresponds to (e_0, e_1, ...).
struct FinAbGroup {
  std::vector<uint32_t> orders;
  uint32_t n = 1;

  static std::shared_ptr<const FinAbGroup> make(std::vector<uint32_t> orders);

  std::vector<uint32_t> decomp(uint32_t a) const;
  uint32_t compose(const std::vector<uint32_t>& e) const;

  uint32_t op(uint32_t a, uint32_t b) const;
  uint32_t inv(uint32_t a) const;
  uint32_t id() const { return 0; }
  uint32_t pow(uint32_t a, uint64_t k) const;
  uint32_t order_of(uint32_t a) const;
  bool is_cyclic_p_power(uint64_t p) const;
};

// Recovers the abstract structure of an abelian group given by an opaque
// multiplication law on indices 0..n-1 with identity `id`. Returns the
// structured group plus the relabeling raw index -> structured index.
// Factors are prime-power cyclic, largest order first within each prime.
struct AbGroupIso {
  std::shared_ptr<const FinAbGroup> group;
  std::vector<uint32_t> to_structured;    // size n
  std::vector<uint32_t> from_structured;  // size n
};

AbGroupIso analyze_abelian(uint32_t n, uint32_t id,
                           const std::function<uint32_t(uint32_t, uint32_t)>& mul);

}
