#pragma once

#include <cstdint>
#include <random>

namespace eigenform {

// Seeded generator with an explicit bits-to-double mapping. The standard
// distributions are not pinned down by the standard, so reproducibility
// across library implementations requires doing the conversion by hand.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform in {0, ..., n-1}; modulo bias is irrelevant at test scales
  int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace eigenform
