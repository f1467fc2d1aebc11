#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ufriable/bound.hpp"
#include "ufriable/prime_core.hpp"

namespace uf {

struct CountValue {
  BigInt value{0};
  bool exact = true;
};

// counts[a] for a in [0, q).
struct ResidueCountVector {
  std::uint64_t q = 1;
  std::vector<BigInt> counts;

  BigInt total() const;
  // Sum over residues coprime to q.
  BigInt coprime_total() const;
};

struct CountLimits {
  std::uint64_t max_residue_modulus = 10'000;
  std::uint64_t max_friable_x = 1'000'000'000;
  // Worker threads for the top-level branches of the divisor recursion.
  unsigned jobs = 1;
};

// Number of divisors of N_{q,y} not exceeding x, i.e. Upsilon_q(x, y).
// Applies the divisor symmetry d <-> N/d when x >= sqrt(N_{q,y}).
CountValue count_ultrafriable(const CountBound& x, const PrimePowerTable& table,
                              const ModulusContext& ctx, const CountLimits& limits = {});

// Same count through the pruned recursion only, without the reflection
// step. Exposed so the symmetry identity can be checked against it.
CountValue count_ultrafriable_direct(const BigInt& x_floor, const PrimePowerTable& table,
                                     const ModulusContext& ctx, const CountLimits& limits = {});

// Upsilon(x, y; a, q) for every residue a mod q (no coprimality filter).
ResidueCountVector count_ultrafriable_residues(const CountBound& x, const PrimePowerTable& table,
                                               std::uint64_t q, const CountLimits& limits = {});

// Psi_q(x, y): y-friable n <= x with (n, q) = 1.
CountValue count_friable(const CountBound& x, std::uint64_t y, std::uint64_t q,
                         const CountLimits& limits = {});

// Psi(x, y; a, q) for every residue a mod q.
ResidueCountVector count_friable_residues(const CountBound& x, std::uint64_t y, std::uint64_t q,
                                          const CountLimits& limits = {});

// Psi(x, y; a, q).
CountValue count_friable_progression(const CountBound& x, std::uint64_t y, std::uint64_t a,
                                     std::uint64_t q, const CountLimits& limits = {});

enum class CountMode { Friable, Ultrafriable };

// Definitional brute force over n = 1..x, factoring each n with its own
// smallest-prime-factor sieve. Test oracle; x <= 10^7.
class NaiveOracle {
 public:
  static constexpr std::uint64_t kMaxX = 10'000'000;

  explicit NaiveOracle(std::uint64_t x_max);

  std::uint64_t x_max() const { return x_max_; }

  // With q and a: n = a (mod q). With q only: (n, q) = 1. Neither: all n.
  std::uint64_t count(std::uint64_t x, std::uint64_t y, CountMode mode,
                      std::optional<std::uint64_t> q = std::nullopt,
                      std::optional<std::uint64_t> a = std::nullopt) const;

  // Unfiltered counts by residue mod q, in one pass.
  std::vector<std::uint64_t> residue_counts(std::uint64_t x, std::uint64_t y, CountMode mode,
                                            std::uint64_t q) const;

 private:
  bool accepts(std::uint64_t n, std::uint64_t y, CountMode mode) const;

  std::uint64_t x_max_;
  std::vector<std::uint32_t> spf_;
};

CountValue naive_oracle(std::uint64_t x, std::uint64_t y, CountMode mode,
                        std::optional<std::uint64_t> q = std::nullopt,
                        std::optional<std::uint64_t> a = std::nullopt);

}  // namespace uf
