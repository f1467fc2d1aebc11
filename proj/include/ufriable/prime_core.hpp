#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ufriable/bound.hpp"

namespace uf {

// Maximal prime power p^nu <= y for a prime p <= y.
struct PrimePower {
  std::uint64_t p;
  std::uint32_t nu;
  double log_p;
  std::uint64_t max_power;  // p^nu, exact
};

class PrimePowerTable {
 public:
  static constexpr std::uint64_t kDefaultBudget = 100'000'000;

  // Sieve of Eratosthenes up to y; nu_p by repeated exact multiplication.
  static PrimePowerTable build(std::uint64_t y, std::uint64_t budget = kDefaultBudget);

  std::uint64_t y() const { return y_; }
  std::span<const PrimePower> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const PrimePower& operator[](std::size_t i) const { return entries_[i]; }

  // Chebyshev psi(y) = sum nu_p log p.
  double psi() const { return psi_; }

  std::optional<std::size_t> index_of(std::uint64_t p) const;
  // nu_p(y), or 0 when p is not a prime <= y.
  std::uint32_t nu(std::uint64_t p) const;

 private:
  std::uint64_t y_ = 0;
  std::vector<PrimePower> entries_;
  double psi_ = 0.0;
};

class ModulusContext {
 public:
  static ModulusContext make(std::uint64_t q, const PrimePowerTable& table);

  std::uint64_t q() const { return q_; }
  std::span<const std::uint64_t> prime_divisors() const { return prime_divisors_; }
  int omega() const { return static_cast<int>(prime_divisors_.size()); }
  std::uint64_t phi() const { return phi_; }
  // p_{omega(q)} with p_0 = 2.
  std::uint64_t z_q() const { return z_q_; }
  // log z_q / log y for the attached table.
  double theta_q() const { return theta_q_; }
  std::uint64_t y() const { return y_; }
  // P+(q) <= y; required by every coprime counting routine.
  bool largest_prime_within_y() const { return pplus_ok_; }

  bool divisible_by(std::uint64_t p) const;

 private:
  std::uint64_t q_ = 1;
  std::vector<std::uint64_t> prime_divisors_;
  std::uint64_t phi_ = 1;
  std::uint64_t z_q_ = 2;
  double theta_q_ = 0.0;
  std::uint64_t y_ = 0;
  bool pplus_ok_ = true;
};

// Prime factorization of n by trial division, ascending (p, exponent) pairs.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

// The k-th prime, p_1 = 2 (and p_0 := 2 by convention).
std::uint64_t nth_prime(std::uint64_t k);

// psi_q(y) = sum_{p <= y, p !| q} nu_p log p.
double psi_q(const PrimePowerTable& table, const ModulusContext& ctx);

// N_{q,y} = prod_{p <= y, p !| q} p^{nu_p}.
BigInt n_value(const PrimePowerTable& table, const ModulusContext& ctx);

// tau(N_{q,y}) = prod_{p <= y, p !| q} (1 + nu_p). Throws PreconditionError
// when P+(q) > y.
BigInt tau_n(const PrimePowerTable& table, const ModulusContext& ctx);

struct RegimeTag {
  bool small_y = false;  // psi(y) > 2 log x
  bool large_y = false;  // y >= (log x)^{2+epsilon}
  double eta = 0.0;      // psi(y)/log x - 2, meaningful when small_y
  double u = 0.0;        // log x / log y
  double log_x = 0.0;
  double epsilon = 0.1;

  bool out_of_domain() const { return !small_y && !large_y; }
  // "SMALL_Y", "LARGE_Y", "SMALL_Y|LARGE_Y" or "OUT_OF_DOMAIN".
  const char* name() const;
};

RegimeTag classify_regime(double log_x, const PrimePowerTable& table, double epsilon = 0.1);

}  // namespace uf
