#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ufriable/bound.hpp"
#include "ufriable/exact_counts.hpp"
#include "ufriable/prime_core.hpp"

namespace uf {

// Generators and discrete-log tables of (Z/qZ)^*, shared by all characters
// of one modulus.
class CharacterGroup;

// A Dirichlet character mod q, fixed by its exponent k_i on each generator
// g_i of (Z/qZ)^* (CRT over the prime-power components; 2^e with e >= 3
// contributes the two generators -1 and 5): chi(g_i) = exp(2 pi i k_i / ord_i).
class DirichletCharacter {
 public:
  std::uint64_t modulus() const;
  std::span<const std::uint32_t> exponents() const { return exponents_; }
  std::span<const std::uint32_t> generator_orders() const;
  std::uint64_t order() const { return order_; }
  bool is_principal() const { return order_ == 1; }
  bool is_real() const { return order_ <= 2; }

  // chi(n) = exp(2 pi i e / order) with e = root_exponent(n), or -1 when
  // gcd(n, q) > 1.
  std::int64_t root_exponent(std::uint64_t n) const;
  std::complex<double> operator()(std::uint64_t n) const;
  DirichletCharacter conjugate() const;

 private:
  friend std::vector<DirichletCharacter> enumerate_characters(std::uint64_t q);
  DirichletCharacter(std::shared_ptr<const CharacterGroup> group, std::vector<std::uint32_t> k);

  std::shared_ptr<const CharacterGroup> group_;
  std::vector<std::uint32_t> exponents_;
  std::uint64_t order_ = 1;
  // exponent of chi(g_i) expressed in units of 2 pi / order
  std::vector<std::uint64_t> scaled_;
  std::vector<std::complex<double>> roots_;
};

constexpr std::uint64_t kMaxCharacterModulus = 10'000;

// All phi(q) characters mod q, exponent vectors in lexicographic order; the
// principal character comes first.
std::vector<DirichletCharacter> enumerate_characters(std::uint64_t q);

// Upsilon(x, y; chi) = sum_{n in U(x, y)} chi(n).
std::complex<double> character_sum(const CountBound& x, const PrimePowerTable& table,
                                   const DirichletCharacter& chi, const CountLimits& limits = {});
// Same, from an already computed residue vector mod chi.modulus().
std::complex<double> character_sum(const ResidueCountVector& counts, const DirichletCharacter& chi);

// W_q(y, tau; chi) = sum_{p <= y, p !| q} {1 - Re(chi(p) p^{-i tau})}^2 / p^beta.
double w_q(double tau, double beta, const PrimePowerTable& table, const ModulusContext& ctx,
           const DirichletCharacter& chi);

// D(y, tau; chi) = sum_{p <= y} {1 - Re(chi(p) p^{-i tau})} log p / p^beta.
double d_sum(double tau, double beta, const PrimePowerTable& table, const DirichletCharacter& chi);

// S(y, tau; chi) = sum_{n <= y} chi(n) Lambda(n) / n^{beta + i tau}.
std::complex<double> s_sum(double tau, double beta, const PrimePowerTable& table,
                           const DirichletCharacter& chi);

// (1/phi(q)) sum_chi conj(chi(a)) Upsilon(x, y; chi), which equals
// Upsilon(x, y; a, q) for (a, q) = 1.
std::complex<double> reconstruct_progression(const CountBound& x, const PrimePowerTable& table,
                                             std::uint64_t a, std::uint64_t q,
                                             const CountLimits& limits = {});
std::complex<double> reconstruct_progression(const ResidueCountVector& counts,
                                             std::span<const DirichletCharacter> characters,
                                             std::uint64_t a);

}  // namespace uf
