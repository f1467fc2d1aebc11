#include "ufriable/characters.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ufriable/errors.hpp"

namespace uf {

namespace {

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

std::uint64_t primitive_root_mod_prime(std::uint64_t p) {
  if (p == 2) return 1;
  const auto fac = factorize(p - 1);
  for (std::uint64_t g = 2;; ++g) {
    bool ok = true;
    for (auto [r, _] : fac)
      if (pow_mod(g, (p - 1) / r, p) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
}

}  // namespace

class CharacterGroup {
 public:
  explicit CharacterGroup(std::uint64_t q) : q_(q) {
    struct Component {
      std::uint64_t modulus;
      std::vector<std::uint64_t> gens;  // generator residues mod modulus
      std::vector<std::uint32_t> orders;
      // residue mod modulus -> flattened logs, empty when not a unit
      std::vector<std::vector<std::uint32_t>> logs;
    };
    std::vector<Component> comps;
    for (auto [p, e] : factorize(q)) {
      Component c;
      c.modulus = 1;
      for (int i = 0; i < e; ++i) c.modulus *= p;
      c.logs.assign(c.modulus, {});
      if (p == 2) {
        if (e == 1) {
          c.logs[1] = {};
          comps.push_back(std::move(c));
          continue;
        }
        const std::uint64_t m = c.modulus;
        const std::uint32_t ord5 = e >= 3 ? static_cast<std::uint32_t>(m / 4) : 1;
        c.gens = {m - 1};
        c.orders = {2};
        if (e >= 3) {
          c.gens.push_back(5);
          c.orders.push_back(ord5);
        }
        for (std::uint32_t s = 0; s < 2; ++s) {
          std::uint64_t v = s ? m - 1 : 1;
          for (std::uint32_t j = 0; j < ord5; ++j) {
            c.logs[v] = e >= 3 ? std::vector<std::uint32_t>{s, j} : std::vector<std::uint32_t>{s};
            v = v * 5 % m;
          }
        }
      } else {
        std::uint64_t g = primitive_root_mod_prime(p);
        if (e >= 2 && pow_mod(g, p - 1, p * p) == 1) g += p;
        const std::uint64_t m = c.modulus;
        const auto ord = static_cast<std::uint32_t>(m / p * (p - 1));
        c.gens = {g % m};
        c.orders = {ord};
        std::uint64_t v = 1;
        for (std::uint32_t j = 0; j < ord; ++j) {
          c.logs[v] = {j};
          v = v * g % m;
        }
      }
      comps.push_back(std::move(c));
    }
    for (const auto& c : comps)
      for (auto o : c.orders) orders_.push_back(o);
    unit_.assign(q, false);
    logs_.assign(q * orders_.size(), 0);
    for (std::uint64_t n = 0; n < q; ++n) {
      if (std::gcd(n, q) != 1) continue;
      unit_[n] = true;
      std::size_t off = 0;
      for (const auto& c : comps) {
        const auto& l = c.logs[n % c.modulus];
        for (std::size_t i = 0; i < c.orders.size(); ++i) logs_[n * orders_.size() + off + i] = l[i];
        off += c.orders.size();
      }
    }
  }

  std::uint64_t modulus() const { return q_; }
  std::span<const std::uint32_t> orders() const { return orders_; }
  bool is_unit(std::uint64_t n) const { return unit_[n % q_]; }
  std::span<const std::uint32_t> logs(std::uint64_t n) const {
    return std::span<const std::uint32_t>(logs_).subspan((n % q_) * orders_.size(), orders_.size());
  }

 private:
  std::uint64_t q_;
  std::vector<std::uint32_t> orders_;
  std::vector<bool> unit_;
  std::vector<std::uint32_t> logs_;
};

DirichletCharacter::DirichletCharacter(std::shared_ptr<const CharacterGroup> group,
                                       std::vector<std::uint32_t> k)
    : group_(std::move(group)), exponents_(std::move(k)) {
  const auto ords = group_->orders();
  order_ = 1;
  for (std::size_t i = 0; i < ords.size(); ++i) {
    const std::uint64_t oi = ords[i] / std::gcd<std::uint64_t>(exponents_[i], ords[i]);
    order_ = std::lcm(order_, oi);
  }
  scaled_.resize(ords.size());
  for (std::size_t i = 0; i < ords.size(); ++i)
    scaled_[i] = (static_cast<std::uint64_t>(exponents_[i]) * order_ / ords[i]) % order_;
  roots_.resize(order_);
  for (std::uint64_t j = 0; j < order_; ++j) {
    // exact values on the axes, so real characters are exactly +-1
    if (4 * j % order_ == 0) {
      static const std::complex<double> axis[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      roots_[j] = axis[4 * j / order_];
    } else {
      roots_[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) /
                                      static_cast<double>(order_));
    }
  }
}

std::uint64_t DirichletCharacter::modulus() const { return group_->modulus(); }

std::span<const std::uint32_t> DirichletCharacter::generator_orders() const {
  return group_->orders();
}

std::int64_t DirichletCharacter::root_exponent(std::uint64_t n) const {
  if (!group_->is_unit(n)) return -1;
  const auto l = group_->logs(n);
  std::uint64_t e = 0;
  for (std::size_t i = 0; i < l.size(); ++i) e = (e + scaled_[i] * l[i]) % order_;
  return static_cast<std::int64_t>(e);
}

std::complex<double> DirichletCharacter::operator()(std::uint64_t n) const {
  const auto e = root_exponent(n);
  return e < 0 ? std::complex<double>(0.0, 0.0) : roots_[static_cast<std::size_t>(e)];
}

DirichletCharacter DirichletCharacter::conjugate() const {
  std::vector<std::uint32_t> k(exponents_.size());
  const auto ords = group_->orders();
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = (ords[i] - exponents_[i]) % ords[i];
  return DirichletCharacter(group_, std::move(k));
}

std::vector<DirichletCharacter> enumerate_characters(std::uint64_t q) {
  if (q == 0) throw DomainError("modulus q must be positive");
  if (q > kMaxCharacterModulus)
    throw ResourceError("character tables limited to q <= 10^4, got " + std::to_string(q));
  auto group = std::make_shared<const CharacterGroup>(q);
  const auto ords = group->orders();
  std::vector<DirichletCharacter> out;
  std::vector<std::uint32_t> k(ords.size(), 0);
  while (true) {
    out.push_back(DirichletCharacter(group, k));
    // odometer, last generator fastest
    std::size_t i = k.size();
    while (i > 0) {
      --i;
      if (++k[i] < ords[i]) break;
      k[i] = 0;
      if (i == 0) return out;
    }
    if (k.empty()) return out;
  }
}

std::complex<double> character_sum(const ResidueCountVector& counts,
                                   const DirichletCharacter& chi) {
  if (counts.q != chi.modulus())
    throw InvalidArgument("character_sum: residue vector modulus differs from the character's");
  std::complex<double> acc = 0.0;
  for (std::uint64_t a = 0; a < counts.q; ++a) {
    if (counts.counts[a] == 0) continue;
    const auto v = chi(a);
    if (v == 0.0) continue;
    acc += v * counts.counts[a].convert_to<double>();
  }
  return acc;
}

std::complex<double> character_sum(const CountBound& x, const PrimePowerTable& table,
                                   const DirichletCharacter& chi, const CountLimits& limits) {
  return character_sum(count_ultrafriable_residues(x, table, chi.modulus(), limits), chi);
}

double w_q(double tau, double beta, const PrimePowerTable& table, const ModulusContext& ctx,
           const DirichletCharacter& chi) {
  if (!(beta > 0)) throw DomainError("W_q requires beta > 0");
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (ctx.divisible_by(e.p)) continue;
    const double re = (chi(e.p) * std::polar(1.0, -tau * e.log_p)).real();
    acc += (1.0 - re) * (1.0 - re) * std::exp(-beta * e.log_p);
  }
  return acc;
}

double d_sum(double tau, double beta, const PrimePowerTable& table, const DirichletCharacter& chi) {
  if (!(beta > 0)) throw DomainError("D(y, tau; chi) requires beta > 0");
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    const double re = (chi(e.p) * std::polar(1.0, -tau * e.log_p)).real();
    acc += (1.0 - re) * e.log_p * std::exp(-beta * e.log_p);
  }
  return acc;
}

std::complex<double> s_sum(double tau, double beta, const PrimePowerTable& table,
                           const DirichletCharacter& chi) {
  if (!(beta > 0)) throw DomainError("S(y, tau; chi) requires beta > 0");
  std::complex<double> acc = 0.0;
  const std::uint64_t q = chi.modulus();
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    std::uint64_t pk_mod = 1 % q;
    for (std::uint32_t k = 1; k <= e.nu; ++k) {
      pk_mod = pk_mod * (e.p % q) % q;
      const double lk = k * e.log_p;
      acc += chi(pk_mod) * e.log_p * std::exp(-beta * lk) * std::polar(1.0, -tau * lk);
    }
  }
  return acc;
}

std::complex<double> reconstruct_progression(const ResidueCountVector& counts,
                                             std::span<const DirichletCharacter> characters,
                                             std::uint64_t a) {
  const std::uint64_t q = counts.q;
  if (std::gcd(a % q, q) != 1)
    throw DomainError("orthogonality reconstruction requires (a, q) = 1");
  std::complex<double> acc = 0.0;
  for (const auto& chi : characters) acc += std::conj(chi(a)) * character_sum(counts, chi);
  return acc / static_cast<double>(characters.size());
}

std::complex<double> reconstruct_progression(const CountBound& x, const PrimePowerTable& table,
                                             std::uint64_t a, std::uint64_t q,
                                             const CountLimits& limits) {
  if (q == 0) throw DomainError("modulus q must be positive");
  if (std::gcd(a % q, q) != 1)
    throw DomainError("orthogonality reconstruction requires (a, q) = 1");
  const auto chars = enumerate_characters(q);
  return reconstruct_progression(count_ultrafriable_residues(x, table, q, limits), chars, a);
}

}  // namespace uf
