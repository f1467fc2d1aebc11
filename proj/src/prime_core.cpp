#include "ufriable/prime_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ufriable/errors.hpp"

namespace uf {

PrimePowerTable PrimePowerTable::build(std::uint64_t y, std::uint64_t budget) {
  if (y < 2) throw DomainError("prime table needs y >= 2, got " + std::to_string(y));
  if (y > budget)
    throw ResourceError("y = " + std::to_string(y) + " exceeds the sieve budget " +
                        std::to_string(budget));

  std::vector<bool> composite(y + 1, false);
  for (std::uint64_t i = 2; i * i <= y; ++i) {
    if (composite[i]) continue;
    for (std::uint64_t j = i * i; j <= y; j += i) composite[j] = true;
  }

  PrimePowerTable t;
  t.y_ = y;
  for (std::uint64_t p = 2; p <= y; ++p) {
    if (composite[p]) continue;
    std::uint32_t nu = 1;
    std::uint64_t pw = p;
    // pw <= y / p  <=>  pw * p <= y, without overflow
    while (pw <= y / p) {
      pw *= p;
      ++nu;
    }
    const double lp = std::log(static_cast<double>(p));
    t.entries_.push_back({p, nu, lp, pw});
  }
  // Sum small terms first for a stable total.
  double acc = 0.0;
  for (auto it = t.entries_.rbegin(); it != t.entries_.rend(); ++it) acc += it->nu * it->log_p;
  t.psi_ = acc;
  return t;
}

std::optional<std::size_t> PrimePowerTable::index_of(std::uint64_t p) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                             [](const PrimePower& e, std::uint64_t v) { return e.p < v; });
  if (it == entries_.end() || it->p != p) return std::nullopt;
  return static_cast<std::size_t>(it - entries_.begin());
}

std::uint32_t PrimePowerTable::nu(std::uint64_t p) const {
  auto i = index_of(p);
  return i ? entries_[*i].nu : 0;
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::uint64_t nth_prime(std::uint64_t k) {
  if (k == 0) return 2;
  std::uint64_t count = 0;
  for (std::uint64_t n = 2;; ++n) {
    bool prime = true;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
      if (n % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && ++count == k) return n;
  }
}

ModulusContext ModulusContext::make(std::uint64_t q, const PrimePowerTable& table) {
  if (q == 0) throw DomainError("modulus q must be positive");
  ModulusContext c;
  c.q_ = q;
  c.y_ = table.y();

  std::uint64_t rest = q;
  for (const auto& e : table.entries()) {
    if (rest == 1) break;
    if (rest % e.p) continue;
    c.prime_divisors_.push_back(e.p);
    while (rest % e.p == 0) rest /= e.p;
  }
  c.pplus_ok_ = rest == 1;
  if (rest > 1) {
    for (auto [p, _] : factorize(rest)) c.prime_divisors_.push_back(p);
  }

  std::uint64_t phi = q;
  for (auto p : c.prime_divisors_) phi = phi / p * (p - 1);
  c.phi_ = phi;

  const auto& pd = c.prime_divisors_;
  c.z_q_ = pd.size() <= table.size() && !pd.empty() ? table[pd.size() - 1].p
                                                    : nth_prime(pd.size());
  c.theta_q_ = std::log(static_cast<double>(c.z_q_)) / std::log(static_cast<double>(c.y_));
  return c;
}

bool ModulusContext::divisible_by(std::uint64_t p) const {
  return std::binary_search(prime_divisors_.begin(), prime_divisors_.end(), p);
}

double psi_q(const PrimePowerTable& table, const ModulusContext& ctx) {
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (!ctx.divisible_by(e.p)) acc += e.nu * e.log_p;
  }
  return acc;
}

BigInt n_value(const PrimePowerTable& table, const ModulusContext& ctx) {
  BigInt n = 1;
  for (const auto& e : table.entries())
    if (!ctx.divisible_by(e.p)) n *= e.max_power;
  return n;
}

BigInt tau_n(const PrimePowerTable& table, const ModulusContext& ctx) {
  if (!ctx.largest_prime_within_y())
    throw PreconditionError("tau(N_{q,y}) requires P+(q) <= y (q = " + std::to_string(ctx.q()) +
                            ", y = " + std::to_string(table.y()) + ")");
  BigInt t = 1;
  for (const auto& e : table.entries())
    if (!ctx.divisible_by(e.p)) t *= (e.nu + 1);
  return t;
}

const char* RegimeTag::name() const {
  if (small_y && large_y) return "SMALL_Y|LARGE_Y";
  if (small_y) return "SMALL_Y";
  if (large_y) return "LARGE_Y";
  return "OUT_OF_DOMAIN";
}

RegimeTag classify_regime(double log_x, const PrimePowerTable& table, double epsilon) {
  if (!(log_x >= std::log(2.0) - 1e-15)) throw DomainError("regime classification needs x >= 2");
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  RegimeTag tag;
  tag.log_x = log_x;
  tag.epsilon = epsilon;
  const double log_y = std::log(static_cast<double>(table.y()));
  tag.u = log_x / log_y;
  tag.small_y = table.psi() > 2.0 * log_x;
  tag.eta = table.psi() / log_x - 2.0;
  tag.large_y = log_y >= (2.0 + epsilon) * std::log(log_x);
  return tag;
}

}  // namespace uf
