#include "ufriable/exact_counts.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "ufriable/errors.hpp"

namespace uf {

namespace {

__extension__ typedef unsigned __int128 U128;

// Bounds below this go through the 128-bit instantiation.
const U128 kU128Cap = (U128(1) << 126);

BigInt to_big(U128 v) {
  BigInt b = static_cast<std::uint64_t>(v >> 64);
  b <<= 64;
  b |= static_cast<std::uint64_t>(v);
  return b;
}

U128 to_u128(const BigInt& b) {
  const auto lo = static_cast<std::uint64_t>(b & std::numeric_limits<std::uint64_t>::max());
  const auto hi = static_cast<std::uint64_t>(b >> 64);
  return (U128(hi) << 64) | lo;
}

template <class Int>
Int sat_mul(const Int& a, const Int& b, const Int& cap) {
  if (a == 0 || b == 0) return Int(0);
  if (a > cap / b) return cap;
  Int r = a * b;
  return r > cap ? cap : r;
}

// Divisor counting over the primes of N_{q,y}, visited in descending order.
// count(i, r) = #{d | prod_{j >= i} p_j^{nu_j} : d <= r}.
template <class Int>
class DivisorRecursion {
 public:
  DivisorRecursion(std::vector<PrimePower> primes_desc, const Int& cap, std::uint64_t q)
      : primes_(std::move(primes_desc)), cap_(cap), q_(q) {
    const std::size_t n = primes_.size();
    suffix_prod_.assign(n + 1, Int(1));
    suffix_tau_.assign(n + 1, Int(1));
    for (std::size_t i = n; i-- > 0;) {
      suffix_prod_[i] = sat_mul(suffix_prod_[i + 1], Int(primes_[i].max_power), cap_);
      suffix_tau_[i] = sat_mul(suffix_tau_[i + 1], Int(primes_[i].nu + 1), cap_);
    }
    build_residue_suffixes();
  }

  std::size_t size() const { return primes_.size(); }

  Int count(std::size_t i, const Int& r) const {
    i = first_at_most(r, i);
    const std::size_t n = primes_.size();
    if (i == n) return Int(1);
    if (suffix_prod_[i] <= r) return suffix_tau_[i];
    Int total = 1;
    for (std::size_t j = i; j < n; ++j) {
      const Int p(primes_[j].p);
      Int rj = r / p;
      for (std::uint32_t e = 1; e <= primes_[j].nu && rj != 0; ++e) {
        total += count(j + 1, rj);
        rj /= p;
      }
    }
    return total;
  }

  // Adds, for every divisor d of the suffix starting at i with d <= r, one
  // to out[(c * d) mod q].
  void count_residues(std::size_t i, const Int& r, std::uint64_t c, std::vector<Int>& out) const {
    i = first_at_most(r, i);
    const std::size_t n = primes_.size();
    if (i == n) {
      out[c] += 1;
      return;
    }
    if (suffix_prod_[i] <= r) {
      const auto& vec = residue_suffix_[i - residue_first_];
      for (std::uint64_t s = 0; s < q_; ++s)
        if (vec[s] != 0) out[(c * s) % q_] += vec[s];
      return;
    }
    out[c] += 1;
    for (std::size_t j = i; j < n; ++j) {
      const Int p(primes_[j].p);
      const std::uint64_t pm = primes_[j].p % q_;
      Int rj = r / p;
      std::uint64_t cj = c;
      for (std::uint32_t e = 1; e <= primes_[j].nu && rj != 0; ++e) {
        cj = (cj * pm) % q_;
        count_residues(j + 1, rj, cj, out);
        rj /= p;
      }
    }
  }

  // Root-level fan-out: the branches of count(0, r) as independent tasks.
  struct Branch {
    std::size_t next;
    Int bound;
    std::uint64_t residue;
  };

  std::vector<Branch> root_branches(const Int& r, std::uint64_t c) const {
    std::vector<Branch> out;
    const std::size_t i = first_at_most(r, 0);
    for (std::size_t j = i; j < primes_.size(); ++j) {
      const Int p(primes_[j].p);
      const std::uint64_t pm = q_ > 1 ? primes_[j].p % q_ : 0;
      Int rj = r / p;
      std::uint64_t cj = c;
      for (std::uint32_t e = 1; e <= primes_[j].nu && rj != 0; ++e) {
        cj = q_ > 1 ? (cj * pm) % q_ : 0;
        out.push_back({j + 1, rj, cj});
        rj /= p;
      }
    }
    return out;
  }

  bool shortcut_at_root(const Int& r) const {
    const std::size_t i = first_at_most(r, 0);
    return i == primes_.size() || suffix_prod_[i] <= r;
  }

 private:
  // First index >= from whose prime is <= r.
  std::size_t first_at_most(const Int& r, std::size_t from) const {
    auto it = std::partition_point(primes_.begin() + from, primes_.end(),
                                   [&](const PrimePower& e) { return Int(e.p) > r; });
    return static_cast<std::size_t>(it - primes_.begin());
  }

  void build_residue_suffixes() {
    const std::size_t n = primes_.size();
    residue_first_ = n;
    while (residue_first_ > 0 && suffix_prod_[residue_first_ - 1] < cap_) --residue_first_;
    residue_suffix_.assign(n + 1 - residue_first_, std::vector<Int>(q_, Int(0)));
    residue_suffix_.back()[1 % q_] = 1;
    for (std::size_t i = n; i-- > residue_first_;) {
      const auto& next = residue_suffix_[i + 1 - residue_first_];
      auto& cur = residue_suffix_[i - residue_first_];
      std::uint64_t pw = 1;
      const std::uint64_t pm = primes_[i].p % q_;
      for (std::uint32_t e = 0; e <= primes_[i].nu; ++e) {
        for (std::uint64_t s = 0; s < q_; ++s)
          if (next[s] != 0) cur[(s * pw) % q_] += next[s];
        pw = (pw * pm) % q_;
      }
    }
  }

  std::vector<PrimePower> primes_;
  Int cap_;
  std::uint64_t q_;
  std::vector<Int> suffix_prod_;
  std::vector<Int> suffix_tau_;
  std::size_t residue_first_ = 0;
  std::vector<std::vector<Int>> residue_suffix_;
};

std::vector<PrimePower> descending_primes(const PrimePowerTable& table,
                                          const ModulusContext* exclude) {
  std::vector<PrimePower> out;
  out.reserve(table.size());
  for (std::size_t i = table.size(); i-- > 0;) {
    if (exclude && exclude->divisible_by(table[i].p)) continue;
    out.push_back(table[i]);
  }
  return out;
}

// Runs `work(task_index)` for every index in [0, n) on up to `jobs` threads.
template <class Work>
void run_parallel(std::size_t n, unsigned jobs, Work&& work) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) work(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < n;) work(k);
    });
  }
  for (auto& t : pool) t.join();
}

template <class Int>
Int count_divisors_at_most(const std::vector<PrimePower>& primes, const Int& bound, const Int& cap,
                           unsigned jobs) {
  if (bound == 0) return Int(0);
  DivisorRecursion<Int> rec(primes, cap, 1);
  if (jobs <= 1 || rec.shortcut_at_root(bound)) return rec.count(0, bound);
  auto branches = rec.root_branches(bound, 0);
  std::vector<Int> partial(branches.size(), Int(0));
  run_parallel(branches.size(), jobs,
               [&](std::size_t k) { partial[k] = rec.count(branches[k].next, branches[k].bound); });
  Int total = 1;
  for (const auto& v : partial) total += v;
  return total;
}

template <class Int>
std::vector<BigInt> residue_counts_at_most(const std::vector<PrimePower>& primes,
                                           const Int& bound, const Int& cap, std::uint64_t q,
                                           unsigned jobs) {
  std::vector<BigInt> result(q, BigInt(0));
  if (bound == 0) return result;
  DivisorRecursion<Int> rec(primes, cap, q);
  std::vector<Int> acc(q, Int(0));
  if (jobs <= 1 || rec.shortcut_at_root(bound)) {
    rec.count_residues(0, bound, 1 % q, acc);
  } else {
    auto branches = rec.root_branches(bound, 1 % q);
    std::vector<std::vector<Int>> partial(branches.size(), std::vector<Int>(q, Int(0)));
    run_parallel(branches.size(), jobs, [&](std::size_t k) {
      rec.count_residues(branches[k].next, branches[k].bound, branches[k].residue, partial[k]);
    });
    acc[1 % q] += 1;
    for (const auto& part : partial)
      for (std::uint64_t s = 0; s < q; ++s) acc[s] += part[s];
  }
  for (std::uint64_t s = 0; s < q; ++s) {
    if constexpr (std::is_same_v<Int, U128>)
      result[s] = to_big(acc[s]);
    else
      result[s] = acc[s];
  }
  return result;
}

BigInt divisors_at_most(const std::vector<PrimePower>& primes, const BigInt& bound, unsigned jobs) {
  if (bound < to_big(kU128Cap))
    return to_big(count_divisors_at_most<U128>(primes, to_u128(bound), kU128Cap, jobs));
  return count_divisors_at_most<BigInt>(primes, bound, bound + 1, jobs);
}

void require_pplus(const ModulusContext& ctx, const char* what) {
  if (!ctx.largest_prime_within_y())
    throw PreconditionError(std::string(what) + " requires P+(q) <= y (q = " +
                            std::to_string(ctx.q()) + ", y = " + std::to_string(ctx.y()) + ")");
}

void require_residue_modulus(std::uint64_t q, const CountLimits& limits) {
  if (q == 0) throw DomainError("modulus q must be positive");
  if (q > limits.max_residue_modulus)
    throw ResourceError("modulus q = " + std::to_string(q) + " exceeds the residue bound " +
                        std::to_string(limits.max_residue_modulus));
}

// floor(X / m) for all m >= 1, ascending, with O(1) lookup.
class FloorValues {
 public:
  explicit FloorValues(std::uint64_t x) : x_(x) {
    s_ = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
    while (s_ * s_ > x) --s_;
    while ((s_ + 1) * (s_ + 1) <= x) ++s_;
    for (std::uint64_t v = 1; v <= s_; ++v) vals_.push_back(v);
    large_ = (s_ > 0 && x / s_ > s_) ? s_ : (s_ > 0 ? s_ - 1 : 0);
    for (std::uint64_t k = large_; k >= 1; --k) vals_.push_back(x / k);
  }
  std::size_t size() const { return vals_.size(); }
  std::uint64_t operator[](std::size_t i) const { return vals_[i]; }
  std::size_t index(std::uint64_t v) const {
    return v <= s_ ? static_cast<std::size_t>(v - 1)
                   : static_cast<std::size_t>(s_ + large_ - x_ / v);
  }
  std::size_t first_at_least(std::uint64_t v) const {
    return static_cast<std::size_t>(std::lower_bound(vals_.begin(), vals_.end(), v) - vals_.begin());
  }

 private:
  std::uint64_t x_, s_ = 0, large_ = 0;
  std::vector<std::uint64_t> vals_;
};

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n < 2) return out;
  const auto table = PrimePowerTable::build(n);
  for (const auto& e : table.entries()) out.push_back(e.p);
  return out;
}

std::uint64_t friable_floor(const CountBound& x, const CountLimits& limits) {
  if (x.floor() > limits.max_friable_x)
    throw ResourceError("x = " + x.text() + " exceeds the exact friable bound " +
                        std::to_string(limits.max_friable_x));
  return static_cast<std::uint64_t>(x.floor());
}

// Friable counts by residue class mod q, by the recursion
// Psi(v, p_k) = Psi(v, p_{k-1}) + Psi(v / p_k, p_k) over all v = floor(X / m),
// in place and ascending in v. Primes dividing `skip` are left out.
std::vector<std::uint64_t> friable_dp(std::uint64_t x, std::uint64_t y, std::uint64_t q,
                                      std::uint64_t skip) {
  std::vector<std::uint64_t> result(q, 0);
  if (x == 0) return result;
  FloorValues vals(x);
  const std::size_t n = vals.size();
  std::vector<std::uint64_t> s(n * q, 0);
  const std::uint64_t one = 1 % q;
  for (std::size_t i = 0; i < n; ++i) s[i * q + one] = 1;
  for (std::uint64_t p : primes_up_to(std::min(x, y))) {
    if (skip % p == 0) continue;
    const std::uint64_t pm = p % q;
    for (std::size_t i = vals.first_at_least(p); i < n; ++i) {
      const std::size_t src = vals.index(vals[i] / p) * q;
      const std::size_t dst = i * q;
      if (q == 1) {
        s[dst] += s[src];
      } else {
        for (std::uint64_t r = 0; r < q; ++r) s[dst + (r * pm) % q] += s[src + r];
      }
    }
  }
  const std::size_t top = (n - 1) * q;
  for (std::uint64_t r = 0; r < q; ++r) result[r] = s[top + r];
  return result;
}

}  // namespace

BigInt ResidueCountVector::total() const {
  BigInt t = 0;
  for (const auto& c : counts) t += c;
  return t;
}

BigInt ResidueCountVector::coprime_total() const {
  BigInt t = 0;
  for (std::uint64_t a = 0; a < q; ++a)
    if (std::gcd(a, q) == 1) t += counts[a];
  return t;
}

CountValue count_ultrafriable_direct(const BigInt& x_floor, const PrimePowerTable& table,
                                     const ModulusContext& ctx, const CountLimits& limits) {
  require_pplus(ctx, "count_ultrafriable");
  if (x_floor < 0) throw DomainError("x must be nonnegative");
  return {divisors_at_most(descending_primes(table, &ctx), x_floor, limits.jobs), true};
}

CountValue count_ultrafriable(const CountBound& x, const PrimePowerTable& table,
                              const ModulusContext& ctx, const CountLimits& limits) {
  require_pplus(ctx, "count_ultrafriable");
  const BigInt& xf = x.floor();
  if (xf == 0) return {0, true};
  const BigInt n = n_value(table, ctx);
  const BigInt tau = tau_n(table, ctx);
  if (xf >= n) return {tau, true};
  const auto primes = descending_primes(table, &ctx);
  if (xf * xf >= n) {
    // Divisors d > x are the N/d with N/d < N/x, i.e. N/d <= (N - 1) / floor(x).
    const BigInt reflected = (n - 1) / xf;
    return {tau - divisors_at_most(primes, reflected, limits.jobs), true};
  }
  return {divisors_at_most(primes, xf, limits.jobs), true};
}

ResidueCountVector count_ultrafriable_residues(const CountBound& x, const PrimePowerTable& table,
                                               std::uint64_t q, const CountLimits& limits) {
  require_residue_modulus(q, limits);
  ResidueCountVector out;
  out.q = q;
  const auto primes = descending_primes(table, nullptr);
  const BigInt& xf = x.floor();
  if (xf < to_big(kU128Cap))
    out.counts = residue_counts_at_most<U128>(primes, to_u128(xf), kU128Cap, q, limits.jobs);
  else
    out.counts = residue_counts_at_most<BigInt>(primes, xf, xf + 1, q, limits.jobs);
  return out;
}

CountValue count_friable(const CountBound& x, std::uint64_t y, std::uint64_t q,
                         const CountLimits& limits) {
  if (q == 0) throw DomainError("modulus q must be positive");
  if (y < 1) throw DomainError("y must be positive");
  if (q > 1) {
    for (auto [p, _] : factorize(q))
      if (p > y) throw PreconditionError("count_friable requires P+(q) <= y or q = 1");
  }
  const std::uint64_t xf = friable_floor(x, limits);
  return {friable_dp(xf, y, 1, q)[0], true};
}

ResidueCountVector count_friable_residues(const CountBound& x, std::uint64_t y, std::uint64_t q,
                                          const CountLimits& limits) {
  require_residue_modulus(q, limits);
  if (y < 1) throw DomainError("y must be positive");
  const std::uint64_t xf = friable_floor(x, limits);
  ResidueCountVector out;
  out.q = q;
  for (auto c : friable_dp(xf, y, q, 1)) out.counts.emplace_back(c);
  return out;
}

CountValue count_friable_progression(const CountBound& x, std::uint64_t y, std::uint64_t a,
                                     std::uint64_t q, const CountLimits& limits) {
  auto v = count_friable_residues(x, y, q, limits);
  return {v.counts[a % q], true};
}

NaiveOracle::NaiveOracle(std::uint64_t x_max) : x_max_(x_max) {
  if (x_max > kMaxX)
    throw ResourceError("naive oracle limited to x <= 10^7, got " + std::to_string(x_max));
  spf_.assign(x_max + 1, 0);
  for (std::uint64_t i = 2; i <= x_max; ++i) {
    if (spf_[i]) continue;
    for (std::uint64_t j = i; j <= x_max; j += i)
      if (!spf_[j]) spf_[j] = static_cast<std::uint32_t>(i);
  }
}

bool NaiveOracle::accepts(std::uint64_t n, std::uint64_t y, CountMode mode) const {
  while (n > 1) {
    const std::uint64_t p = spf_[n];
    std::uint64_t pk = 1;
    while (n % p == 0) {
      n /= p;
      pk *= p;
    }
    // friable: no prime above y; ultrafriable: no prime power above y
    if (mode == CountMode::Friable ? p > y : pk > y) return false;
  }
  return true;
}

std::uint64_t NaiveOracle::count(std::uint64_t x, std::uint64_t y, CountMode mode,
                                 std::optional<std::uint64_t> q,
                                 std::optional<std::uint64_t> a) const {
  if (x > x_max_) throw ResourceError("naive oracle: x above the sieve limit");
  if (q && *q == 0) throw DomainError("modulus q must be positive");
  std::uint64_t total = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (q) {
      if (a ? n % *q != *a % *q : std::gcd(n, *q) != 1) continue;
    }
    if (accepts(n, y, mode)) ++total;
  }
  return total;
}

std::vector<std::uint64_t> NaiveOracle::residue_counts(std::uint64_t x, std::uint64_t y,
                                                       CountMode mode, std::uint64_t q) const {
  if (x > x_max_) throw ResourceError("naive oracle: x above the sieve limit");
  if (q == 0) throw DomainError("modulus q must be positive");
  std::vector<std::uint64_t> out(q, 0);
  for (std::uint64_t n = 1; n <= x; ++n)
    if (accepts(n, y, mode)) ++out[n % q];
  return out;
}

CountValue naive_oracle(std::uint64_t x, std::uint64_t y, CountMode mode,
                        std::optional<std::uint64_t> q, std::optional<std::uint64_t> a) {
  NaiveOracle oracle(x);
  return {oracle.count(x, y, mode, q, a), true};
}

}  // namespace uf
