#pragma once

// Independent reference implementations used by the unit and acceptance
// suites. Nothing here calls into the library: primes, prime powers and
// counts are recomputed from scratch by the most direct method available.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace uf_test {

using u64 = std::uint64_t;
__extension__ typedef unsigned __int128 u128;

inline std::vector<u64> primes_upto(u64 n) {
  std::vector<u64> out;
  for (u64 p = 2; p <= n; ++p) {
    bool prime = true;
    for (u64 d = 2; d * d <= p; ++d)
      if (p % d == 0) {
        prime = false;
        break;
      }
    if (prime) out.push_back(p);
  }
  return out;
}

// Largest exponent k with p^k <= y.
inline unsigned max_exponent(u64 p, u64 y) {
  unsigned k = 0;
  u128 pk = 1;
  while (pk * p <= y) {
    pk *= p;
    ++k;
  }
  return k;
}

inline double chebyshev_psi(u64 y) {
  long double s = 0;
  for (u64 p : primes_upto(y)) s += max_exponent(p, y) * std::log(static_cast<long double>(p));
  return static_cast<double>(s);
}

inline u64 euler_phi(u64 q) {
  u64 r = 0;
  for (u64 a = 1; a <= q; ++a)
    if (std::gcd(a, q) == 1) ++r;
  return r;
}

inline u64 largest_prime_factor(u64 q) {
  u64 best = 1;
  for (u64 p = 2; p * p <= q; ++p)
    while (q % p == 0) {
      best = p;
      q /= p;
    }
  return q > 1 ? std::max(best, q) : best;
}

// For every n <= limit: its largest prime factor and its largest prime-power
// component p^k || n. n is y-friable iff P+(n) <= y and y-ultrafriable iff
// the largest component is <= y.
class FactorTable {
 public:
  explicit FactorTable(u64 limit) : pplus_(limit + 1, 1), maxpp_(limit + 1, 1) {
    for (u64 n = 2; n <= limit; ++n) {
      u64 m = n;
      for (u64 p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        u64 pk = 1;
        while (m % p == 0) {
          m /= p;
          pk *= p;
        }
        pplus_[n] = static_cast<std::uint32_t>(p);
        maxpp_[n] = std::max<std::uint32_t>(maxpp_[n], static_cast<std::uint32_t>(pk));
      }
      if (m > 1) {
        pplus_[n] = static_cast<std::uint32_t>(m);
        maxpp_[n] = std::max<std::uint32_t>(maxpp_[n], static_cast<std::uint32_t>(m));
      }
    }
  }

  u64 limit() const { return pplus_.size() - 1; }
  bool friable(u64 n, u64 y) const { return pplus_[n] <= y; }
  bool ultrafriable(u64 n, u64 y) const { return maxpp_[n] <= y; }

  // counts[a] for n <= x, n = a (mod q).
  std::vector<u64> residues(u64 x, u64 y, u64 q, bool ultra) const {
    std::vector<u64> c(q, 0);
    for (u64 n = 1; n <= x; ++n)
      if (ultra ? ultrafriable(n, y) : friable(n, y)) ++c[n % q];
    return c;
  }

  u64 coprime(u64 x, u64 y, u64 q, bool ultra) const {
    const auto c = residues(x, y, q, ultra);
    u64 s = 0;
    for (u64 a = 0; a < q; ++a)
      if (std::gcd(a, q) == 1) s += c[a];
    return s;
  }

 private:
  std::vector<std::uint32_t> pplus_;
  std::vector<std::uint32_t> maxpp_;
};

// Sorted divisors of N_{q,y} = prod_{p <= y, p !| q} p^{nu_p}. Only for y
// small enough that N fits in 128 bits.
inline std::vector<u128> divisors_of_n(u64 y, u64 q) {
  std::vector<u128> ds{1};
  for (u64 p : primes_upto(y)) {
    if (q % p == 0) continue;
    const unsigned nu = max_exponent(p, y);
    const std::size_t base = ds.size();
    u128 pk = 1;
    for (unsigned k = 1; k <= nu; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline u64 count_at_most(const std::vector<u128>& sorted, u128 x) {
  return static_cast<u64>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

// Fixed-seed input generators for the property tests.
class Gen {
 public:
  explicit Gen(u64 seed) : rng_(seed) {}

  u64 uniform(u64 lo, u64 hi) { return std::uniform_int_distribution<u64>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  // Roughly log-uniform integer in [lo, hi].
  u64 log_uniform(u64 lo, u64 hi) {
    const double v = std::exp(real(std::log(static_cast<double>(lo)),
                                   std::log(static_cast<double>(hi) + 1.0)));
    return std::clamp<u64>(static_cast<u64>(v), lo, hi);
  }
  // A modulus q <= q_max with every prime factor <= y.
  u64 modulus(u64 q_max, u64 y) {
    for (;;) {
      const u64 q = uniform(1, q_max);
      if (largest_prime_factor(q) <= y) return q;
    }
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace uf_test
