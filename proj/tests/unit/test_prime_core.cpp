#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "ufriable/errors.hpp"
#include "ufriable/prime_core.hpp"

using namespace uf;

TEST_CASE("prime power table for y = 10") {
  const auto t = PrimePowerTable::build(10);
  REQUIRE(t.size() == 4);
  const std::uint64_t ps[] = {2, 3, 5, 7};
  const std::uint32_t nus[] = {3, 2, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(t[i].p == ps[i]);
    CHECK(t[i].nu == nus[i]);
  }
  CHECK(t.nu(2) == 3);
  CHECK(t.nu(4) == 0);
  CHECK(t.nu(11) == 0);
  CHECK(t.index_of(5).value() == 2);
  CHECK_FALSE(t.index_of(9).has_value());
}

TEST_CASE("prime power table for y = 2") {
  const auto t = PrimePowerTable::build(2);
  REQUIRE(t.size() == 1);
  CHECK(t[0].p == 2);
  CHECK(t[0].nu == 1);
  CHECK(t.psi() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("prime power table for y = 100 against brute force") {
  const auto t = PrimePowerTable::build(100);
  CHECK(t.nu(2) == 6);
  CHECK(t.nu(3) == 4);
  CHECK(t.nu(5) == 2);
  CHECK(t.nu(7) == 2);
  for (std::uint64_t p : {11, 13, 53, 97}) CHECK(t.nu(p) == 1);
  CHECK(t.size() == 25);
  CHECK(t.psi() == doctest::Approx(uf_test::chebyshev_psi(100)).epsilon(1e-13));
}

TEST_CASE("table construction errors") {
  CHECK_THROWS_AS(PrimePowerTable::build(1), DomainError);
  CHECK_THROWS_AS(PrimePowerTable::build(0), DomainError);
  CHECK_THROWS_AS(PrimePowerTable::build(1000, 100), ResourceError);
}

TEST_CASE("property: nu_p brackets y by exact integer comparison") {
  uf_test::Gen gen(0x5eed0001);
  for (int trial = 0; trial < 40; ++trial) {
    // Exact prime powers are the interesting boundary cases.
    std::uint64_t y = gen.log_uniform(2, 100000);
    if (trial % 4 == 0) {
      const std::uint64_t p = std::vector<std::uint64_t>{2, 3, 5, 7, 31}[trial / 4 % 5];
      y = p;
      while (y * p <= 100000 && gen.uniform(0, 3) != 0) y *= p;
    }
    const auto t = PrimePowerTable::build(y);
    for (const auto& e : t.entries()) {
      unsigned __int128 pk = 1;
      for (std::uint32_t k = 0; k < e.nu; ++k) pk *= e.p;
      INFO("y=" << y << " p=" << e.p);
      CHECK(pk <= y);
      CHECK(pk * e.p > y);
      CHECK(pk == e.max_power);
    }
  }
}

TEST_CASE("property: psi is a nondecreasing step function with prime log jumps") {
  double prev = PrimePowerTable::build(2).psi();
  for (std::uint64_t y = 3; y <= 600; ++y) {
    const double cur = PrimePowerTable::build(y).psi();
    const double jump = cur - prev;
    CHECK(jump >= -1e-12);
    if (jump > 1e-9) {
      // y must be a prime power p^k, and the jump is log p.
      const auto f = factorize(y);
      REQUIRE(f.size() == 1);
      CHECK(jump == doctest::Approx(std::log(static_cast<double>(f[0].first))).epsilon(1e-9));
    } else {
      CHECK(factorize(y).size() != 1);
    }
    prev = cur;
  }
}

TEST_CASE("modulus context examples") {
  const auto t10 = PrimePowerTable::build(10);
  const auto one = ModulusContext::make(1, t10);
  CHECK(one.omega() == 0);
  CHECK(one.phi() == 1);
  CHECK(one.z_q() == 2);
  CHECK(one.theta_q() == doctest::Approx(std::log(2.0) / std::log(10.0)));

  const auto twelve = ModulusContext::make(12, t10);
  REQUIRE(twelve.prime_divisors().size() == 2);
  CHECK(twelve.prime_divisors()[0] == 2);
  CHECK(twelve.prime_divisors()[1] == 3);
  CHECK(twelve.phi() == 4);
  CHECK(twelve.z_q() == 3);
  CHECK(twelve.theta_q() == doctest::Approx(std::log(3.0) / std::log(10.0)));
  CHECK(twelve.largest_prime_within_y());

  const auto t100 = PrimePowerTable::build(100);
  const auto thirty = ModulusContext::make(30, t100);
  CHECK(thirty.omega() == 3);
  CHECK(thirty.phi() == 8);
  CHECK(thirty.z_q() == 5);

  CHECK_FALSE(ModulusContext::make(22, t10).largest_prime_within_y());
  CHECK_THROWS_AS(ModulusContext::make(0, t10), DomainError);
}

TEST_CASE("nth prime and factorization") {
  CHECK(nth_prime(0) == 2);
  CHECK(nth_prime(1) == 2);
  CHECK(nth_prime(2) == 3);
  CHECK(nth_prime(10) == 29);
  const auto f = factorize(360);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == std::pair<std::uint64_t, int>{2, 3});
  CHECK(f[1] == std::pair<std::uint64_t, int>{3, 2});
  CHECK(f[2] == std::pair<std::uint64_t, int>{5, 1});
  CHECK(factorize(1).empty());
}

TEST_CASE("tau of N_{q,y}") {
  const auto t10 = PrimePowerTable::build(10);
  CHECK(tau_n(t10, ModulusContext::make(1, t10)) == 48);
  CHECK(tau_n(t10, ModulusContext::make(6, t10)) == 4);
  CHECK(n_value(t10, ModulusContext::make(1, t10)) == 2520);
  CHECK_THROWS_AS(tau_n(t10, ModulusContext::make(11, t10)), PreconditionError);

  const auto t100 = PrimePowerTable::build(100);
  BigInt expect = 1;
  for (auto p : uf_test::primes_upto(100)) expect *= 1 + uf_test::max_exponent(p, 100);
  CHECK(tau_n(t100, ModulusContext::make(1, t100)) == expect);
}

TEST_CASE("property: tau(N_q) times the removed factors is tau(N_1)") {
  uf_test::Gen gen(0x5eed0002);
  for (int trial = 0; trial < 60; ++trial) {
    const std::uint64_t y = gen.uniform(2, 2000);
    const std::uint64_t q = gen.modulus(5000, y);
    const auto t = PrimePowerTable::build(y);
    const auto ctx = ModulusContext::make(q, t);
    BigInt removed = 1;
    for (auto p : ctx.prime_divisors()) removed *= 1 + t.nu(p);
    INFO("y=" << y << " q=" << q);
    CHECK(tau_n(t, ctx) * removed == tau_n(t, ModulusContext::make(1, t)));
  }
}

TEST_CASE("psi_q drops the primes dividing q") {
  const auto t = PrimePowerTable::build(10);
  const auto ctx = ModulusContext::make(6, t);
  CHECK(psi_q(t, ctx) == doctest::Approx(std::log(35.0)).epsilon(1e-14));
}

TEST_CASE("regime classification examples") {
  const auto t100 = PrimePowerTable::build(100);
  const double lx = std::log(1e6);
  const auto r = classify_regime(lx, t100);
  CHECK(r.small_y);
  CHECK_FALSE(r.large_y);
  CHECK(r.eta == doctest::Approx(uf_test::chebyshev_psi(100) / lx - 2.0));
  CHECK(r.eta == doctest::Approx(4.8).epsilon(0.02));
  CHECK(r.u == doctest::Approx(3.0));
  CHECK(std::string(r.name()) == "SMALL_Y");

  const auto r1000 = classify_regime(lx, PrimePowerTable::build(1000), 0.1);
  CHECK(r1000.large_y);
  const auto r10 = classify_regime(lx, PrimePowerTable::build(10));
  CHECK(r10.out_of_domain());
  CHECK(std::string(r10.name()) == "OUT_OF_DOMAIN");
  CHECK_THROWS_AS(classify_regime(lx, t100, 0.0), InvalidArgument);
}
