#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "support/oracles.hpp"
#include "ufriable/characters.hpp"
#include "ufriable/errors.hpp"
#include "ufriable/saddle.hpp"

using namespace uf;
using cplx = std::complex<double>;

TEST_CASE("character sets of small moduli") {
  const auto one = enumerate_characters(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].is_principal());
  CHECK(one[0](7) == cplx(1.0, 0.0));

  const auto five = enumerate_characters(5);
  REQUIRE(five.size() == 4);
  int principal = 0, real = 0, quartic = 0;
  for (const auto& chi : five) {
    principal += chi.is_principal();
    real += chi.is_real() && !chi.is_principal();
    quartic += chi.order() == 4;
  }
  CHECK(principal == 1);
  CHECK(real == 1);
  CHECK(quartic == 2);
  // the real one is the Legendre symbol mod 5
  for (const auto& chi : five) {
    if (chi.order() != 2) continue;
    CHECK(chi(1).real() == doctest::Approx(1.0));
    CHECK(chi(4).real() == doctest::Approx(1.0));
    CHECK(chi(2).real() == doctest::Approx(-1.0));
    CHECK(chi(3).real() == doctest::Approx(-1.0));
  }

  const auto eight = enumerate_characters(8);
  REQUIRE(eight.size() == 4);
  for (const auto& chi : eight) CHECK(chi.is_real());
  CHECK(enumerate_characters(8)[0].is_principal());
  CHECK_THROWS_AS(enumerate_characters(20000), ResourceError);
}

TEST_CASE("property: character axioms") {
  uf_test::Gen gen(0x5eed0301);
  for (int trial = 0; trial < 30; ++trial) {
    const std::uint64_t q = gen.uniform(1, 400);
    const auto chars = enumerate_characters(q);
    INFO("q=" << q);
    REQUIRE(chars.size() == uf_test::euler_phi(q));
    int principals = 0;
    for (const auto& chi : chars) principals += chi.is_principal();
    CHECK(principals == 1);
    for (int k = 0; k < 5; ++k) {
      const auto& chi = chars[gen.uniform(0, chars.size() - 1)];
      CHECK(std::abs(chi(1) - cplx(1, 0)) < 1e-12);
      const std::uint64_t m = gen.uniform(1, 5000), n = gen.uniform(1, 5000);
      const bool coprime = std::gcd(n, q) == 1;
      CHECK((std::abs(chi(n)) == doctest::Approx(coprime ? 1.0 : 0.0)));
      CHECK(std::abs(chi(m * n) - chi(m) * chi(n)) < 1e-9);
      CHECK(std::abs(chi(n + q) - chi(n)) < 1e-12);
      CHECK(std::abs(chi.conjugate()(n) - std::conj(chi(n))) < 1e-12);
      // real iff chi^2 principal
      bool sq_principal = true;
      for (std::uint64_t a = 1; a < q; ++a)
        if (std::gcd(a, q) == 1 && std::abs(chi(a) * chi(a) - cplx(1, 0)) > 1e-9) sq_principal = false;
      CHECK(chi.is_real() == sq_principal);
    }
    // row orthogonality: sum_chi chi(a) = phi(q) [a = 1]
    const std::uint64_t a = gen.uniform(1, q);
    if (std::gcd(a, q) == 1) {
      cplx s = 0;
      for (const auto& chi : chars) s += chi(a);
      CHECK(std::abs(s - cplx(a % q == 1 % q ? static_cast<double>(chars.size()) : 0.0, 0)) < 1e-8);
    }
  }
}

TEST_CASE("character sums") {
  const auto t10 = PrimePowerTable::build(10);
  const auto x = CountBound::from_integer(2520);
  const auto three = enumerate_characters(3);
  const auto ds = uf_test::divisors_of_n(10, 1);
  double expect = 0;
  for (auto d : ds) {
    const int r = static_cast<int>(d % 3);
    expect += r == 0 ? 0 : (r == 1 ? 1 : -1);
  }
  const auto s = character_sum(x, t10, three[1]);
  CHECK(s.real() == doctest::Approx(expect));
  CHECK(std::abs(s.imag()) < 1e-9);
  // principal: Upsilon_q exactly
  const auto p = character_sum(x, t10, three[0]);
  CHECK(p.real() == doctest::Approx(count_ultrafriable(x, t10, ModulusContext::make(3, t10)).value.convert_to<double>()));
  const auto counts = count_ultrafriable_residues(x, t10, 4);
  CHECK_THROWS_AS(character_sum(counts, three[1]), InvalidArgument);
}

TEST_CASE("reconstruction examples") {
  const auto t10 = PrimePowerTable::build(10);
  const auto x = CountBound::from_integer(2520);
  const auto cells = count_ultrafriable_residues(x, t10, 3);
  const auto r = reconstruct_progression(x, t10, 1, 3);
  CHECK(r.real() == doctest::Approx(cells.counts[1].convert_to<double>()).epsilon(1e-12));
  CHECK(std::abs(r.imag()) < 1e-9);
  CHECK(reconstruct_progression(x, t10, 0, 1).real() == doctest::Approx(48.0));

  const uf_test::FactorTable ft(100000);
  const auto t50 = PrimePowerTable::build(50);
  const auto r8 = reconstruct_progression(CountBound::from_integer(100000), t50, 5, 8);
  CHECK(std::abs(r8.real() - static_cast<double>(ft.residues(100000, 50, 8, true)[5])) < 1e-6);
  CHECK_THROWS_AS(reconstruct_progression(x, t10, 3, 6), DomainError);
}

TEST_CASE("property: Parseval over the character group") {
  uf_test::Gen gen(0x5eed0302);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t y = gen.uniform(3, 60);
    const std::uint64_t q = gen.modulus(30, y);
    const auto t = PrimePowerTable::build(y);
    const auto x = CountBound::from_integer(BigInt(gen.log_uniform(100, 10000000)));
    const auto counts = count_ultrafriable_residues(x, t, q);
    const auto chars = enumerate_characters(q);
    double lhs = 0, rhs = 0;
    for (const auto& chi : chars) lhs += std::norm(character_sum(counts, chi));
    for (std::uint64_t a = 0; a < q; ++a)
      if (std::gcd(a, q) == 1) rhs += std::pow(counts.counts[a].convert_to<double>(), 2);
    rhs *= static_cast<double>(chars.size());
    INFO("y=" << y << " q=" << q);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
  }
}

TEST_CASE("W_q examples and properties") {
  const auto t = PrimePowerTable::build(100);
  const auto five = enumerate_characters(5);
  const auto ctx5 = ModulusContext::make(5, t);
  CHECK(w_q(0.0, 0.3, t, ctx5, five[0]) == 0.0);

  // direct summation oracle
  for (const auto& chi : five) {
    long double acc = 0;
    for (auto p : uf_test::primes_upto(100)) {
      if (p == 5) continue;
      const cplx v = chi(p) * std::exp(cplx(0, -1.0 * std::log(static_cast<double>(p))));
      const double b = 1.0 - v.real();
      acc += b * b / std::pow(static_cast<double>(p), 0.3);
    }
    CHECK(w_q(1.0, 0.3, t, ctx5, chi) == doctest::Approx(static_cast<double>(acc)).epsilon(1e-12));
  }

  // a real character that is -1 on every prime in range
  const auto t3 = PrimePowerTable::build(3);
  const auto ctx4 = ModulusContext::make(4, t3);
  const auto four = enumerate_characters(4);
  CHECK(w_q(0.0, 0.5, t3, ctx4, four[1]) == doctest::Approx(4.0 / std::sqrt(3.0)));

  uf_test::Gen gen(0x5eed0303);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t q = gen.uniform(1, 60);
    const auto tt = PrimePowerTable::build(gen.uniform(60, 400));
    const auto chars = enumerate_characters(q);
    const auto& chi = chars[gen.uniform(0, chars.size() - 1)];
    CHECK(w_q(gen.real(-50, 50), gen.real(0.01, 1.5), tt, ModulusContext::make(q, tt), chi) >= 0.0);
  }
}

TEST_CASE("D and S sums") {
  const auto t10 = PrimePowerTable::build(10);
  const auto three = enumerate_characters(3);
  const double expect = 2 * std::log(2.0) / 2 + std::log(3.0) / 3 + 2 * std::log(5.0) / 5 + 0.0;
  CHECK(d_sum(0.0, 1.0, t10, three[1]) == doctest::Approx(expect).epsilon(1e-14));
  // principal: only p | q survive
  CHECK(d_sum(0.0, 0.4, t10, three[0]) == doctest::Approx(std::log(3.0) / std::pow(3.0, 0.4)));

  // Lambda identity: S at beta -> 0 for q = 1 is psi(y)
  for (std::uint64_t y : {10, 100, 1000}) {
    const auto t = PrimePowerTable::build(y);
    const auto trivial = enumerate_characters(1);
    CHECK(s_sum(0.0, 1e-300, t, trivial[0]).real() == doctest::Approx(t.psi()).epsilon(1e-12));
    CHECK(t.psi() == doctest::Approx(uf_test::chebyshev_psi(y)).epsilon(1e-12));
  }
}

TEST_CASE("property: D = y^{1-beta}/(1-beta) - Re S up to half the main term") {
  for (std::uint64_t y : {100, 1000, 10000}) {
    const auto t = PrimePowerTable::build(y);
    const double ly = std::log(static_cast<double>(y));
    for (double eta : {0.5, 1.0, 3.0}) {
      const double beta = solve_beta(t.psi() / (2 + eta), t).sigma;
      const double main = std::exp((1 - beta) * ly) / (1 - beta);
      for (std::uint64_t q : {5, 7}) {
        for (const auto& chi : enumerate_characters(q)) {
          for (double tau : {0.0, 1.0, 10.0}) {
            const double gap = d_sum(tau, beta, t, chi) - main + s_sum(tau, beta, t, chi).real();
            INFO("y=" << y << " eta=" << eta << " q=" << q << " tau=" << tau);
            CHECK(std::abs(gap) <= 0.5 * main);
          }
        }
      }
    }
  }
}
