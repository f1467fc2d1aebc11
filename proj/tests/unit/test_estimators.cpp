#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support/highprec.hpp"
#include "ufriable/calibration.hpp"
#include "ufriable/errors.hpp"
#include "ufriable/estimators.hpp"
#include "ufriable/saddle.hpp"

using namespace uf;

namespace {

const FrozenConstants& frozen() {
  static const FrozenConstants fc = FrozenConstants::load(UF_FROZEN_CONSTANTS);
  return fc;
}

double factor_sum(const EstimateBreakdown& e) {
  double s = 0;
  for (const auto& [k, v] : e.factors) s += v;
  return s;
}

// Delta_q written out from its two-branch definition, with theta_q taken from
// the omega(q)-th prime.
double delta_oracle(double log_x, std::uint64_t y, int omega) {
  const double ly = std::log(static_cast<double>(y));
  const double psi = uf_test::chebyshev_psi(y);
  const auto primes = uf_test::primes_upto(1000);
  const double theta = std::log(static_cast<double>(primes[std::max(omega, 1) - 1])) / ly;
  if (2 * log_x < psi && psi <= log_x * log_x) {
    const double eta = psi / log_x - 2;
    return std::pow(log_x, theta) / ly * (1 + 1 / (theta * std::log(1 + eta)));
  }
  const double u = log_x / ly, l = std::log(2 * u);
  return theta * std::pow(u * l, theta) / (1 + theta * l);
}

}  // namespace

TEST_CASE("error budget examples") {
  const auto t100 = PrimePowerTable::build(100);
  const auto x = CountBound::parse("1e6");
  const auto one = error_budget(x, t100, ModulusContext::make(1, t100));
  CHECK(one.omega_q == 0);
  CHECK(one.theta_q == doctest::Approx(std::log(2.0) / std::log(100.0)));
  CHECK(one.dd_q == 0.0);
  CHECK(one.cc_q == 0.0);
  CHECK(one.delta_branch == 1);
  CHECK(one.delta_q == doctest::Approx(delta_oracle(x.log(), 100, 0)).epsilon(1e-12));

  const auto six = error_budget(x, t100, ModulusContext::make(6, t100));
  CHECK(six.delta_branch == 1);
  CHECK(six.delta_q == doctest::Approx(delta_oracle(x.log(), 100, 2)).epsilon(1e-12));
  CHECK(six.delta_q == doctest::Approx(delta_q_small_y(x.log(), std::log(100.0), six.theta_q, six.eta)));
  CHECK(six.delta_q_other == doctest::Approx(delta_q_large_y(x.log(), std::log(100.0), six.theta_q)));
  CHECK(six.dd_q == doctest::Approx(std::min(2.0, six.delta_q)));
  CHECK(six.cc_q == doctest::Approx(std::min(2.0, six.delta_q * six.delta_q)));
  const double u = six.u, eta = six.eta, d = six.dd_q;
  CHECK(six.nominal_bound == doctest::Approx((1 + d * d) / u + d * (1 + eta) / (std::sqrt(u) + eta * u)));

  const auto t1000 = PrimePowerTable::build(1000);
  const auto large = error_budget(CountBound::parse("1e4"), t1000, ModulusContext::make(6, t1000));
  CHECK(large.delta_branch == 2);
  CHECK(large.delta_q == doctest::Approx(delta_oracle(std::log(1e4), 1000, 2)).epsilon(1e-12));
}

TEST_CASE("property: budget invariants") {
  uf_test::Gen gen(0x5eed0401);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t y = gen.log_uniform(20, 20000);
    const auto t = PrimePowerTable::build(y);
    const std::uint64_t q = gen.modulus(3000, y);
    const double lx = gen.real(std::log(static_cast<double>(y)), 3 * t.psi());
    const auto b = error_budget(CountBound::from_log(lx), t, ModulusContext::make(q, t));
    INFO("y=" << y << " q=" << q << " log_x=" << lx);
    CHECK(b.dd_q <= b.omega_q);
    CHECK(b.cc_q <= b.dd_q * b.dd_q + 1e-12);
    CHECK(b.delta_branch == ((2 * lx < t.psi() && t.psi() <= lx * lx) ? 1 : 2));
    CHECK(std::isfinite(b.nominal_bound));
  }
}

TEST_CASE("property: Delta_q and D_q grow with omega(q) on the large-y branch") {
  uf_test::Gen gen(0x5eed0402);
  const std::uint64_t primorials[] = {1, 2, 6, 30, 210, 2310};
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t y = gen.log_uniform(50, 50000);
    const auto t = PrimePowerTable::build(y);
    const double ly = std::log(static_cast<double>(y));
    // y > (log x)^2 and u > 1
    const double lx = gen.real(1.2 * ly, std::sqrt(static_cast<double>(y)));
    if (lx <= 1.2 * ly) continue;
    double prev_delta = 0, prev_d = 0;
    for (auto q : primorials) {
      if (uf_test::largest_prime_factor(q) > y) break;
      const auto b = error_budget(CountBound::from_log(lx), t, ModulusContext::make(q, t));
      if (b.delta_branch != 2) break;
      INFO("y=" << y << " log_x=" << lx << " q=" << q);
      CHECK(b.delta_q >= prev_delta);
      CHECK(b.dd_q >= prev_d);
      prev_delta = b.delta_q;
      prev_d = b.dd_q;
    }
  }
}

TEST_CASE("Delta_q on the small-y branch is not monotone in omega(q)") {
  // The first branch trades (log x)^theta against 1/(theta log(1+eta)), so
  // moving theta_q from log 2/log y to log 3/log y can lower both Delta_q and
  // D_q. These points pin that behaviour of the formula.
  const auto t1000 = PrimePowerTable::build(1000);
  const auto x = CountBound::from_log(40.0);
  const auto b1 = error_budget(x, t1000, ModulusContext::make(2, t1000));
  const auto b2 = error_budget(x, t1000, ModulusContext::make(6, t1000));
  REQUIRE(b1.delta_branch == 1);
  REQUIRE(b2.delta_branch == 1);
  CHECK(b1.delta_q == doctest::Approx(delta_oracle(40.0, 1000, 1)).epsilon(1e-12));
  CHECK(b2.delta_q == doctest::Approx(delta_oracle(40.0, 1000, 2)).epsilon(1e-12));
  CHECK(b2.delta_q < b1.delta_q);
  CHECK(b2.dd_q < b1.dd_q);
  // with Delta_q above omega(q) the minimum keeps D_q ordered
  const auto t100 = PrimePowerTable::build(100);
  const auto x20 = CountBound::from_log(20.0);
  const auto c1 = error_budget(x20, t100, ModulusContext::make(2, t100));
  const auto c2 = error_budget(x20, t100, ModulusContext::make(6, t100));
  CHECK(c2.delta_q < c1.delta_q);
  CHECK(c2.dd_q >= c1.dd_q);
}

TEST_CASE("remark (a) band for 0 < eta <= 1") {
  const auto& fc = frozen();
  for (std::uint64_t y : {70, 150, 300}) {
    const auto t = PrimePowerTable::build(y);
    for (double eta : {0.15, 0.6, 0.9}) {
      const auto x = CountBound::from_log(t.psi() / (2 + eta));
      for (std::uint64_t q : {1, 3, 10, 42}) {
        const auto b = error_budget(x, t, ModulusContext::make(q, t));
        const double r = b.delta_q * b.eta / (1.0 + b.omega_q);
        INFO("y=" << y << " eta=" << eta << " q=" << q);
        CHECK(r >= fc.get("remark_a_lo"));
        CHECK(r <= fc.get("remark_a_hi"));
      }
    }
  }
}

TEST_CASE("Upsilon main term") {
  const auto t = PrimePowerTable::build(100);
  const auto x = CountBound::parse("e^30");
  const auto e = estimate_upsilon(x, t);
  CHECK(std::isfinite(e.log_main));
  CHECK(factor_sum(e) == doctest::Approx(e.log_main).epsilon(1e-12));
  // independent recomputation of beta log x + log Z + log G
  const auto ps = uf_test::prime_nus(100);
  double lo = 1e-6, hi = 5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (uf_test::sigma_fd(1, mid, ps) > 30.0 ? lo : hi) = mid;
  }
  const double beta = 0.5 * (lo + hi);
  CHECK(e.beta == doctest::Approx(beta).epsilon(1e-7));
  const double s2 = uf_test::sigma_fd(2, beta, ps);
  const double z = beta * std::sqrt(s2);
  const double g = 0.5 * std::exp(z * z / 2) * std::erfc(z / std::sqrt(2.0));
  const double expect =
      beta * 30.0 + static_cast<double>(uf_test::log_z_hp(beta, ps)) + std::log(g);
  CHECK(e.log_main == doctest::Approx(expect).epsilon(1e-8));

  const auto exact = count_ultrafriable(x, t, ModulusContext::make(1, t));
  const auto rec = compare(exact.value, e);
  CHECK(std::abs(rec.rel_error) <= 2.0 / e.budget.u);

  CHECK_THROWS_AS(estimate_upsilon(CountBound::from_integer(100), PrimePowerTable::build(10)),
                  DomainError);
}

TEST_CASE("G factor tends to 1/2 as beta sqrt(sigma_2) -> 0") {
  const auto t = PrimePowerTable::build(100);
  const auto e = estimate_upsilon(CountBound::from_log(t.psi() / 2 * (1 - 1e-9)), t);
  CHECK(e.beta < 1e-6);
  CHECK(std::exp(e.factors.at("G_factor")) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("Upsilon_q variants") {
  const auto t = PrimePowerTable::build(100);
  const auto x = CountBound::parse("e^30");
  const auto one = ModulusContext::make(1, t);
  const auto base = estimate_upsilon(x, t);
  for (auto v : {Theorem::T1i, Theorem::T1ii, Theorem::T1iii}) {
    const auto e = [&] {
      // T1ii and T1iii need small eta; use the point just below psi/2 for them
      return estimate_upsilon_q(v == Theorem::T1i ? x : CountBound::from_log(t.psi() / 2.05), t,
                                one, v);
    }();
    if (v == Theorem::T1i) CHECK(e.log_main == base.log_main);
    CHECK(e.factors.at("correction_T1iii") == 0.0);
  }

  const auto six = ModulusContext::make(6, t);
  const auto e6 = estimate_upsilon_q(x, t, six, Theorem::T1i);
  CHECK(factor_sum(e6) == doctest::Approx(e6.log_main).epsilon(1e-12));
  CHECK(std::abs(e6.diagnostics.at("log_main_via_g_q") - e6.log_main) <= 1e-11 * std::abs(e6.log_main));
  const auto exact = count_ultrafriable(x, t, six);
  const auto rec = compare(exact.value, e6);
  CHECK(std::abs(rec.rel_error) <= frozen().get("C_T1") * e6.budget.nominal_bound);

  // T1iii: omega = 0 recovers T1i; the correction is log(1 + omega/sqrt(pi u))
  const auto near = CountBound::from_log(t.psi() / 2.02);
  const auto a = estimate_upsilon_q(near, t, one, Theorem::T1iii);
  const auto b = estimate_upsilon_q(near, t, one, Theorem::T1i);
  CHECK(a.log_main == b.log_main);
  const auto c = estimate_upsilon_q(near, t, six, Theorem::T1iii);
  CHECK(c.factors.at("correction_T1iii") ==
        doctest::Approx(std::log1p(2 / std::sqrt(M_PI * c.budget.u))).epsilon(1e-14));

  CHECK_THROWS_AS(estimate_upsilon_q(x, t, six, Theorem::T1ii), DomainError);
  CHECK_THROWS_AS(estimate_upsilon_q(x, t, six, Theorem::T1iii), DomainError);
  CHECK_THROWS_AS(estimate_upsilon_q(x, t, six, Theorem::REMC), DomainError);
  CHECK_THROWS_AS(estimate_upsilon_q(x, t, six, Theorem::T4), InvalidArgument);
}

TEST_CASE("property: estimates are positive and finite on their domain") {
  uf_test::Gen gen(0x5eed0403);
  for (int trial = 0; trial < 60; ++trial) {
    const std::uint64_t y = gen.log_uniform(20, 5000);
    const auto t = PrimePowerTable::build(y);
    const std::uint64_t q = gen.modulus(500, y);
    const auto ctx = ModulusContext::make(q, t);
    const double lx = t.psi() / gen.real(2.01, 12.0);
    if (lx < std::log(2.0)) continue;
    const auto e = estimate_upsilon_q(CountBound::from_log(lx), t, ctx, Theorem::T1i);
    INFO("y=" << y << " q=" << q << " log_x=" << lx);
    CHECK(std::isfinite(e.log_main));
    CHECK(std::exp(e.log_main) > 0.0);
    CHECK(factor_sum(e) == doctest::Approx(e.log_main).epsilon(1e-12));
    CHECK(std::abs(e.diagnostics.at("log_main_via_g_q") - e.log_main) <=
          1e-11 * std::max(1.0, std::abs(e.log_main)));
  }
}

TEST_CASE("T2 examples") {
  const auto x = CountBound::parse("1e6");
  const auto t = PrimePowerTable::build(1000);
  const uf_test::FactorTable ft(1000000);
  for (std::uint64_t q : {1, 6}) {
    const auto ctx = ModulusContext::make(q, t);
    const auto e = estimate_t2(x, t, ctx);
    CHECK(std::exp(e.factors.at("Psi_q")) ==
          doctest::Approx(static_cast<double>(ft.coprime(1000000, 1000, q, false))));
    const double ups = static_cast<double>(ft.coprime(1000000, 1000, q, true));
    const double psi = static_cast<double>(ft.coprime(1000000, 1000, q, false));
    const double u = x.log() / std::log(1000.0);
    const double scale = static_cast<double>(q) * u * std::log(2 * u) /
                         (static_cast<double>(uf_test::euler_phi(q)) * std::sqrt(1000.0) * std::log(1000.0));
    CHECK(e.budget.nominal_bound == doctest::Approx(scale));
    CHECK(std::abs(ups / psi - 1) <= frozen().get("C_T2") * scale);
  }
  // with y >= x every friable n <= x is ultrafriable
  const auto big = PrimePowerTable::build(2000);
  const auto xs = CountBound::from_integer(1500);
  CHECK(count_ultrafriable(xs, big, ModulusContext::make(6, big)).value ==
        count_friable(xs, 2000, 6).value);
  CHECK_THROWS_AS(estimate_t2(x, PrimePowerTable::build(100), ModulusContext::make(1, PrimePowerTable::build(100))),
                  DomainError);
}

TEST_CASE("progression examples") {
  const auto& fc = frozen();
  const auto t = PrimePowerTable::build(100);
  const auto x = CountBound::parse("e^30");
  const auto seven = ModulusContext::make(7, t);
  const auto counts = count_ultrafriable_residues(x, t, 7);
  for (std::uint64_t a = 1; a < 7; ++a) {
    const auto e = estimate_progression(x, t, seven, a, Theorem::T4);
    CHECK(factor_sum(e) == doctest::Approx(e.log_main).epsilon(1e-12));
    const double dev = std::abs(std::expm1(log_big(counts.counts[a]) - e.log_main));
    INFO("a=" << a << " dev=" << dev);
    CHECK(dev <= fc.get("C_T4") * e.budget.nominal_bound);
  }
  const auto one = estimate_progression(x, t, ModulusContext::make(1, t), 0, Theorem::T4);
  CHECK(compare(count_ultrafriable(x, t, ModulusContext::make(1, t)).value, one).rel_error == 0.0);
  CHECK_THROWS_AS(estimate_progression(x, t, seven, 14, Theorem::T4), DomainError);

  const auto t1000 = PrimePowerTable::build(1000);
  const auto x6 = CountBound::parse("1e6");
  const auto e = estimate_progression(x6, t1000, ModulusContext::make(11, t1000), 3, Theorem::T5);
  const uf_test::FactorTable ft(1000000);
  const double exact = static_cast<double>(ft.residues(1000000, 1000, 11, true)[3]);
  const double u = x6.log() / std::log(1000.0);
  const double scale = std::log(11.0) / (std::pow(u, 0.1) * std::log(1000.0)) + 1 / std::log(1000.0);
  CHECK(e.budget.nominal_bound == doctest::Approx(scale));
  CHECK(std::abs(exact / std::exp(e.log_main) - 1) <= fc.get("C_T5") * scale);
  CHECK_THROWS_AS(estimate_progression(x6, t1000, ModulusContext::make(37, t1000), 3, Theorem::T5),
                  DomainError);
}

TEST_CASE("non-coprime residues") {
  const auto& fc = frozen();
  const auto t = PrimePowerTable::build(50);
  const auto x = CountBound::parse("e^25");
  for (auto [q, a] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{6, 2}, {15, 5}}) {
    const auto e = estimate_noncoprime(x, t, q, a);
    CHECK(e.theorem == Theorem::R6);
    CHECK(factor_sum(e) == doctest::Approx(e.log_main).epsilon(1e-12));
    const auto counts = count_ultrafriable_residues(x, t, q);
    const auto rec = compare(counts.counts[a], e);
    INFO("q=" << q << " a=" << a << " rel=" << rec.rel_error);
    CHECK(std::abs(rec.rel_error) <= fc.get("C_R6") * e.budget.nominal_bound);
  }
  // d = 1 is the T4 estimate
  const auto t100 = PrimePowerTable::build(100);
  const auto x30 = CountBound::parse("e^30");
  const auto r = estimate_noncoprime(x30, t100, 7, 3);
  const auto p = estimate_progression(x30, t100, ModulusContext::make(7, t100), 3, Theorem::T4);
  CHECK(r.log_main == p.log_main);
  CHECK_THROWS_AS(estimate_noncoprime(x, t, 12, 4), UnsupportedCase);
  CHECK_THROWS_AS(estimate_noncoprime(x, t, 12, 2), UnsupportedCase);
}

TEST_CASE("T3 bounds") {
  const auto t10 = PrimePowerTable::build(10);
  const auto x = CountBound::from_integer(30);  // 2 log 30 < psi(10) = log 2520
  const auto ctx = ModulusContext::make(3, t10);
  const auto chars = enumerate_characters(3);
  double sum = 0;
  std::uint64_t coprime = 0;
  for (auto d : uf_test::divisors_of_n(10, 1)) {
    if (d > 30) continue;
    const int r = static_cast<int>(d % 3);
    sum += r == 0 ? 0 : (r == 1 ? 1 : -1);
    coprime += r != 0;
  }
  const auto b = t3_bound(x, t10, ctx, chars[1]);
  CHECK(b.exact_ratio == doctest::Approx(std::abs(sum) / static_cast<double>(coprime)));
  CHECK(b.theta0 <= b.theta1);
  CHECK_THROWS_AS(t3_bound(x, t10, ctx, chars[0]), DomainError);

  const double ly = std::log(100.0);
  const double floor = std::exp(-log_y_eps(100.0, 0.1));
  double prev = t3_bound_values(1.0, ly).theta0;
  for (double u = 2; u < 2000; u *= 2) {
    const auto v = t3_bound_values(u, ly);
    INFO("u=" << u);
    if (u <= 64) {
      CHECK(v.theta0 < prev);
      CHECK(v.theta0 > floor);
    }
    CHECK(v.theta0 <= prev);
    CHECK(v.theta1 >= v.theta0);
    prev = v.theta0;
  }
  CHECK(t3_bound_values(1e5, ly).theta0 == doctest::Approx(floor).epsilon(1e-12));
}

TEST_CASE("comparison records") {
  EstimateBreakdown e;
  e.log_main = std::log(50.0);
  e.budget.nominal_bound = 0.1;
  const auto r = compare(48, e);
  CHECK(r.rel_error == doctest::Approx(-1.0 / 24).epsilon(1e-14));
  CHECK(r.error_over_budget == doctest::Approx(1.0 / 2.4));
  CHECK_FALSE(r.degenerate);
  e.log_main = std::log(48.0);
  CHECK(std::abs(compare(48, e).rel_error) < 1e-15);
  CHECK(compare(0, e).degenerate);
  CHECK(log_big(BigInt(1) << 2000) == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("theorem names round-trip") {
  for (auto t : {Theorem::T1i, Theorem::T1ii, Theorem::T1iii, Theorem::T2, Theorem::T3,
                 Theorem::T4, Theorem::T5, Theorem::R6, Theorem::REMC})
    CHECK(parse_theorem(theorem_name(t)) == t);
  CHECK_FALSE(parse_theorem("T9").has_value());
}
