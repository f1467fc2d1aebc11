#include "ufriable/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "ufriable/errors.hpp"

namespace uf {

namespace {

constexpr int kSeriesTerms = 40;
constexpr double kSeriesCutoff = 2.5;

// c_n = B_{2n} / (2n)!, the Taylor coefficients of
// k(t) = 1/(e^t - 1) - 1/t + 1/2 = sum_{n>=1} c_n t^{2n-1}.
const std::array<double, kSeriesTerms + 1>& bernoulli_coefficients() {
  static const auto table = [] {
    std::array<double, kSeriesTerms + 1> c{};
    double fact = 1.0;
    for (int n = 1; n <= kSeriesTerms; ++n) {
      fact *= (2.0 * n - 1.0) * (2.0 * n);
      c[n] = boost::math::bernoulli_b2n<double>(n) / fact;
    }
    return c;
  }();
  return table;
}

// m-th derivative (0 <= m <= 3) of 1/(e^t - 1), t > 0.
double inv_expm1_deriv(int m, double t) {
  const double w = std::exp(-t);
  const double om = -std::expm1(-t);  // 1 - w
  switch (m) {
    case 0: return w / om;
    case 1: return -w / (om * om);
    case 2: return w * (1.0 + w) / (om * om * om);
    default: return -w * (1.0 + w * (4.0 + w)) / ((om * om) * (om * om));
  }
}

// m-th derivative (0 <= m <= 3) of k(t) = 1/(e^t - 1) - 1/t + 1/2, the
// regular part of 1/(e^t - 1) at the origin.
double k_deriv(int m, double t) {
  if (t < kSeriesCutoff) {
    // sum_n c_n (2n-1)(2n-2)...(2n-m) t^{2n-1-m}, Horner in t^2 from the tail.
    const auto& c = bernoulli_coefficients();
    const int n0 = m <= 1 ? 1 : 2;
    const double t2 = t * t;
    double acc = 0.0;
    for (int n = kSeriesTerms; n >= n0; --n) {
      double ff = 1.0;
      for (int i = 0; i < m; ++i) ff *= (2.0 * n - 1 - i);
      acc = acc * t2 + c[n] * ff;
    }
    return (2 * n0 - 1 - m) == 1 ? acc * t : acc;
  }
  const double g = inv_expm1_deriv(m, t);
  switch (m) {
    case 0: return g - 1.0 / t + 0.5;
    case 1: return g + 1.0 / (t * t);
    case 2: return g - 2.0 / (t * t * t);
    default: return g + 6.0 / ((t * t) * (t * t));
  }
}

bool skipped(const ModulusContext* ctx, std::uint64_t p) { return ctx && ctx->divisible_by(p); }

void require_positive(double s, const char* what) {
  if (!(s > 0) || !std::isfinite(s))
    throw DomainError(std::string(what) + " requires s > 0, got " + std::to_string(s));
}

void require_order(int j) {
  if (j < 1 || j > 4) throw InvalidArgument("phi_j_q: j must be in 1..4");
}

// Contribution of one prime power p^nu to phi_j at s.
double phi_term(int j, double s, double lp, std::uint32_t nu) {
  const double n1 = nu + 1.0;
  const double t = s * lp;
  if (j == 1) return nu * lp / 2.0 + lp * k_deriv(0, t) - n1 * lp * k_deriv(0, n1 * t);
  const double lpj = std::pow(lp, j);
  const double v = lpj * (k_deriv(j - 1, t) - std::pow(n1, j) * k_deriv(j - 1, n1 * t));
  return (j % 2 == 0) ? -v : v;
}

// (1 - e^{-w}) for complex w, accurate as w -> 0.
std::complex<double> one_minus_exp_neg(std::complex<double> w) {
  // expm1(z) = expm1(a) cos b - 2 sin^2(b/2) + i e^a sin b, z = a + ib = -w
  const double a = -w.real(), b = -w.imag();
  const double sh = std::sin(b / 2.0);
  const std::complex<double> em1(std::expm1(a) * std::cos(b) - 2.0 * sh * sh,
                                 std::exp(a) * std::sin(b));
  return -em1;
}

template <class F, class DF>
SaddleResult solve_decreasing(SaddleKind kind, double target, F&& f, DF&& minus_df) {
  // f strictly decreasing on (0, inf); find f(sigma) = target.
  SaddleResult res;
  res.kind = kind;
  double hi = 1.0;
  while (f(hi) >= target) {
    hi *= 2.0;
    if (hi > 1e6) throw DomainError("saddle bracket failed to close from above");
  }
  double lo = hi / 2.0;
  while (f(lo) <= target) {
    lo /= 2.0;
    if (lo < 1e-300) throw DomainError("saddle bracket failed to close near zero");
  }
  int it = 0;
  while (hi - lo > 1e-3 * hi && it < 4000) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > target ? lo : hi) = mid;
    ++it;
  }
  double sigma = 0.5 * (lo + hi);
  double fs = f(sigma) - target;
  for (int k = 0; k < 200; ++k, ++it) {
    if (std::abs(fs) <= 1e-15 * std::abs(target) || hi - lo <= 4e-16 * hi) break;
    double next = sigma + fs / minus_df(sigma);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    double fn = f(next) - target;
    if (std::abs(fn) > 0.5 * std::abs(fs)) {
      // not contracting: fall back to a bisection step
      (fs > 0 ? lo : hi) = sigma;
      next = 0.5 * (lo + hi);
      fn = f(next) - target;
    }
    sigma = next;
    fs = fn;
    (fs > 0 ? lo : hi) = sigma;
  }
  res.sigma = sigma;
  res.residual = std::abs(fs) / std::abs(target);
  res.iterations = it;
  return res;
}

}  // namespace

double xi(double v) {
  if (!(v >= 1.0) || !std::isfinite(v)) throw DomainError("xi(v) requires v >= 1");
  if (v == 1.0) return 0.0;
  const double lv = std::log(v);
  // e^xi - 1 - v xi is negative on (0, root) and positive beyond it.
  auto f = [v](double s) { return std::expm1(s) - v * s; };
  double lo = f(lv) < 0 ? lv : 0.0;
  double hi = std::log(v * (1.0 + lv) * (1.0 + lv)) + 1.0;
  double s = 0.5 * (lo + hi);
  for (int k = 0; k < 200; ++k) {
    const double fs = f(s);
    if (fs < 0) lo = s; else hi = s;
    const double d = std::exp(s) - v;
    double next = d > 0 ? s - fs / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16 * s) {
      s = next;
      break;
    }
    s = next;
    if (hi - lo <= 2e-16 * hi) break;
  }
  return s;
}

double phi_j_q(int j, double s, const PrimePowerTable& table, const ModulusContext* ctx) {
  require_order(j);
  require_positive(s, "phi_j_q");
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (skipped(ctx, e.p)) continue;
    acc += phi_term(j, s, e.log_p, e.nu);
  }
  return acc;
}

double phi1_closed_form(double s, const PrimePowerTable& table, const ModulusContext* ctx) {
  require_positive(s, "phi_1");
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (skipped(ctx, e.p)) continue;
    const double n1 = e.nu + 1.0;
    acc += e.log_p / std::expm1(s * e.log_p) - n1 * e.log_p / std::expm1(n1 * s * e.log_p);
  }
  return acc;
}

double phi_j_q_series(int j, double s, const PrimePowerTable& table, const ModulusContext* ctx) {
  require_order(j);
  require_positive(s, "phi_j_q_series");
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (skipped(ctx, e.p)) continue;
    const double lp = e.log_p, n1 = e.nu + 1.0;
    const double lpj = std::pow(lp, j), n1j = std::pow(n1, j);
    const auto k_max = static_cast<long>(std::ceil(60.0 / (s * lp)));
    double partial = 0.0;
    for (long k = 1; k <= k_max; ++k) {
      const double kk = static_cast<double>(k);
      const double term =
          std::pow(kk, j - 1) * lpj * (std::exp(-kk * s * lp) - n1j * std::exp(-kk * n1 * s * lp));
      partial += term;
      if (std::abs(term) < 1e-16 * std::abs(partial)) break;
    }
    acc += partial;
  }
  return acc;
}

double alpha_sum(int j, double s, const PrimePowerTable& table) {
  require_order(j);
  require_positive(s, "alpha_sum");
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    const double v = std::pow(e.log_p, j) * inv_expm1_deriv(j - 1, s * e.log_p);
    acc += (j % 2 == 0) ? -v : v;
  }
  return acc;
}

SaddleResult solve_beta(double log_x, const PrimePowerTable& table, const ModulusContext* ctx) {
  if (!(log_x >= std::log(2.0) - 1e-15)) throw DomainError("solve_beta requires x >= 2");
  const double limit = table.psi() / 2.0;
  if (!(limit > log_x))
    throw DomainError("solve_beta requires psi(y) > 2 log x: phi_1(0+, y) = psi(y)/2 = " +
                      std::to_string(limit) + " <= log x = " + std::to_string(log_x) +
                      "; apply the divisor symmetry to reduce x below sqrt(N_y)");
  auto res = solve_decreasing(
      SaddleKind::Beta, log_x, [&](double s) { return phi_j_q(1, s, table); },
      [&](double s) { return phi_j_q(2, s, table); });
  for (int j = 2; j <= 4; ++j) res.sigma_j[j - 2] = phi_j_q(j, res.sigma, table, ctx);
  return res;
}

SaddleResult solve_beta_reflected(double log_x, const PrimePowerTable& table) {
  const double psi = table.psi();
  if (log_x < psi / 2.0) return solve_beta(log_x, table);
  const double mirrored = psi - log_x;
  if (!(mirrored >= std::log(2.0) - 1e-15))
    throw DomainError("reflected saddle requires log x <= psi(y) - log 2");
  if (mirrored == psi / 2.0) {
    SaddleResult res;
    res.sigma_j = {phi_j_q(2, 1e-300, table), 0.0, phi_j_q(4, 1e-300, table)};
    return res;
  }
  auto res = solve_beta(mirrored, table);
  res.sigma = -res.sigma;
  res.sigma_j[1] = -res.sigma_j[1];
  return res;
}

SaddleResult solve_alpha(double log_x, const PrimePowerTable& table) {
  if (!(log_x > 0)) throw DomainError("solve_alpha requires x > 1");
  if (!(log_x >= std::log(static_cast<double>(table.y())) - 1e-12))
    throw DomainError("solve_alpha requires x >= y");
  auto res = solve_decreasing(
      SaddleKind::Alpha, log_x, [&](double s) { return alpha_sum(1, s, table); },
      [&](double s) { return alpha_sum(2, s, table); });
  for (int j = 2; j <= 4; ++j) res.sigma_j[j - 2] = alpha_sum(j, res.sigma, table);
  return res;
}

std::complex<double> log_z_q(std::complex<double> s, const PrimePowerTable& table,
                             const ModulusContext* ctx) {
  if (!(s.real() > 0)) throw DomainError("log Z_q(s, y) requires Re s > 0");
  std::complex<double> acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (skipped(ctx, e.p)) continue;
    const std::complex<double> w = s * e.log_p;
    acc += std::log(one_minus_exp_neg(w * (e.nu + 1.0))) - std::log(one_minus_exp_neg(w));
  }
  return acc;
}

double log_z_q(double s, const PrimePowerTable& table, const ModulusContext* ctx) {
  require_positive(s, "log Z_q");
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (skipped(ctx, e.p)) continue;
    const double t = s * e.log_p;
    acc += std::log(-std::expm1(-(e.nu + 1.0) * t)) - std::log(-std::expm1(-t));
  }
  return acc;
}

double gamma1_at_zero(const ModulusContext& ctx, const PrimePowerTable& table) {
  double acc = 0.0;
  for (auto p : ctx.prime_divisors()) {
    auto i = table.index_of(p);
    if (i) acc += table[*i].nu * table[*i].log_p;
  }
  return acc / 2.0;
}

double minus_gamma2_at_zero(const ModulusContext& ctx, const PrimePowerTable& table) {
  double acc = 0.0;
  for (auto p : ctx.prime_divisors()) {
    auto i = table.index_of(p);
    if (!i) continue;
    const double nu = table[*i].nu, lp = table[*i].log_p;
    acc += nu * (nu + 2.0) * lp * lp;
  }
  return acc / 12.0;
}

ArithmeticFactors arithmetic_factors(double s, const ModulusContext& ctx,
                                     const PrimePowerTable& table,
                                     std::optional<std::uint64_t> d) {
  require_positive(s, "arithmetic_factors");
  if (!ctx.largest_prime_within_y())
    throw PreconditionError("arithmetic factors require P+(q) <= y");
  ArithmeticFactors out;
  out.s = s;
  const double crossover = 1e-6;
  const bool near_zero = s * std::log(static_cast<double>(table.y())) < crossover;
  double log_g = 0.0, log_f = 0.0, g1 = 0.0, g2 = 0.0;
  for (auto p : ctx.prime_divisors()) {
    const auto& e = table[*table.index_of(p)];
    const double lp = e.log_p, n1 = e.nu + 1.0, t = s * lp;
    log_g += std::log(-std::expm1(-t)) - std::log(-std::expm1(-n1 * t));
    log_f += std::log(-std::expm1(-t));
    // gamma' = sum { log p/(p^s - 1) - (nu+1) log p/(p^{(nu+1)s} - 1) }
    g1 += e.nu * lp / 2.0 + lp * k_deriv(0, t) - n1 * lp * k_deriv(0, n1 * t);
    g2 += lp * lp * (k_deriv(1, t) - n1 * n1 * k_deriv(1, n1 * t));
  }
  if (near_zero) {
    g1 = gamma1_at_zero(ctx, table);
    g2 = -minus_gamma2_at_zero(ctx, table);
  }
  out.g_q = std::exp(log_g);
  out.f_q = std::exp(log_f);
  out.gamma1_q = g1;
  out.gamma2_q = g2;
  if (d) {
    if (*d == 0 || ctx.q() % *d != 0)
      throw InvalidArgument("h_d requires d | q, got d = " + std::to_string(*d));
    double log_h = 0.0;
    for (auto [p, k] : factorize(*d)) {
      if (k > 1) throw UnsupportedCase("h_d requires squarefree d, got " + std::to_string(*d));
      const auto& e = table[*table.index_of(p)];
      const double t = s * e.log_p;
      log_h += std::log(-std::expm1(-static_cast<double>(e.nu) * t)) - std::log(-std::expm1(-(e.nu + 1.0) * t));
    }
    out.h_d = std::exp(log_h);
  }
  return out;
}

double erfcx(double z) {
  if (std::isnan(z)) return z;
  if (z < 0) {
    // 2 e^{z^2} - erfcx(-z), with e^{z^2} split as exp(hi)(1 + lo)
    const double hi = z * z, lo = std::fma(z, z, -hi);
    return 2.0 * std::exp(hi) * (1.0 + lo) - erfcx(-z);
  }
  if (z < 10.0) {
    const double hi = z * z, lo = std::fma(z, z, -hi);
    return std::exp(hi) * (1.0 + lo) * std::erfc(z);
  }
  // Continued fraction e^{z^2} erfc z = (1/sqrt pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
  // evaluated from the tail.
  double tail = z;
  for (int k = 120; k >= 1; --k) tail = z + (k / 2.0) / tail;
  return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

double gaussian_g(double z) {
  if (!(z >= -10.0)) throw DomainError("G(z) is evaluated for z >= -10");
  return 0.5 * erfcx(z / std::numbers::sqrt2);
}

}  // namespace uf
