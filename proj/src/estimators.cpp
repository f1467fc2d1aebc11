#include "ufriable/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ufriable/errors.hpp"
#include "ufriable/saddle.hpp"

namespace uf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require(bool ok, const std::string& condition) {
  if (!ok) throw DomainError("precondition failed: " + condition);
}

// Shared x^beta Z_q(beta, y) G(beta sqrt(sigma_2)) evaluation.
EstimateBreakdown saddle_main(const CountBound& x, const PrimePowerTable& table,
                              const ModulusContext* ctx, const EstimatorConfig& config) {
  const double log_x = x.log();
  const auto regime = classify_regime(log_x, table, config.epsilon);
  require(regime.small_y, "2 log x < psi(y) (psi(y) = " + fmt(table.psi()) +
                              ", log x = " + fmt(log_x) + ")");
  const auto beta = solve_beta(log_x, table, nullptr);
  const double sigma2 = beta.sigma_at(2);

  EstimateBreakdown out;
  out.beta = beta.sigma;
  out.sigma2 = sigma2;
  out.factors["x_pow_beta"] = beta.sigma * log_x;
  out.factors["Z_q_beta"] = log_z_q(beta.sigma, table, ctx);
  out.factors["G_factor"] = std::log(gaussian_g(beta.sigma * std::sqrt(sigma2)));
  out.factors["correction_T1iii"] = 0.0;
  out.diagnostics["saddle_residual"] = beta.residual;
  if (log_x > 0 && table.psi() > std::pow(log_x, 3.0))
    out.flags.push_back("psi(y) exceeds (log x)^3");
  return out;
}

void finish(EstimateBreakdown& out) {
  double sum = 0.0;
  for (const auto& [name, v] : out.factors) sum += v;
  out.log_main = sum;
}

double log_h_d(double s, std::uint64_t d, const PrimePowerTable& table) {
  double acc = 0.0;
  for (auto [p, k] : factorize(d)) {
    const auto& e = table[*table.index_of(p)];
    if (s == 0.0) {
      acc += std::log(e.nu / (e.nu + 1.0));
      continue;
    }
    const double t = s * e.log_p;
    acc += std::log(std::expm1(-static_cast<double>(e.nu) * t) / std::expm1(-(e.nu + 1.0) * t));
  }
  return acc;
}

// T4-style budgets: e^{-c1 u / (log u)^4} + 1 / Y_eps.
double t4_budget(double u, double y, const EstimatorConfig& config) {
  const double lu = std::log(u);
  const double lu4 = lu * lu * lu * lu;
  return std::exp(-config.c1 * u / lu4) + std::exp(-log_y_eps(y, config.epsilon));
}

void check_t4_modulus(EstimateBreakdown& out, std::uint64_t q, double y,
                      const EstimatorConfig& config) {
  const double ly = std::log(y);
  const double limit = std::exp(ly * config.c0 / std::log(ly));
  if (static_cast<double>(q) > limit)
    out.flags.push_back("q exceeds y^{c0 / log log y} = " + fmt(limit));
}

}  // namespace

const char* theorem_name(Theorem t) {
  switch (t) {
    case Theorem::T1i: return "T1i";
    case Theorem::T1ii: return "T1ii";
    case Theorem::T1iii: return "T1iii";
    case Theorem::T2: return "T2";
    case Theorem::T3: return "T3";
    case Theorem::T4: return "T4";
    case Theorem::T5: return "T5";
    case Theorem::R6: return "R6";
    case Theorem::REMC: return "REMC";
  }
  return "?";
}

std::optional<Theorem> parse_theorem(const std::string& name) {
  for (auto t : {Theorem::T1i, Theorem::T1ii, Theorem::T1iii, Theorem::T2, Theorem::T3,
                 Theorem::T4, Theorem::T5, Theorem::R6, Theorem::REMC})
    if (name == theorem_name(t)) return t;
  return std::nullopt;
}

double log_big(const BigInt& n) {
  if (n <= 0) return -std::numeric_limits<double>::infinity();
  using boost::multiprecision::cpp_bin_float_50;
  return static_cast<double>(boost::multiprecision::log(cpp_bin_float_50(n)));
}

double log_y_eps(double y, double epsilon) { return std::pow(std::log(y), 1.5 - epsilon); }
double log_l_eps(double y, double epsilon) { return std::pow(std::log(y), 0.6 - epsilon); }

double delta_q_small_y(double log_x, double log_y, double theta_q, double eta) {
  if (!(eta > 0) || !(theta_q > 0)) return kNaN;
  return std::pow(log_x, theta_q) / log_y * (1.0 + 1.0 / (theta_q * std::log1p(eta)));
}

double delta_q_large_y(double log_x, double log_y, double theta_q) {
  const double u = log_x / log_y;
  const double l2u = std::log(2.0 * u);
  if (!(l2u > 0)) return kNaN;
  return theta_q * std::pow(u * l2u, theta_q) / (1.0 + theta_q * l2u);
}

ErrorBudget error_budget(const CountBound& x, const PrimePowerTable& table,
                         const ModulusContext& ctx, const EstimatorConfig& config) {
  ErrorBudget b;
  const double log_x = x.log();
  const double log_y = std::log(static_cast<double>(table.y()));
  b.regime = classify_regime(log_x, table, config.epsilon);
  b.u = log_x / log_y;
  b.eta = table.psi() / log_x - 2.0;
  b.theta_q = ctx.theta_q();
  b.omega_q = ctx.omega();

  const double first = delta_q_small_y(log_x, log_y, b.theta_q, b.eta);
  const double second = delta_q_large_y(log_x, log_y, b.theta_q);
  const bool use_first = 2.0 * log_x < table.psi() && table.psi() <= log_x * log_x;
  b.delta_branch = use_first ? 1 : 2;
  b.delta_q = use_first ? first : second;
  b.delta_q_other = use_first ? second : first;

  const double w = b.omega_q;
  b.dd_q = std::min(w, b.delta_q);
  b.cc_q = std::min(w, b.delta_q * b.delta_q);
  if (b.omega_q == 0) b.dd_q = b.cc_q = 0.0;

  const double su = std::sqrt(b.u);
  b.nominal_bound = (1.0 + b.dd_q * b.dd_q) / b.u + b.dd_q * (1.0 + b.eta) / (su + b.eta * b.u);
  return b;
}

EstimateBreakdown estimate_upsilon(const CountBound& x, const PrimePowerTable& table,
                                   const EstimatorConfig& config) {
  auto out = saddle_main(x, table, nullptr, config);
  finish(out);
  const auto one = ModulusContext::make(1, table);
  out.budget = error_budget(x, table, one, config);
  out.budget.nominal_bound = 1.0 / out.budget.u;
  out.theorem = Theorem::T1i;
  return out;
}

EstimateBreakdown estimate_upsilon_q(const CountBound& x, const PrimePowerTable& table,
                                     const ModulusContext& ctx, Theorem variant,
                                     const EstimatorConfig& config) {
  if (variant != Theorem::T1i && variant != Theorem::T1ii && variant != Theorem::T1iii &&
      variant != Theorem::REMC)
    throw InvalidArgument(std::string("estimate_upsilon_q: unsupported variant ") +
                          theorem_name(variant));
  if (!ctx.largest_prime_within_y()) throw PreconditionError("P+(q) <= y required");

  auto budget = error_budget(x, table, ctx, config);
  const double u = budget.u, eta = budget.eta, w = budget.omega_q;
  const double log_y = std::log(static_cast<double>(table.y()));
  const double su = std::sqrt(u);

  switch (variant) {
    case Theorem::T1ii:
      require(eta <= 0.5, "eta <= 1/2 (eta = " + fmt(eta) + ")");
      break;
    case Theorem::T1iii:
      require(eta * su < config.t1iii_threshold,
              "eta sqrt(u) < " + fmt(config.t1iii_threshold) + " (got " + fmt(eta * su) + ")");
      break;
    case Theorem::REMC:
      require(budget.regime.large_y, "y >= (log x)^{2+eps}");
      break;
    default: break;
  }

  auto out = saddle_main(x, table, &ctx, config);
  const auto arith = arithmetic_factors(out.beta, ctx, table);
  out.diagnostics["g_q_beta"] = arith.g_q;

  switch (variant) {
    case Theorem::T1i:
      break;
    case Theorem::T1ii:
      budget.nominal_bound = (1.0 + w * w) / u + w * (1.0 + eta) / (su + eta * u);
      break;
    case Theorem::T1iii:
      out.factors["correction_T1iii"] = std::log1p(w / std::sqrt(std::numbers::pi * u));
      // The trailing 1/u is carried over from the q = 1 main term.
      budget.nominal_bound = eta * w + std::log(static_cast<double>(ctx.q())) / (su * log_y) +
                           w * w / u + 1.0 / u;
      break;
    case Theorem::REMC: {
      const double y = static_cast<double>(table.y());
      budget.nominal_bound = static_cast<double>(ctx.q()) * u * std::log(2.0 * u) /
                               (static_cast<double>(ctx.phi()) * std::sqrt(y) * log_y) +
                           1.0 / u;
      if (w > std::sqrt(y) / log_y) out.flags.push_back("omega(q) exceeds sqrt(y)/log y");
      break;
    }
    default: break;
  }
  finish(out);
  // Same main term through g_q(beta) times the q = 1 estimate.
  out.diagnostics["log_main_via_g_q"] = std::log(arith.g_q) + out.factors["x_pow_beta"] +
                                        log_z_q(out.beta, table, nullptr) +
                                        out.factors["G_factor"] + out.factors["correction_T1iii"];
  out.budget = budget;
  out.theorem = variant;
  return out;
}

EstimateBreakdown estimate_t2(const CountBound& x, const PrimePowerTable& table,
                              const ModulusContext& ctx, const EstimatorConfig& config) {
  if (!ctx.largest_prime_within_y()) throw PreconditionError("P+(q) <= y required");
  auto budget = error_budget(x, table, ctx, config);
  require(budget.regime.large_y, "y >= (log x)^{2+eps}");
  require(x.log() >= std::log(static_cast<double>(table.y())), "x >= y");

  EstimateBreakdown out;
  const auto psi_q_count = count_friable(x, table.y(), ctx.q(), config.limits);
  out.factors["Psi_q"] = log_big(psi_q_count.value);
  finish(out);

  const double y = static_cast<double>(table.y());
  const double log_y = std::log(y);
  const double u = budget.u;
  budget.nominal_bound = static_cast<double>(ctx.q()) * u * std::log(2.0 * u) /
                       (static_cast<double>(ctx.phi()) * std::sqrt(y) * log_y);
  if (ctx.omega() > std::sqrt(y)) out.flags.push_back("omega(q) exceeds sqrt(y)");

  const auto alpha = solve_alpha(x.log(), table);
  out.diagnostics["alpha"] = alpha.sigma;
  out.diagnostics["tail_sum"] = friable_tail_sum(alpha.sigma, table, ctx);
  out.budget = budget;
  out.theorem = Theorem::T2;
  out.beta = kNaN;
  out.sigma2 = kNaN;
  return out;
}

EstimateBreakdown estimate_progression(const CountBound& x, const PrimePowerTable& table,
                                       const ModulusContext& ctx, std::uint64_t a,
                                       Theorem variant, const EstimatorConfig& config) {
  if (variant != Theorem::T4 && variant != Theorem::T5)
    throw InvalidArgument(std::string("estimate_progression: unsupported variant ") +
                          theorem_name(variant));
  const std::uint64_t q = ctx.q();
  if (std::gcd(a % q, q) != 1)
    throw DomainError("estimate_progression requires (a, q) = 1; use estimate_noncoprime");
  if (!ctx.largest_prime_within_y()) throw PreconditionError("P+(q) <= y required");

  auto budget = error_budget(x, table, ctx, config);
  const double y = static_cast<double>(table.y());
  const double log_y = std::log(y);
  EstimateBreakdown out;
  if (variant == Theorem::T4) {
    require(budget.regime.small_y, "2 log x < psi(y)");
    check_t4_modulus(out, q, y, config);
    budget.nominal_bound = t4_budget(budget.u, y, config);
  } else {
    require(budget.regime.large_y, "y >= (log x)^{2+eps}");
    require(static_cast<double>(q) <= std::sqrt(y), "q <= sqrt(y)");
    budget.nominal_bound =
        std::log(static_cast<double>(q)) / (std::pow(budget.u, config.c2) * log_y) + 1.0 / log_y;
  }
  const auto upsilon_q = count_ultrafriable(x, table, ctx, config.limits);
  out.factors["Upsilon_q"] = log_big(upsilon_q.value);
  out.factors["inv_phi_q"] = -std::log(static_cast<double>(ctx.phi()));
  finish(out);
  out.budget = budget;
  out.theorem = variant;
  out.beta = kNaN;
  out.sigma2 = kNaN;
  return out;
}

EstimateBreakdown estimate_noncoprime(const CountBound& x, const PrimePowerTable& table,
                                      std::uint64_t q, std::uint64_t a,
                                      const EstimatorConfig& config) {
  if (q == 0) throw InvalidArgument("q must be positive");
  const std::uint64_t d = std::gcd(a % q, q);
  const auto ctx = ModulusContext::make(q, table);
  if (!ctx.largest_prime_within_y()) throw PreconditionError("P+(q) <= y required");
  if (d == 1) {
    auto out = estimate_progression(x, table, ctx, a, Theorem::T4, config);
    out.theorem = Theorem::R6;
    return out;
  }
  for (auto [p, k] : factorize(d))
    if (k > 1) throw UnsupportedCase("(a, q) = " + std::to_string(d) + " is not squarefree");
  const std::uint64_t qd = q / d;
  if (std::gcd(qd, d) != 1)
    throw UnsupportedCase("(q/d, d) = " + std::to_string(std::gcd(qd, d)) + " > 1");

  auto budget = error_budget(x, table, ctx, config);
  const double y = static_cast<double>(table.y());
  const double log_x = x.log();
  EstimateBreakdown out;
  SaddleResult beta;
  if (budget.regime.small_y) {
    beta = solve_beta(log_x, table);
  } else {
    out.flags.push_back("2 log x >= psi(y): saddle continued by divisor reflection");
    beta = solve_beta_reflected(log_x, table);
  }
  check_t4_modulus(out, q, y, config);
  budget.nominal_bound = t4_budget(budget.u, y, config);

  const auto ctx_qd = ModulusContext::make(qd, table);
  const auto upsilon = count_ultrafriable(x.divided_by(d), table, ctx_qd, config.limits);
  out.factors["h_d_beta"] = log_h_d(beta.sigma, d, table);
  out.factors["Upsilon_q_over_d"] = log_big(upsilon.value);
  out.factors["inv_phi_q_over_d"] = -std::log(static_cast<double>(ctx_qd.phi()));
  finish(out);
  out.diagnostics["d"] = static_cast<double>(d);
  out.beta = beta.sigma;
  out.sigma2 = beta.sigma_at(2);
  out.budget = budget;
  out.theorem = Theorem::R6;
  return out;
}

T3Bound t3_bound_values(double u, double log_y, const EstimatorConfig& config) {
  T3Bound b;
  const double lu = std::log(u);
  const double inv_y = std::exp(-std::pow(log_y, 1.5 - config.epsilon));
  b.theta0 = std::exp(-config.c1 * u) + inv_y;
  b.theta1 = std::exp(-config.c1 * u / (1.0 + lu * lu * lu * lu)) + inv_y;
  return b;
}

T3Bound t3_bound(const CountBound& x, const PrimePowerTable& table, const ModulusContext& ctx,
                 const DirichletCharacter& chi, const EstimatorConfig& config) {
  if (chi.is_principal()) throw DomainError("t3_bound requires a nonprincipal character");
  if (chi.modulus() != ctx.q()) throw InvalidArgument("character modulus differs from q");
  const auto regime = classify_regime(x.log(), table, config.epsilon);
  require(regime.small_y, "2 log x < psi(y)");
  auto b = t3_bound_values(regime.u, std::log(static_cast<double>(table.y())), config);
  const auto counts = count_ultrafriable_residues(x, table, ctx.q(), config.limits);
  const double total = static_cast<double>(counts.coprime_total());
  b.exact_ratio = total > 0 ? std::abs(character_sum(counts, chi)) / total : 0.0;
  return b;
}

ComparisonRecord compare(const BigInt& exact, const EstimateBreakdown& est) {
  ComparisonRecord r;
  r.exact_text = exact.str();
  r.log_main = est.log_main;
  r.budget = est.budget.nominal_bound;
  if (exact <= 0) {
    r.degenerate = true;
    r.log_exact = -std::numeric_limits<double>::infinity();
    r.rel_error = kNaN;
    r.error_over_budget = kNaN;
    return r;
  }
  r.log_exact = log_big(exact);
  r.rel_error = -std::expm1(est.log_main - r.log_exact);
  r.error_over_budget = std::abs(r.rel_error) / r.budget;
  return r;
}

double friable_tail_sum(double alpha, const PrimePowerTable& table, const ModulusContext& ctx) {
  double acc = 0.0;
  for (std::size_t i = table.size(); i-- > 0;) {
    const auto& e = table[i];
    if (ctx.divisible_by(e.p)) continue;
    acc += std::exp(-(e.nu + 1.0) * alpha * e.log_p);
  }
  return acc;
}

}  // namespace uf
