#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ufriable/bound.hpp"
#include "ufriable/characters.hpp"
#include "ufriable/exact_counts.hpp"
#include "ufriable/prime_core.hpp"

namespace uf {

// Constants the asymptotic statements leave unspecified, with their defaults.
struct EstimatorConfig {
  double epsilon = 0.1;
  double c0 = 0.25;
  double c1 = 0.1;
  double c2 = 0.1;
  // T1iii applies while eta * sqrt(u) stays below this.
  double t1iii_threshold = 0.2;
  CountLimits limits{};
};

enum class Theorem { T1i, T1ii, T1iii, T2, T3, T4, T5, R6, REMC };

const char* theorem_name(Theorem t);
std::optional<Theorem> parse_theorem(const std::string& name);

struct ErrorBudget {
  double u = 0.0;
  double eta = 0.0;
  double theta_q = 0.0;
  int omega_q = 0;
  // Delta_q from the selected branch (1 or 2), and the other branch's value
  // (NaN where that branch is undefined).
  double delta_q = 0.0;
  int delta_branch = 2;
  double delta_q_other = 0.0;
  double dd_q = 0.0;  // D_q = min(omega(q), Delta_q)
  double cc_q = 0.0;  // C_q = min(omega(q), Delta_q^2)
  double nominal_bound = 0.0;
  RegimeTag regime;
};

struct EstimateBreakdown {
  // log of the main term; equals the sum of `factors`.
  double log_main = 0.0;
  std::map<std::string, double> factors;
  // Values reported alongside, not part of the product.
  std::map<std::string, double> diagnostics;
  ErrorBudget budget;
  Theorem theorem = Theorem::T1i;
  double beta = 0.0;
  double sigma2 = 0.0;
  // Soft hypotheses that do not hold at this point (reported, not enforced).
  std::vector<std::string> flags;
};

struct ComparisonRecord {
  bool degenerate = false;
  std::string exact_text;
  double log_exact = 0.0;
  double log_main = 0.0;
  // (exact - main) / exact
  double rel_error = 0.0;
  double budget = 0.0;
  double error_over_budget = 0.0;
};

// First branch of Delta_q (valid for 2 log x < psi(y)).
double delta_q_small_y(double log_x, double log_y, double theta_q, double eta);
// Second branch of Delta_q (valid for y > (log x)^2).
double delta_q_large_y(double log_x, double log_y, double theta_q);

ErrorBudget error_budget(const CountBound& x, const PrimePowerTable& table,
                         const ModulusContext& ctx, const EstimatorConfig& config = {});

// x^beta Z(beta, y) G(beta sqrt(sigma_2)).
EstimateBreakdown estimate_upsilon(const CountBound& x, const PrimePowerTable& table,
                                   const EstimatorConfig& config = {});

// Variants T1i, T1ii, T1iii, REMC of the Upsilon_q main term.
EstimateBreakdown estimate_upsilon_q(const CountBound& x, const PrimePowerTable& table,
                                     const ModulusContext& ctx, Theorem variant,
                                     const EstimatorConfig& config = {});

// Upsilon_q ~ Psi_q with the exact Psi_q as main term.
EstimateBreakdown estimate_t2(const CountBound& x, const PrimePowerTable& table,
                              const ModulusContext& ctx, const EstimatorConfig& config = {});

// Upsilon(x, y; a, q) ~ Upsilon_q(x, y) / phi(q), variant T4 or T5.
EstimateBreakdown estimate_progression(const CountBound& x, const PrimePowerTable& table,
                                       const ModulusContext& ctx, std::uint64_t a,
                                       Theorem variant, const EstimatorConfig& config = {});

// (a, q) = d > 1: h_d(beta) Upsilon_{q/d}(x/d, y) / phi(q/d).
EstimateBreakdown estimate_noncoprime(const CountBound& x, const PrimePowerTable& table,
                                      std::uint64_t q, std::uint64_t a,
                                      const EstimatorConfig& config = {});

struct T3Bound {
  double theta0 = 0.0;  // e^{-c1 u} + 1/Y_eps
  double theta1 = 0.0;  // e^{-c1 u / (1 + (log u)^4)} + 1/Y_eps
  double exact_ratio = 0.0;  // |Upsilon(x, y; chi)| / Upsilon_q(x, y)
};

T3Bound t3_bound(const CountBound& x, const PrimePowerTable& table, const ModulusContext& ctx,
                 const DirichletCharacter& chi, const EstimatorConfig& config = {});
// Bound values only, for a given u.
T3Bound t3_bound_values(double u, double log_y, const EstimatorConfig& config = {});

ComparisonRecord compare(const BigInt& exact, const EstimateBreakdown& est);

// log Y_eps(y) = (log y)^{3/2 - eps}.
double log_y_eps(double y, double epsilon);
// log L_eps(y) = (log y)^{3/5 - eps}.
double log_l_eps(double y, double epsilon);

// sum_{p <= y, p !| q} p^{-(nu_p + 1) alpha}: the tail controlling
// Psi_q - Upsilon_q.
double friable_tail_sum(double alpha, const PrimePowerTable& table, const ModulusContext& ctx);

// log of a positive big integer.
double log_big(const BigInt& n);

}  // namespace uf
