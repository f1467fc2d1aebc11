#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>

#include "ufriable/prime_core.hpp"

namespace uf {

// xi(v): the positive root of e^xi = 1 + v xi for v > 1, with xi(1) = 0.
double xi(double v);

enum class SaddleKind { Alpha, Beta };

struct SaddleResult {
  SaddleKind kind = SaddleKind::Beta;
  double sigma = 0.0;
  // |equation mismatch| / log x at sigma.
  double residual = 0.0;
  // Logarithmic-derivative values for j = 2, 3, 4 at sigma. For Beta these
  // are sigma_{j,q}; for Alpha the matching derivatives of the alpha sum.
  std::array<double, 3> sigma_j{};
  int iterations = 0;

  double sigma_at(int j) const { return sigma_j.at(static_cast<std::size_t>(j - 2)); }
};

// phi_{j,q}(s, y) = (-1)^j d^j/ds^j log Z_q(s, y), 1 <= j <= 4, s > 0.
// Pass ctx == nullptr for q = 1.
double phi_j_q(int j, double s, const PrimePowerTable& table, const ModulusContext* ctx = nullptr);

// Same quantity summed from the double series
// sum_p sum_k k^{j-1} (log p)^j [p^{-ks} - (nu_p+1)^j p^{-(nu_p+1)ks}].
// Loses accuracy as s log p -> 0; kept as an independent cross-check.
double phi_j_q_series(int j, double s, const PrimePowerTable& table,
                      const ModulusContext* ctx = nullptr);

// The left side of the saddle equation for beta, in its closed form
// sum_p { log p / (p^s - 1) - (nu_p + 1) log p / (p^{(nu_p+1)s} - 1) }.
double phi1_closed_form(double s, const PrimePowerTable& table,
                        const ModulusContext* ctx = nullptr);

// sum_{p <= y} log p / (p^s - 1) and its (-1)^{j-1} (j-1)-th derivatives.
double alpha_sum(int j, double s, const PrimePowerTable& table);

// beta(x, y): phi_1(beta, y) = log x. Requires psi(y) > 2 log x. The
// sigma_j are taken for the modulus in ctx (q = 1 when null).
SaddleResult solve_beta(double log_x, const PrimePowerTable& table,
                        const ModulusContext* ctx = nullptr);

// beta continued to psi(y)/2 <= log x <= psi(y) - log 2 through the
// reflection log Z(-s, y) = s log N_y + log Z(s, y): returns
// -beta(N_y / x, y), with sigma_j(-s) = (-1)^j sigma_j(s). q = 1 only.
SaddleResult solve_beta_reflected(double log_x, const PrimePowerTable& table);

// alpha(x, y): sum_{p <= y} log p / (p^alpha - 1) = log x.
SaddleResult solve_alpha(double log_x, const PrimePowerTable& table);

// log Z_q(s, y), principal branch, Re s > 0.
std::complex<double> log_z_q(std::complex<double> s, const PrimePowerTable& table,
                             const ModulusContext* ctx = nullptr);
double log_z_q(double s, const PrimePowerTable& table, const ModulusContext* ctx = nullptr);

struct ArithmeticFactors {
  double s = 0.0;
  double g_q = 1.0;
  double gamma1_q = 0.0;  // d/ds log g_q
  double gamma2_q = 0.0;  // d^2/ds^2 log g_q
  double f_q = 1.0;
  std::optional<double> h_d;
};

// g_q, f_q, gamma_q', gamma_q'' and, when d is given, h_d at a real s > 0.
// d must be squarefree and divide q.
ArithmeticFactors arithmetic_factors(double s, const ModulusContext& ctx,
                                     const PrimePowerTable& table,
                                     std::optional<std::uint64_t> d = std::nullopt);

// Limits of gamma_q'(s) and -gamma_q''(s) as s -> 0+.
double gamma1_at_zero(const ModulusContext& ctx, const PrimePowerTable& table);
double minus_gamma2_at_zero(const ModulusContext& ctx, const PrimePowerTable& table);

// e^{z^2} erfc(z).
double erfcx(double z);

// G(z) = e^{z^2/2} Phi(z), Phi the upper Gaussian tail. z >= -10.
double gaussian_g(double z);

}  // namespace uf
