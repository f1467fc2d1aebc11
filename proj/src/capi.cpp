#include "ufriable/ufriable.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ufriable/calibration.hpp"
#include "ufriable/characters.hpp"
#include "ufriable/errors.hpp"
#include "ufriable/estimators.hpp"
#include "ufriable/exact_counts.hpp"
#include "ufriable/saddle.hpp"

struct uf_table {
  uf::PrimePowerTable table;
};

struct uf_modulus {
  uf::ModulusContext ctx;
};

struct uf_character_set {
  std::uint64_t q;
  std::vector<uf::DirichletCharacter> chars;
};

namespace {

thread_local std::string g_last_error;

uf_status fail(uf_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
uf_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return UF_OK;
  } catch (const uf::Error& e) {
    return fail(static_cast<uf_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(UF_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(UF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UF_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (!p) throw uf::InvalidArgument(std::string(name) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_name(char* dst, std::size_t n, const char* src) {
  std::strncpy(dst, src, n - 1);
  dst[n - 1] = '\0';
}

uf::CountBound bound(const char* x) {
  need(x, "x");
  return uf::CountBound::parse(x);
}

uf::EstimatorConfig to_config(const uf_config* c) {
  uf::EstimatorConfig cfg;
  if (!c) return cfg;
  cfg.epsilon = c->epsilon;
  cfg.c0 = c->c0;
  cfg.c1 = c->c1;
  cfg.c2 = c->c2;
  cfg.t1iii_threshold = c->t1iii_threshold;
  cfg.limits.jobs = c->jobs == 0 ? 1 : c->jobs;
  for (double v : {cfg.epsilon, cfg.c0, cfg.c1, cfg.c2, cfg.t1iii_threshold})
    if (!(v > 0) || !std::isfinite(v))
      throw uf::InvalidArgument("configuration constants must be positive");
  return cfg;
}

uf::Theorem variant_of(const char* name) {
  need(name, "variant");
  auto t = uf::parse_theorem(name);
  if (!t || *t == uf::Theorem::T3)
    throw uf::InvalidArgument(std::string("unknown estimate variant '") + name + "'");
  return *t;
}

void fill_budget(const uf::ErrorBudget& b, uf_budget* out) {
  out->u = b.u;
  out->eta = b.eta;
  out->theta_q = b.theta_q;
  out->omega_q = b.omega_q;
  out->delta_q = b.delta_q;
  out->delta_branch = b.delta_branch;
  out->delta_q_other = b.delta_q_other;
  out->dd_q = b.dd_q;
  out->cc_q = b.cc_q;
  out->nominal_bound = b.nominal_bound;
  copy_name(out->regime, sizeof out->regime, b.regime.name());
}

const uf::DirichletCharacter& character(const uf_character_set* set, std::size_t index) {
  need(set, "set");
  if (index >= set->chars.size()) throw uf::InvalidArgument("character index out of range");
  return set->chars[index];
}

}  // namespace

extern "C" {

const char* uf_version(void) { return "1.0.0"; }

const char* uf_last_error(void) { return g_last_error.c_str(); }

const char* uf_status_name(uf_status status) {
  switch (status) {
    case UF_OK: return "ok";
    case UF_ERR_DOMAIN: return "domain";
    case UF_ERR_RESOURCE: return "resource";
    case UF_ERR_PRECONDITION: return "precondition";
    case UF_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case UF_ERR_UNSUPPORTED: return "unsupported";
    case UF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void uf_free_string(char* s) { std::free(s); }

uf_status uf_table_create(uint64_t y, uf_table** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new uf_table{uf::PrimePowerTable::build(y)};
  });
}

void uf_table_destroy(uf_table* table) { delete table; }

uint64_t uf_table_y(const uf_table* table) { return table ? table->table.y() : 0; }

size_t uf_table_size(const uf_table* table) { return table ? table->table.size() : 0; }

double uf_table_psi(const uf_table* table) {
  return table ? table->table.psi() : std::numeric_limits<double>::quiet_NaN();
}

uf_status uf_table_entry(const uf_table* table, size_t index, uint64_t* p, uint32_t* nu) {
  return guarded([&] {
    need(table, "table");
    if (index >= table->table.size()) throw uf::InvalidArgument("table index out of range");
    const auto& e = table->table[index];
    if (p) *p = e.p;
    if (nu) *nu = e.nu;
  });
}

uf_status uf_modulus_create(const uf_table* table, uint64_t q, uf_modulus** out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    *out = nullptr;
    if (q == 0) throw uf::InvalidArgument("q must be positive");
    *out = new uf_modulus{uf::ModulusContext::make(q, table->table)};
  });
}

void uf_modulus_destroy(uf_modulus* modulus) { delete modulus; }

uf_status uf_modulus_get_info(const uf_modulus* modulus, uf_modulus_info* out) {
  return guarded([&] {
    need(modulus, "modulus");
    need(out, "out");
    const auto& c = modulus->ctx;
    out->q = c.q();
    out->phi = c.phi();
    out->z_q = c.z_q();
    out->omega = c.omega();
    out->theta_q = c.theta_q();
    out->largest_prime_within_y = c.largest_prime_within_y() ? 1 : 0;
  });
}

uf_status uf_parse_log_x(const char* x, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = bound(x).log();
  });
}

uf_status uf_classify_regime(const char* x, const uf_table* table, double epsilon,
                             uf_regime* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    const auto r = uf::classify_regime(bound(x).log(), table->table, epsilon);
    out->small_y = r.small_y;
    out->large_y = r.large_y;
    out->eta = r.eta;
    out->u = r.u;
    out->log_x = r.log_x;
    copy_name(out->name, sizeof out->name, r.name());
  });
}

uf_status uf_tau_n(const uf_table* table, const uf_modulus* modulus, char** out) {
  return guarded([&] {
    need(table, "table");
    need(modulus, "modulus");
    need(out, "out");
    *out = dup(uf::tau_n(table->table, modulus->ctx).str());
  });
}

uf_status uf_count_ultrafriable(const char* x, const uf_table* table, const uf_modulus* modulus,
                                unsigned jobs, char** out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    uf::CountLimits limits;
    limits.jobs = jobs == 0 ? 1 : jobs;
    const auto ctx = modulus ? modulus->ctx : uf::ModulusContext::make(1, table->table);
    *out = dup(uf::count_ultrafriable(bound(x), table->table, ctx, limits).value.str());
  });
}

uf_status uf_count_ultrafriable_residues(const char* x, const uf_table* table, uint64_t q,
                                         char** out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    const auto v = uf::count_ultrafriable_residues(bound(x), table->table, q);
    std::string s;
    for (std::size_t i = 0; i < v.counts.size(); ++i) {
      if (i) s += '\n';
      s += v.counts[i].str();
    }
    *out = dup(s);
  });
}

uf_status uf_count_friable(const char* x, uint64_t y, uint64_t q, char** out) {
  return guarded([&] {
    need(out, "out");
    *out = dup(uf::count_friable(bound(x), y, q).value.str());
  });
}

uf_status uf_count_friable_progression(const char* x, uint64_t y, uint64_t a, uint64_t q,
                                       char** out) {
  return guarded([&] {
    need(out, "out");
    *out = dup(uf::count_friable_progression(bound(x), y, a, q).value.str());
  });
}

uf_status uf_naive_count(uint64_t x, uint64_t y, int ultrafriable, uint64_t q, int64_t a,
                         uint64_t* out) {
  return guarded([&] {
    need(out, "out");
    std::optional<std::uint64_t> oq, oa;
    if (q > 0) oq = q;
    if (q > 0 && a >= 0) oa = static_cast<std::uint64_t>(a);
    const auto mode = ultrafriable ? uf::CountMode::Ultrafriable : uf::CountMode::Friable;
    *out = static_cast<uint64_t>(uf::naive_oracle(x, y, mode, oq, oa).value);
  });
}

static void fill_saddle(const uf::SaddleResult& r, uf_saddle* out) {
  out->sigma = r.sigma;
  out->residual = r.residual;
  out->sigma2 = r.sigma_at(2);
  out->sigma3 = r.sigma_at(3);
  out->sigma4 = r.sigma_at(4);
  out->iterations = r.iterations;
}

uf_status uf_solve_beta(const char* x, const uf_table* table, const uf_modulus* modulus,
                        uf_saddle* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    fill_saddle(uf::solve_beta(bound(x).log(), table->table, modulus ? &modulus->ctx : nullptr),
                out);
  });
}

uf_status uf_solve_alpha(const char* x, const uf_table* table, uf_saddle* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    fill_saddle(uf::solve_alpha(bound(x).log(), table->table), out);
  });
}

uf_status uf_log_z(double s, const uf_table* table, const uf_modulus* modulus, double* out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    *out = uf::log_z_q(s, table->table, modulus ? &modulus->ctx : nullptr);
  });
}

uf_status uf_xi(double v, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uf::xi(v);
  });
}

uf_status uf_gaussian_g(double z, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = uf::gaussian_g(z);
  });
}

void uf_config_default(uf_config* out) {
  if (!out) return;
  const uf::EstimatorConfig d;
  out->epsilon = d.epsilon;
  out->c0 = d.c0;
  out->c1 = d.c1;
  out->c2 = d.c2;
  out->t1iii_threshold = d.t1iii_threshold;
  out->jobs = d.limits.jobs;
}

uf_status uf_estimate_main(const char* x, const uf_table* table, uint64_t q, uint64_t a,
                           const char* variant, const uf_config* config, uf_estimate* out,
                           char** flags) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    if (flags) *flags = nullptr;
    if (q == 0) throw uf::InvalidArgument("q must be positive");
    const auto xb = bound(x);
    const auto cfg = to_config(config);
    const auto t = variant_of(variant);
    const auto& tab = table->table;
    uf::EstimateBreakdown est;
    switch (t) {
      case uf::Theorem::T2:
        est = uf::estimate_t2(xb, tab, uf::ModulusContext::make(q, tab), cfg);
        break;
      case uf::Theorem::T4:
      case uf::Theorem::T5:
        est = uf::estimate_progression(xb, tab, uf::ModulusContext::make(q, tab), a, t, cfg);
        break;
      case uf::Theorem::R6:
        est = uf::estimate_noncoprime(xb, tab, q, a, cfg);
        break;
      default:
        est = uf::estimate_upsilon_q(xb, tab, uf::ModulusContext::make(q, tab), t, cfg);
        break;
    }
    out->log_main = est.log_main;
    out->beta = est.beta;
    out->sigma2 = est.sigma2;
    copy_name(out->theorem, sizeof out->theorem, uf::theorem_name(est.theorem));
    fill_budget(est.budget, &out->budget);
    out->flag_count = static_cast<int>(est.flags.size());
    if (flags) {
      std::string s;
      for (std::size_t i = 0; i < est.flags.size(); ++i) {
        if (i) s += '\n';
        s += est.flags[i];
      }
      *flags = dup(s);
    }
  });
}

uf_status uf_exact_for_variant(const char* x, const uf_table* table, uint64_t q, uint64_t a,
                               const char* variant, unsigned jobs, char** out) {
  return guarded([&] {
    need(table, "table");
    need(out, "out");
    if (q == 0) throw uf::InvalidArgument("q must be positive");
    const auto xb = bound(x);
    const auto t = variant_of(variant);
    uf::CountLimits limits;
    limits.jobs = jobs == 0 ? 1 : jobs;
    const auto& tab = table->table;
    uf::BigInt value;
    if (t == uf::Theorem::T4 || t == uf::Theorem::T5 || t == uf::Theorem::R6) {
      value = uf::count_ultrafriable_residues(xb, tab, q, limits).counts[a % q];
    } else {
      value = uf::count_ultrafriable(xb, tab, uf::ModulusContext::make(q, tab), limits).value;
    }
    *out = dup(value.str());
  });
}

uf_status uf_compare(const char* exact, const uf_estimate* estimate, uf_comparison* out) {
  return guarded([&] {
    need(exact, "exact");
    need(estimate, "estimate");
    need(out, "out");
    uf::BigInt n;
    try {
      n = uf::BigInt(std::string(exact));
    } catch (const std::exception&) {
      throw uf::InvalidArgument(std::string("exact count is not an integer: ") + exact);
    }
    uf::EstimateBreakdown est;
    est.log_main = estimate->log_main;
    est.budget.nominal_bound = estimate->budget.nominal_bound;
    const auto r = uf::compare(n, est);
    out->degenerate = r.degenerate;
    out->log_exact = r.log_exact;
    out->log_main = r.log_main;
    out->rel_error = r.rel_error;
    out->budget = r.budget;
    out->error_over_budget = r.error_over_budget;
  });
}

uf_status uf_characters_create(uint64_t q, uf_character_set** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    *out = new uf_character_set{q, uf::enumerate_characters(q)};
  });
}

void uf_characters_destroy(uf_character_set* set) { delete set; }

size_t uf_characters_count(const uf_character_set* set) { return set ? set->chars.size() : 0; }

uf_status uf_character_get_info(const uf_character_set* set, size_t index,
                                uf_character_info* out) {
  return guarded([&] {
    need(out, "out");
    const auto& chi = character(set, index);
    out->order = chi.order();
    out->principal = chi.is_principal();
    out->real = chi.is_real();
  });
}

uf_status uf_character_exponents(const uf_character_set* set, size_t index, char** out) {
  return guarded([&] {
    need(out, "out");
    const auto& chi = character(set, index);
    std::string s;
    for (auto k : chi.exponents()) {
      if (!s.empty()) s += ',';
      s += std::to_string(k);
    }
    *out = dup(s);
  });
}

uf_status uf_character_value(const uf_character_set* set, size_t index, uint64_t n, double* re,
                             double* im) {
  return guarded([&] {
    need(re, "re");
    need(im, "im");
    const auto v = character(set, index)(n);
    *re = v.real();
    *im = v.imag();
  });
}

uf_status uf_character_sum(const char* x, const uf_table* table, const uf_character_set* set,
                           size_t index, double* re, double* im) {
  return guarded([&] {
    need(table, "table");
    need(re, "re");
    need(im, "im");
    const auto v = uf::character_sum(bound(x), table->table, character(set, index));
    *re = v.real();
    *im = v.imag();
  });
}

uf_status uf_reconstruct_progression(const char* x, const uf_table* table, uint64_t a,
                                     uint64_t q, double* re, double* im) {
  return guarded([&] {
    need(table, "table");
    need(re, "re");
    need(im, "im");
    const auto v = uf::reconstruct_progression(bound(x), table->table, a, q);
    *re = v.real();
    *im = v.imag();
  });
}

uf_status uf_t3_bound(const char* x, const uf_table* table, const uf_character_set* set,
                      size_t index, const uf_config* config, double* theta0, double* theta1,
                      double* exact_ratio) {
  return guarded([&] {
    need(table, "table");
    const auto& chi = character(set, index);
    const auto ctx = uf::ModulusContext::make(set->q, table->table);
    const auto b = uf::t3_bound(bound(x), table->table, ctx, chi, to_config(config));
    if (theta0) *theta0 = b.theta0;
    if (theta1) *theta1 = b.theta1;
    if (exact_ratio) *exact_ratio = b.exact_ratio;
  });
}

uf_status uf_t3_bounds_all(const char* x, const uf_table* table, const uf_character_set* set,
                           const uf_config* config, double* theta0, double* theta1,
                           double* exact_ratio) {
  return guarded([&] {
    need(table, "table");
    need(set, "set");
    need(theta0, "theta0");
    need(theta1, "theta1");
    need(exact_ratio, "exact_ratio");
    const auto xb = bound(x);
    const auto cfg = to_config(config);
    const auto regime = uf::classify_regime(xb.log(), table->table, cfg.epsilon);
    if (!regime.small_y) throw uf::DomainError("precondition failed: 2 log x < psi(y)");
    const auto b = uf::t3_bound_values(regime.u, std::log(static_cast<double>(table->table.y())),
                                       cfg);
    const auto counts = uf::count_ultrafriable_residues(xb, table->table, set->q, cfg.limits);
    const double total = static_cast<double>(counts.coprime_total());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < set->chars.size(); ++i) {
      const auto& chi = set->chars[i];
      const bool principal = chi.is_principal();
      theta0[i] = principal ? nan : b.theta0;
      theta1[i] = principal ? nan : b.theta1;
      exact_ratio[i] = principal ? nan
                       : total > 0 ? std::abs(uf::character_sum(counts, chi)) / total
                                   : 0.0;
    }
  });
}

uf_status uf_calibrate(const uf_config* config, double headroom, char** out) {
  return guarded([&] {
    need(out, "out");
    if (!(headroom >= 1.0)) throw uf::InvalidArgument("headroom must be >= 1");
    uf::CalibrationOptions opts;
    opts.config = to_config(config);
    opts.headroom = headroom;
    *out = dup(uf::calibrate(opts).to_text());
  });
}

}  // extern "C"
