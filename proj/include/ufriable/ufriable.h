/*
 * C interface to the ufriable library: exact counts of ultrafriable and
 * friable integers, saddle-point quantities and the main-term estimators.
 *
 * Conventions
 *   - Every fallible call returns a uf_status; on failure the message is
 *     available from uf_last_error() (thread-local, valid until the next
 *     call on the same thread).
 *   - Real arguments x are passed as text ("2520", "1e6", "e^30") so that
 *     huge bounds keep an exact integer part.
 *   - Counts are returned as decimal strings allocated by the library and
 *     released with uf_free_string().
 *   - Handles are immutable after creation and may be shared across threads.
 */
#ifndef UFRIABLE_H
#define UFRIABLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UF_API __declspec(dllexport)
#else
#define UF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uf_status {
  UF_OK = 0,
  UF_ERR_DOMAIN = 1,
  UF_ERR_RESOURCE = 2,
  UF_ERR_PRECONDITION = 3,
  UF_ERR_INVALID_ARGUMENT = 4,
  UF_ERR_UNSUPPORTED = 5,
  UF_ERR_INTERNAL = 6
} uf_status;

typedef struct uf_table uf_table;
typedef struct uf_modulus uf_modulus;
typedef struct uf_character_set uf_character_set;

UF_API const char* uf_version(void);
UF_API const char* uf_last_error(void);
UF_API const char* uf_status_name(uf_status status);
UF_API void uf_free_string(char* s);

/* ---- prime powers and moduli ---- */

UF_API uf_status uf_table_create(uint64_t y, uf_table** out);
UF_API void uf_table_destroy(uf_table* table);
UF_API uint64_t uf_table_y(const uf_table* table);
UF_API size_t uf_table_size(const uf_table* table);
UF_API double uf_table_psi(const uf_table* table);
UF_API uf_status uf_table_entry(const uf_table* table, size_t index, uint64_t* p, uint32_t* nu);

typedef struct uf_modulus_info {
  uint64_t q;
  uint64_t phi;
  uint64_t z_q;
  int omega;
  double theta_q;
  int largest_prime_within_y;
} uf_modulus_info;

UF_API uf_status uf_modulus_create(const uf_table* table, uint64_t q, uf_modulus** out);
UF_API void uf_modulus_destroy(uf_modulus* modulus);
UF_API uf_status uf_modulus_get_info(const uf_modulus* modulus, uf_modulus_info* out);

typedef struct uf_regime {
  int small_y;
  int large_y;
  double eta;
  double u;
  double log_x;
  char name[24];
} uf_regime;

/* Natural log of a textual bound. */
UF_API uf_status uf_parse_log_x(const char* x, double* out);
UF_API uf_status uf_classify_regime(const char* x, const uf_table* table, double epsilon,
                                    uf_regime* out);

/* ---- exact counts ---- */

UF_API uf_status uf_tau_n(const uf_table* table, const uf_modulus* modulus, char** out);
/* Upsilon_q(x, y); a NULL modulus means q = 1. */
UF_API uf_status uf_count_ultrafriable(const char* x, const uf_table* table,
                                       const uf_modulus* modulus, unsigned jobs, char** out);
/* Upsilon(x, y; a, q) for every a in [0, q), '\n'-separated. */
UF_API uf_status uf_count_ultrafriable_residues(const char* x, const uf_table* table, uint64_t q,
                                                char** out);
/* Psi_q(x, y). */
UF_API uf_status uf_count_friable(const char* x, uint64_t y, uint64_t q, char** out);
/* Psi(x, y; a, q). */
UF_API uf_status uf_count_friable_progression(const char* x, uint64_t y, uint64_t a, uint64_t q,
                                              char** out);
/* Brute-force reference count for x <= 10^7. q = 0 disables the residue
 * filter; a < 0 means "coprime to q" instead of "congruent to a". */
UF_API uf_status uf_naive_count(uint64_t x, uint64_t y, int ultrafriable, uint64_t q, int64_t a,
                                uint64_t* out);

/* ---- saddle points and special functions ---- */

typedef struct uf_saddle {
  double sigma;
  double residual;
  double sigma2;
  double sigma3;
  double sigma4;
  int iterations;
} uf_saddle;

/* beta(x, y); sigma_j for the modulus when given, q = 1 when NULL. */
UF_API uf_status uf_solve_beta(const char* x, const uf_table* table, const uf_modulus* modulus,
                               uf_saddle* out);
UF_API uf_status uf_solve_alpha(const char* x, const uf_table* table, uf_saddle* out);
UF_API uf_status uf_log_z(double s, const uf_table* table, const uf_modulus* modulus,
                          double* out);
UF_API uf_status uf_xi(double v, double* out);
UF_API uf_status uf_gaussian_g(double z, double* out);

/* ---- estimators ---- */

typedef struct uf_config {
  double epsilon;
  double c0;
  double c1;
  double c2;
  double t1iii_threshold;
  unsigned jobs;
} uf_config;

UF_API void uf_config_default(uf_config* out);

typedef struct uf_budget {
  double u;
  double eta;
  double theta_q;
  int omega_q;
  double delta_q;
  int delta_branch;
  double delta_q_other;
  double dd_q;
  double cc_q;
  double nominal_bound;
  char regime[24];
} uf_budget;

typedef struct uf_estimate {
  double log_main;
  double beta;   /* NaN when the variant uses no saddle point */
  double sigma2; /* NaN likewise */
  char theorem[8];
  uf_budget budget;
  int flag_count;
} uf_estimate;

/* Variants: "T1i", "T1ii", "T1iii", "REMC" (Upsilon_q), "T2" (Upsilon_q
 * against Psi_q), "T4", "T5" (progressions, (a, q) = 1), "R6" (any a).
 * `a` is ignored by the Upsilon_q variants. When flags is non-NULL it
 * receives the unmet soft hypotheses, '\n'-separated. */
UF_API uf_status uf_estimate_main(const char* x, const uf_table* table, uint64_t q, uint64_t a,
                                  const char* variant, const uf_config* config, uf_estimate* out,
                                  char** flags);

/* The exact count a variant's main term approximates. */
UF_API uf_status uf_exact_for_variant(const char* x, const uf_table* table, uint64_t q,
                                      uint64_t a, const char* variant, unsigned jobs,
                                      char** out);

typedef struct uf_comparison {
  int degenerate;
  double log_exact;
  double log_main;
  double rel_error;
  double budget;
  double error_over_budget;
} uf_comparison;

UF_API uf_status uf_compare(const char* exact, const uf_estimate* estimate, uf_comparison* out);

/* ---- characters ---- */

typedef struct uf_character_info {
  uint64_t order;
  int principal;
  int real;
} uf_character_info;

UF_API uf_status uf_characters_create(uint64_t q, uf_character_set** out);
UF_API void uf_characters_destroy(uf_character_set* set);
UF_API size_t uf_characters_count(const uf_character_set* set);
UF_API uf_status uf_character_get_info(const uf_character_set* set, size_t index,
                                       uf_character_info* out);
/* Exponent vector on the generators, comma-separated. */
UF_API uf_status uf_character_exponents(const uf_character_set* set, size_t index, char** out);
UF_API uf_status uf_character_value(const uf_character_set* set, size_t index, uint64_t n,
                                    double* re, double* im);
/* Upsilon(x, y; chi). */
UF_API uf_status uf_character_sum(const char* x, const uf_table* table,
                                  const uf_character_set* set, size_t index, double* re,
                                  double* im);
UF_API uf_status uf_reconstruct_progression(const char* x, const uf_table* table, uint64_t a,
                                            uint64_t q, double* re, double* im);
/* Both bound values and the exact |Upsilon(x, y; chi)| / Upsilon_q(x, y). */
UF_API uf_status uf_t3_bound(const char* x, const uf_table* table, const uf_character_set* set,
                             size_t index, const uf_config* config, double* theta0,
                             double* theta1, double* exact_ratio);

/* The same for every character of the set at once (one residue count);
 * each array holds uf_characters_count(set) entries, NaN for the
 * principal character. */
UF_API uf_status uf_t3_bounds_all(const char* x, const uf_table* table,
                                  const uf_character_set* set, const uf_config* config,
                                  double* theta0, double* theta1, double* exact_ratio);

/* ---- calibration ---- */

/* Runs every band sweep; returns the frozen constants as key=value lines. */
UF_API uf_status uf_calibrate(const uf_config* config, double headroom, char** out);

#ifdef __cplusplus
}
#endif

#endif /* UFRIABLE_H */
