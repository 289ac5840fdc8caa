#ifndef L1DERIV_H
#define L1DERIV_H

/*
 * C interface to the l1deriv library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an l1d_status; on failure the message is
 * available from l1d_last_error() on the calling thread. Strings returned
 * through char** out-parameters are owned by the caller and released with
 * l1d_string_free. Operations that produce reports return a JSON object
 * {"result": {...}, "certificates": [{"name", "passed", ...}, ...], "passed": bool}.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(L1DERIV_BUILDING)
#define L1D_API __declspec(dllexport)
#else
#define L1D_API __declspec(dllimport)
#endif
#else
#define L1D_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum l1d_status {
  L1D_OK = 0,
  L1D_E_INVALID_ARGUMENT = 1,
  L1D_E_SYNTAX = 2,
  L1D_E_EVALUATION = 3,
  L1D_E_DEGREE_OVERFLOW = 4,
  L1D_E_UNBOUNDED_DERIVATION = 5,
  L1D_E_TAIL_UNKNOWN = 6,
  L1D_E_NO_ADMISSIBLE_INDEX = 7,
  L1D_E_INDEX_OVERFLOW = 8,
  L1D_E_INVALID_ALGEBRA = 9,
  L1D_E_INVALID_MODULE = 10,
  L1D_E_NOT_OUTSIDE_SQUARE = 11,
  L1D_E_NOT_SYMMETRIC = 12,
  L1D_E_SQUARE_DEFICIENT = 13,
  L1D_E_NO_SUCH_ELEMENT = 14,
  L1D_E_CONSTRUCTION_FAILED = 15,
  L1D_E_ON_BOUNDARY = 16,
  L1D_E_POLE_IN_X = 17,
  L1D_E_NULL_ARGUMENT = 98,
  L1D_E_INTERNAL = 99
} l1d_status;

/* Tail declarations for sequences built from rules. */
typedef enum l1d_tail {
  L1D_TAIL_CLOSED = 0, /* the rule is a closed form; tails are analysed from it */
  L1D_TAIL_ZERO = 1,   /* zero from index `zero_from` on */
  L1D_TAIL_NONE = 2,   /* nothing known beyond the probed values */
  L1D_TAIL_DECAY = 3   /* closed form asserted to tend to 0; rejected otherwise */
} l1d_tail;

typedef struct l1d_rule l1d_rule;
typedef struct l1d_derivation l1d_derivation;
typedef struct l1d_cheese l1d_cheese;
typedef struct l1d_algebra l1d_algebra;

L1D_API const char* l1d_version(void);
L1D_API const char* l1d_status_name(l1d_status status);
L1D_API const char* l1d_last_error(void);
/* 1-based position and comma-separated expected set of the last syntax error on this thread. */
L1D_API size_t l1d_last_syntax_position(void);
L1D_API const char* l1d_last_syntax_expected(void);
L1D_API void l1d_string_free(char* s);

/* ---- rules */
L1D_API l1d_status l1d_rule_parse(const char* text, l1d_rule** out);
L1D_API void l1d_rule_free(l1d_rule* rule);
L1D_API l1d_status l1d_rule_print(const l1d_rule* rule, char** out);
L1D_API l1d_status l1d_rule_dump(const l1d_rule* rule, char** out);
L1D_API l1d_status l1d_rule_eval(const l1d_rule* rule, double n, double* out);

/* ---- convolution algebra: coefficient arrays of length len (im may be NULL) */
L1D_API l1d_status l1d_conv_json(const double* a_re, const double* a_im, size_t a_len, const double* b_re,
                                 const double* b_im, size_t b_len, char** json);

/* ---- derivations */
L1D_API l1d_status l1d_derivation_from_phi(const l1d_rule* phi, l1d_tail tail, uint64_t zero_from, uint64_t depth,
                                           l1d_derivation** out);
L1D_API l1d_status l1d_derivation_from_mu(const l1d_rule* mu, l1d_tail tail, uint64_t zero_from,
                                          l1d_derivation** out);
L1D_API void l1d_derivation_free(l1d_derivation* d);
/* mu_n = D(t^n)(1) */
L1D_API l1d_status l1d_derivation_mu(const l1d_derivation* d, uint64_t n, double* re, double* im);
/* D(t^k)(t^l) */
L1D_API l1d_status l1d_derivation_evaluate(const l1d_derivation* d, uint64_t k, uint64_t l, double* re, double* im);
L1D_API l1d_status l1d_derivation_norm_json(const l1d_derivation* d, uint64_t depth, char** json);
L1D_API l1d_status l1d_derivation_classify_json(const l1d_derivation* d, double tol, uint64_t depth, char** json);
L1D_API l1d_status l1d_derivation_truncate_json(const l1d_derivation* d, uint64_t k, char** json);
L1D_API l1d_status l1d_derivation_witness_json(const l1d_derivation* d, double eps, size_t terms, double growth,
                                               char** json);
/* D(f)(t^n) for n < count */
L1D_API l1d_status l1d_derivation_apply_json(const l1d_derivation* d, const double* f_re, const double* f_im,
                                             size_t f_len, uint64_t count, char** json);

/* ---- Swiss cheese */
L1D_API l1d_status l1d_cheese_build(size_t n_max, l1d_cheese** out);
L1D_API l1d_status l1d_cheese_from_json(const char* text, l1d_cheese** out);
L1D_API void l1d_cheese_free(l1d_cheese* c);
L1D_API l1d_status l1d_cheese_json(const l1d_cheese* c, char** json);
L1D_API l1d_status l1d_cheese_feinstein(const l1d_cheese* c, double re, double im, double* value,
                                        double* certified_lt);
L1D_API l1d_status l1d_cheese_build_json(const l1d_cheese* c, char** json);
/* csv may be NULL; columns x,sum,certified_lt */
L1D_API l1d_status l1d_cheese_verify_json(const l1d_cheese* c, size_t grid, char** json, char** csv);
/* csv may be NULL; columns n,m,M_nm */
L1D_API l1d_status l1d_cheese_demo_json(const l1d_cheese* c, size_t n_hi, size_t grid, char** json, char** csv);

/* ---- finite-dimensional bimodules */
L1D_API l1d_status l1d_algebra_by_name(const char* name, l1d_algebra** out);
L1D_API l1d_status l1d_algebra_from_json(const char* text, l1d_algebra** out);
L1D_API void l1d_algebra_free(l1d_algebra* a);
L1D_API size_t l1d_algebra_dim(const l1d_algebra* a);
/* derivation may be NULL to check the algebra only */
L1D_API l1d_status l1d_bimodule_check_json(const l1d_algebra* a, const char* derivation, char** json);
/* a0 may be NULL (len 0) to use the first basis vector outside span(A^2) */
L1D_API l1d_status l1d_bimodule_rank1_json(const l1d_algebra* a, const double* a0_re, const double* a0_im, size_t len,
                                           char** json);
L1D_API l1d_status l1d_bimodule_transfer_json(const l1d_algebra* a, const char* derivation, uint64_t seed,
                                              char** json);

#ifdef __cplusplus
}
#endif

#endif
