/* storsion — statistical torsion experimentation library, C interface.
 *
 * Opaque handles wrap parsed specs; operations return st_result objects
 * bearing a JSON (or CSV) payload plus a suggested process exit code
 * (0 decided / evidence, 2 undecided / inconclusive). All functions return
 * ST_OK on success; on failure st_last_error() describes the problem.
 */
#ifndef STORSION_H
#define STORSION_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  ST_OK = 0,
  ST_ERR_PARSE = 1,    /* malformed spec or parameter */
  ST_ERR_INVALID = 2,  /* precondition violation */
  ST_ERR_INTERNAL = 3
} st_status;

typedef struct st_sequence st_sequence;
typedef struct st_element st_element;
typedef struct st_index_set st_index_set;
typedef struct st_result st_result;

/* Thread-local message for the most recent failure. */
const char* st_last_error(void);

st_status st_sequence_parse(const char* spec_json, st_sequence** out);
void st_sequence_free(st_sequence* seq);
st_status st_sequence_ratio(const st_sequence* seq, int64_t n, int64_t* out);
/* a_n as a decimal string payload. */
st_status st_sequence_term(const st_sequence* seq, int64_t n, st_result** out);

st_status st_element_parse(const char* spec_json, st_element** out);
void st_element_free(st_element* elem);

st_status st_index_set_parse(const char* spec_json, st_index_set** out);
void st_index_set_free(st_index_set* set);

/* Digit expansion prefix: digits, supports, partial reconstruction. */
st_status st_expand(const st_sequence* seq, const st_element* elem, int64_t prefix,
                    st_result** out);

/* Prefix density estimate of an index set. */
st_status st_density(const st_index_set* set, int64_t prefix, st_result** out);

/* Splitting / d-splitting classification plus level-set table.
 * threshold is a rational literal such as "1/100". */
st_status st_classify(const st_sequence* seq, int64_t prefix, const char* threshold,
                      st_result** out);

/* Statistical-convergence oracle. eps_grid is comma-separated rationals. */
st_status st_oracle(const st_sequence* seq, const st_element* elem, int64_t prefix,
                    const char* eps_grid, const char* delta, int parallelism, st_result** out);

/* CSV trace (n, norm_lo, norm_hi, exceptional flag per eps). */
st_status st_oracle_trace_csv(const st_sequence* seq, const st_element* elem, int64_t prefix,
                              const char* eps_grid, st_result** out);

/* params_json: {"prefix":N,"threshold":"1/100","eps_grid":["1/10"],"delta":"1/100",
 *               "parallelism":1} — every field optional. */
st_status st_check(const st_sequence* seq, const st_element* elem, const char* params_json,
                   st_result** out);
st_status st_compare(const st_sequence* seq, const st_element* elem, const char* params_json,
                     st_result** out);

/* Deterministic corpus manifest for a (seed, size). */
st_status st_corpus(uint64_t seed, int32_t size, st_result** out);

const char* st_result_payload(const st_result* result);
int32_t st_result_exit_hint(const st_result* result);
void st_result_free(st_result* result);

#ifdef __cplusplus
}
#endif

#endif /* STORSION_H */
