#ifndef CITERANK_H
#define CITERANK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status returned by every fallible function.
 */
typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_NULL_POINTER = 1,
  CR_STATUS_INVALID_ARGUMENT = 2,
  CR_STATUS_PARSE = 3,
  CR_STATUS_INSUFFICIENT_DATA = 4,
  CR_STATUS_INVARIANT = 5,
  CR_STATUS_IO = 6,
  CR_STATUS_UNKNOWN_GROUP = 7,
  CR_STATUS_PANIC = 8,
} CrStatus;

/**
 * Tie handling for global ranks.
 */
typedef enum CrRankPolicy {
  CR_RANK_POLICY_MEAN = 0,
  CR_RANK_POLICY_MIN = 1,
} CrRankPolicy;

typedef enum CrSpreadDenominator {
  CR_SPREAD_DENOMINATOR_MIN = 0,
  CR_SPREAD_DENOMINATOR_MAX = 1,
  CR_SPREAD_DENOMINATOR_MEAN = 2,
} CrSpreadDenominator;

typedef enum CrInstitutionType {
  CR_INSTITUTION_TYPE_A = 0,
  CR_INSTITUTION_TYPE_B = 1,
  CR_INSTITUTION_TYPE_C = 2,
} CrInstitutionType;

/**
 * Opaque ranked corpus.
 */
typedef struct CrCorpus CrCorpus;

/**
 * Group size, fractional top-percentile counts and their ratios.
 * A ratio flag of 0 means the ratio is not calculable and its value is NaN.
 */
typedef struct CrIndicators {
  size_t papers;
  double p_top50;
  double p_top10;
  double p_top5;
  double p_top1;
  double r1;
  double r2;
  double r3;
  uint8_t r1_calculable;
  uint8_t r2_calculable;
  uint8_t r3_calculable;
} CrIndicators;

/**
 * Reference power law `l = coeff · g^alpha` through two anchors.
 */
typedef struct CrPowerLaw {
  double alpha;
  double coeff;
  size_t global_size;
  double hi_fraction;
  double hi_count;
  double lo_fraction;
  double lo_count;
} CrPowerLaw;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a corpus from `n` citation counts. `groups` may be NULL (no groups)
 * or point to `n` entries, each NULL or a group label.
 *
 * # Safety
 * `citations` must point to `n` values; `groups`, when not NULL, to `n`
 * pointers that are NULL or NUL-terminated strings; `out` must be writable.
 */
enum CrStatus cr_corpus_from_counts(const uint64_t *citations,
                                    const char *const *groups,
                                    size_t n,
                                    enum CrRankPolicy policy,
                                    struct CrCorpus **out);

/**
 * Loads a corpus CSV with columns `id`, `citations` and `group`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum CrStatus cr_corpus_from_csv(const char *path, enum CrRankPolicy policy, struct CrCorpus **out);

/**
 * Releases a corpus. NULL is ignored.
 *
 * # Safety
 * `corpus` must come from a `cr_corpus_*` constructor and not be used again.
 */
void cr_corpus_free(struct CrCorpus *corpus);

/**
 * Number of papers in the corpus, or 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
size_t cr_corpus_size(const struct CrCorpus *corpus);

/**
 * Fractional count of `group` papers in the global top `x` percent.
 * The label `GLOBAL` addresses the whole corpus.
 *
 * # Safety
 * `corpus` must be a live handle, `group` a NUL-terminated string and `out`
 * writable.
 */
enum CrStatus cr_top_percentile_count(const struct CrCorpus *corpus,
                                      const char *group,
                                      double x,
                                      double *out);

/**
 * Indicator set of `group` with default options.
 *
 * # Safety
 * `corpus` must be a live handle, `group` a NUL-terminated string and `out`
 * writable.
 */
enum CrStatus cr_indicator_set(const struct CrCorpus *corpus,
                               const char *group,
                               struct CrIndicators *out);

/**
 * Type A/B/C from the three ratios. `stability` is the largest relative
 * spread still counted as equal ratios.
 *
 * # Safety
 * `out` must be writable.
 */
enum CrStatus cr_classify(double r1,
                          double r2,
                          double r3,
                          double stability,
                          enum CrSpreadDenominator denominator,
                          enum CrInstitutionType *out);

/**
 * Power law through `(hi_fraction, hi_count)` and `(lo_fraction, lo_count)`,
 * fractions of a global list of `global_size` papers.
 *
 * # Safety
 * `out` must be writable.
 */
enum CrStatus cr_power_law_reference(double hi_fraction,
                                     double hi_count,
                                     double lo_fraction,
                                     double lo_count,
                                     size_t global_size,
                                     struct CrPowerLaw *out);

/**
 * Local rank the reference predicts at `global_rank`.
 *
 * # Safety
 * `reference` must point to a value filled by [`cr_power_law_reference`]
 * and `out` must be writable.
 */
enum CrStatus cr_expected_local_rank(const struct CrPowerLaw *reference,
                                     double global_rank,
                                     double *out);

/**
 * Expected group papers in the global top `fraction`, below the narrower
 * anchor.
 *
 * # Safety
 * `reference` must point to a value filled by [`cr_power_law_reference`]
 * and `out` must be writable.
 */
enum CrStatus cr_extrapolate_breakthrough(const struct CrPowerLaw *reference,
                                          double fraction,
                                          double *out);

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next `cr_*` call on the same thread.
 */
const char *cr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CITERANK_H */
