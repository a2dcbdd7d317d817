#ifndef RISFAS_H
#define RISFAS_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RisfasStatus {
  RISFAS_STATUS_OK = 0,
  RISFAS_STATUS_NULL_POINTER = 1,
  RISFAS_STATUS_INVALID_ARGUMENT = 2,
  RISFAS_STATUS_CONFIG = 3,
  RISFAS_STATUS_NUMERICAL = 4,
  RISFAS_STATUS_PANIC = 5,
} RisfasStatus;

typedef enum RisfasNode {
  RISFAS_NODE_LEGITIMATE = 0,
  RISFAS_NODE_EAVESDROPPER = 1,
} RisfasNode;

typedef enum RisfasSopPath {
  RISFAS_SOP_PATH_GLQ = 0,
  RISFAS_SOP_PATH_REFERENCE = 1,
} RisfasSopPath;

typedef enum RisfasPdfMode {
  RISFAS_PDF_MODE_PAPER = 0,
  RISFAS_PDF_MODE_DERIVATIVE = 1,
} RisfasPdfMode;

/**
 * Opaque scenario handle.
 */
typedef struct RisfasScenario RisfasScenario;

/**
 * Value with its absolute error estimate.
 */
typedef struct RisfasEstimate {
  double value;
  double error;
  /**
   * Non-zero when the value lies below the numerical floor.
   */
  int32_t below_floor;
} RisfasEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the reference scenario.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum RisfasStatus risfas_scenario_new_default(struct RisfasScenario **out);

/**
 * Creates a scenario from a TOML configuration string. A sweep section, if
 * present, selects its first axis value.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RisfasStatus risfas_scenario_from_toml(const char *toml, struct RisfasScenario **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `s` must come from a `risfas_scenario_*` constructor and not be used again.
 */
void risfas_scenario_free(struct RisfasScenario *s);

/**
 * Number of ports of the selected node.
 *
 * # Safety
 * `s` must be a live handle or null (returns 0).
 */
size_t risfas_scenario_ports(const struct RisfasScenario *s, enum RisfasNode node);

/**
 * Secrecy outage probability.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum RisfasStatus risfas_sop(const struct RisfasScenario *s,
                             enum RisfasSopPath path,
                             struct RisfasEstimate *out);

/**
 * CDF of the selected-port SNR of `node` at `gamma`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum RisfasStatus risfas_snr_cdf(const struct RisfasScenario *s,
                                 enum RisfasNode node,
                                 double gamma,
                                 struct RisfasEstimate *out);

/**
 * Density of the selected-port SNR of `node` at `gamma`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum RisfasStatus risfas_snr_pdf(const struct RisfasScenario *s,
                                 enum RisfasNode node,
                                 double gamma,
                                 enum RisfasPdfMode mode,
                                 double *out);

/**
 * Writes the `order` Gauss–Laguerre nodes and weights.
 *
 * # Safety
 * `nodes` and `weights` must each hold at least `order` doubles.
 */
enum RisfasStatus risfas_gauss_laguerre(size_t order, double *nodes, double *weights);

/**
 * Marcum Q-function of order one half.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RisfasStatus risfas_marcum_q_half(double a, double b, double *out);

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *risfas_last_error_message(void);

/**
 * Library version, statically allocated.
 */
const char *risfas_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RISFAS_H */
