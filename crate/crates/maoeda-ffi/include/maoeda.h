/* C ABI for the maoeda optimizer.
 *
 * Usage pattern:
 *   MaoedaPlan *plan = NULL;
 *   if (maoeda_plan_new("dtlz2", 3, &plan) != MAOEDA_OK) { ... }
 *   maoeda_plan_set_runs(plan, 5);
 *   MaoedaOutcome *outcome = NULL;
 *   if (maoeda_plan_execute(plan, &outcome) != MAOEDA_OK) { ... }
 *   double hv; maoeda_outcome_hv_median(outcome, &hv);
 *   maoeda_outcome_free(outcome);
 *   maoeda_plan_free(plan);
 *
 * All functions returning int use the MAOEDA_* status codes below; on any
 * failure, maoeda_last_error() yields a human-readable message for the
 * calling thread.
 */

#ifndef MAOEDA_H
#define MAOEDA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MAOEDA_OK 0
#define MAOEDA_ERR_NULL_POINTER 1
#define MAOEDA_ERR_INVALID_UTF8 2
#define MAOEDA_ERR_INVALID_ARGUMENT 3
#define MAOEDA_ERR_RUN_FAILED 4
#define MAOEDA_ERR_NO_VALUE 5
#define MAOEDA_ERR_INDEX 6
#define MAOEDA_ERR_IO 7

/* Opaque handles. */
typedef struct MaoedaPlan MaoedaPlan;
typedef struct MaoedaOutcome MaoedaOutcome;

/* Copies the calling thread's last error message into buf (NUL-terminated,
 * truncated to cap bytes). Returns the full message length. buf may be NULL
 * to query the length only. */
size_t maoeda_last_error(char *buf, size_t cap);

/* Creates a plan for one problem ("dtlz1".."dtlz4", minus variants as
 * "dtlz1-" or "dtlz1m") and objective count, with default parameters:
 * 30 runs, seed 42, T=25, alpha=beta=0.96, gamma=0.5, canonical budget. */
int maoeda_plan_new(const char *problem, size_t objectives, MaoedaPlan **out);
void maoeda_plan_free(MaoedaPlan *plan);

int maoeda_plan_set_runs(MaoedaPlan *plan, size_t runs);
int maoeda_plan_set_seed(MaoedaPlan *plan, uint64_t seed);
int maoeda_plan_set_neighbor_size(MaoedaPlan *plan, size_t t);
int maoeda_plan_set_thresholds(MaoedaPlan *plan, double alpha, double beta,
                               double gamma);
/* total = 0 restores the canonical per-objective-count budget table. */
int maoeda_plan_set_budget_total(MaoedaPlan *plan, size_t total);
/* cap = 0 removes the generation cap (budget remains the stopper). */
int maoeda_plan_set_generation_cap(MaoedaPlan *plan, size_t cap);
/* mode: 0 standard, 1 no diversity repair, 2 no dimension reduction. */
int maoeda_plan_set_mode(MaoedaPlan *plan, int mode);

/* Runs the plan; on MAOEDA_OK the caller owns *out. */
int maoeda_plan_execute(const MaoedaPlan *plan, MaoedaOutcome **out);
void maoeda_outcome_free(MaoedaOutcome *outcome);

/* Number of completed runs (0 for a NULL handle). */
size_t maoeda_outcome_runs(const MaoedaOutcome *outcome);
/* Normalized hypervolume of one run. */
int maoeda_outcome_hv(const MaoedaOutcome *outcome, size_t index, double *out);
/* IGD of one run; MAOEDA_ERR_NO_VALUE when the problem has no analytic
 * front. */
int maoeda_outcome_igd(const MaoedaOutcome *outcome, size_t index, double *out);
/* Median hypervolume over all runs. */
int maoeda_outcome_hv_median(const MaoedaOutcome *outcome, double *out);
/* Writes results.csv, summary.csv and results.json under dir. */
int maoeda_outcome_write(const MaoedaOutcome *outcome, const char *dir);

#ifdef __cplusplus
}
#endif

#endif /* MAOEDA_H */
