/* C interface to the bimoplan library: demonstration analysis, behavior-tree
 * plan compilation, synthetic demonstration generation, and dry-run
 * validation, behind opaque handles and status codes.
 *
 * Conventions:
 *   - Functions return BIMOPLAN_OK (0) on success; on failure they return a
 *     status code and bimoplan_last_error() carries a message (thread-local).
 *   - char** out parameters receive NUL-terminated strings owned by the
 *     caller; free them with bimoplan_string_free().
 *   - Handles are destroyed with their bimoplan_*_destroy function.
 */
#ifndef BIMOPLAN_H
#define BIMOPLAN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bimoplan_status {
  BIMOPLAN_OK = 0,
  BIMOPLAN_ERR_INVALID_ARG = 1,
  BIMOPLAN_ERR_IO = 2,
  BIMOPLAN_ERR_PARSE = 3,
  BIMOPLAN_ERR_CONFIG = 4,
  BIMOPLAN_ERR_ANALYSIS = 5,
  BIMOPLAN_ERR_COMPILE = 6,
  BIMOPLAN_ERR_SCHEMA = 7,
  BIMOPLAN_ERR_DRYRUN = 8,
  BIMOPLAN_ERR_INTERNAL = 9
} bimoplan_status;

typedef struct bimoplan_config bimoplan_config;
typedef struct bimoplan_trace bimoplan_trace;
typedef struct bimoplan_analysis bimoplan_analysis;
typedef struct bimoplan_plan bimoplan_plan;

const char* bimoplan_status_name(bimoplan_status status);
const char* bimoplan_last_error(void);
void bimoplan_string_free(char* text);

/* --- configuration ------------------------------------------------------ */
bimoplan_config* bimoplan_config_create(void);
void bimoplan_config_destroy(bimoplan_config* config);
bimoplan_status bimoplan_config_load(bimoplan_config* config, const char* path);
bimoplan_status bimoplan_config_set(bimoplan_config* config, const char* key,
                                    const char* value);
bimoplan_status bimoplan_config_emit(const bimoplan_config* config, char** out_text);

/* --- traces --------------------------------------------------------------
 * format: "csv", "jsonl", or NULL to pick by file extension. */
bimoplan_status bimoplan_trace_load(const char* path, const char* format,
                                    bimoplan_trace** out_trace);
void bimoplan_trace_destroy(bimoplan_trace* trace);
bimoplan_status bimoplan_trace_csv(const bimoplan_trace* trace, char** out_csv);

/* Synthetic demonstration generator. scenario: pickplace, dual_uncoordinated,
 * cotransport, hold_and_place, pouring, assemble. out_truth_json may be NULL. */
bimoplan_status bimoplan_trace_synth(const char* scenario, uint64_t seed,
                                     double sigma_pos, double sigma_rot,
                                     bimoplan_trace** out_trace, char** out_truth_json);

/* --- analysis ------------------------------------------------------------ */
bimoplan_status bimoplan_analyze(const bimoplan_trace* trace, const bimoplan_config* config,
                                 bimoplan_analysis** out_analysis);
void bimoplan_analysis_destroy(bimoplan_analysis* analysis);
bimoplan_status bimoplan_analysis_report(const bimoplan_analysis* analysis,
                                         const bimoplan_config* config, char** out_json);
bimoplan_status bimoplan_analysis_graphs(const bimoplan_analysis* analysis,
                                         char** out_jsonl);

/* Sliding-window metric series as CSV (t,value). metric: "mi", "coinfo",
 * "distance", "distance_entropy". elements: comma-separated names (2, or >= 3
 * for coinfo). */
bimoplan_status bimoplan_metric_csv(const bimoplan_trace* trace, const bimoplan_config* config,
                                    const char* elements, const char* metric, char** out_csv);

/* --- plans ---------------------------------------------------------------- */
bimoplan_status bimoplan_compile(const bimoplan_analysis* analysis,
                                 const bimoplan_config* config, bimoplan_plan** out_plan);
void bimoplan_plan_destroy(bimoplan_plan* plan);
bimoplan_status bimoplan_plan_xml(const bimoplan_plan* plan, char** out_xml);
bimoplan_status bimoplan_plan_parse(const char* xml, bimoplan_plan** out_plan);
/* Lint findings, one per line; empty string certifies the plan. */
bimoplan_status bimoplan_plan_lint(const bimoplan_plan* plan, char** out_findings);

/* --- dry run --------------------------------------------------------------
 * Ticks the plan against a mock world built from scene JSON. Writes the
 * report JSON; *out_pass is 1 when the run succeeded and every placement
 * check met the tolerances. */
bimoplan_status bimoplan_dryrun(const bimoplan_plan* plan, const char* scene_json,
                                const bimoplan_config* config, double tol_m, double tol_rad,
                                char** out_report_json, int* out_pass);

#ifdef __cplusplus
}
#endif

#endif /* BIMOPLAN_H */
