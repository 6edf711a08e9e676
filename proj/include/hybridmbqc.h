/* C interface to the hybrid measurement-based-computation simulator.
 *
 * Every fallible call returns an hmq_status; 0 means success. On failure the
 * thread-local message from hmq_last_error() describes what went wrong and no
 * output pointer is written. Strings returned through char** are heap
 * allocations owned by the caller; release them with hmq_string_free().
 */
#ifndef HYBRIDMBQC_H
#define HYBRIDMBQC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hmq_status {
  HMQ_OK = 0,
  HMQ_ERR_PARSE = 1,            /* malformed or schema-violating document */
  HMQ_ERR_RULE = 2,             /* graph admissibility rule violation */
  HMQ_ERR_CONFIG = 3,           /* semantically invalid configuration */
  HMQ_ERR_RUN = 4,              /* protocol execution failure */
  HMQ_ERR_CAPACITY = 5,         /* state exceeds configured limits */
  HMQ_ERR_IO = 6,               /* file system failure */
  HMQ_ERR_INVALID_ARGUMENT = 7, /* misuse of the API surface */
  HMQ_ERR_NUMERICAL = 8         /* numerical degeneracy (zero-weight branch) */
} hmq_status;

/* Library version, e.g. "0.1.0". Static storage; do not free. */
const char* hmq_version(void);

/* Message of the most recent failing call on this thread; "" if none.
 * Valid until the next call into the library from the same thread. */
const char* hmq_last_error(void);

/* Releases any char* produced by this library. NULL is a no-op. */
void hmq_string_free(char* s);

/* Opaque parsed graph handle. */
typedef struct hmq_graph hmq_graph;

/* Parses a graph document:
 *   {"vertices":[{"id":"b1","kind":"B"},...],
 *    "edges":[{"u":"b1","v":"c2","t":1.0},...],
 *    "hadamard":[{"vertex":"b1","position":"after_cz"}],
 *    "magic_L": 200}
 * "t" may be the string "magic" (2*pi/magic_L). Unknown keys are rejected and
 * errors name the JSON path. */
hmq_status hmq_graph_parse(const char* json_text, hmq_graph** out);

void hmq_graph_free(hmq_graph* g);

/* Admissibility report: topology rules, family, measurement plan, and the
 * rotation capability of each output. request_json may be NULL or
 * {"outputs":["b1"],"pre_homodyne":["c4"]}; by default the lowest-id register
 * vertex is the output. Rule violations land inside the report (field
 * "admissible"); the call itself fails only on malformed requests. */
hmq_status hmq_graph_validate(const hmq_graph* g, const char* request_json, char** report_json);

/* Runs one rotation protocol from a config document (field names mirror the
 * run configuration; all fields optional except the angles the protocol
 * needs) and returns the full run report. */
hmq_status hmq_run_protocol(const char* config_json, char** report_json);

/* Tabulates the selector-measurement envelope against its exponential
 * surrogate and fits the envelope width; same config document as a run. */
hmq_status hmq_approx_report(const char* config_json, char** report_json);

/* Runs the configured protocol on the layered engine and on the brute-force
 * joint-tensor reference with identical seeds and reports the deviations.
 * The reference holds the full tensor: keep n_particles and n_points small. */
hmq_status hmq_oracle_check(const char* config_json, char** report_json);

/* Executes a parameter sweep:
 *   {"protocol":"z_rotation","n_list":[10,100],"l_list":[500],
 *    "theta_list":[0.3],"runs_per_point":5,"master_seed":7,...}
 * and renders the CSV table. Equal configs give byte-identical tables
 * regardless of thread count. */
hmq_status hmq_sweep_csv(const char* sweep_json, char** csv_text);

#ifdef __cplusplus
}
#endif

#endif /* HYBRIDMBQC_H */
