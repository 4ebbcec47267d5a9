#ifndef MLFW_MLFW_H
#define MLFW_MLFW_H

/* C interface to the formal-language meta-learning workbench.
 *
 * Every fallible call returns an mlfw_status. On failure the calling thread's
 * message is available from mlfw_last_error() until its next failing call.
 * Strings returned through char** belong to the caller and are released with
 * mlfw_string_free. Handles are released with their matching *_free call;
 * passing NULL to a free function is a no-op.
 *
 * Token ids: 0 START, 1 STOP, 2 PAD, 3..9 payload symbols. Continuation sets
 * are bitmasks with bit k set when token k is a valid next token. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MLFW_API __declspec(dllexport)
#else
#define MLFW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mlfw_status {
  MLFW_OK = 0,
  MLFW_INVALID_ARGUMENT = 1,
  MLFW_UNKNOWN_SYMBOL = 2,
  MLFW_DEAD_PREFIX = 3,
  MLFW_RANK_OUT_OF_RANGE = 4,
  MLFW_EMPTY_SLICE = 5,
  MLFW_BIN_UNFILLABLE = 6,
  MLFW_SHAPE_MISMATCH = 7,
  MLFW_NON_FINITE_LOSS = 8,
  MLFW_BAD_DISTRIBUTION = 9,
  MLFW_IO = 10,
  MLFW_FORMAT = 11,
  MLFW_INTERNAL = 100
} mlfw_status;

#define MLFW_VOCAB_SIZE 10

MLFW_API const char* mlfw_version(void);
MLFW_API const char* mlfw_status_name(mlfw_status status);
MLFW_API const char* mlfw_last_error(void);
MLFW_API void mlfw_string_free(char* s);

/* ---- formal languages -------------------------------------------------- */

typedef struct mlfw_language mlfw_language;

/* Names: an anbn anbncn kleene wwR ww pairs_n dyck cross_dyck. */
MLFW_API mlfw_status mlfw_language_open(const char* name, int pairs_homogeneous, mlfw_language** out);
MLFW_API void mlfw_language_free(mlfw_language* lang);
/* Space-separated names of the nine languages. */
MLFW_API const char* mlfw_language_names(void);

MLFW_API mlfw_status mlfw_language_membership(const mlfw_language* lang, const int* symbols, size_t n,
                                              int* out_member);
MLFW_API mlfw_status mlfw_language_continuations(const mlfw_language* lang, const int* prefix, size_t n,
                                                 uint16_t* out_mask);
MLFW_API mlfw_status mlfw_language_prefix_length(const mlfw_language* lang, const int* prefix, size_t n,
                                                 int* out_length);
/* Size of the slice at a language length, as a decimal string. */
MLFW_API mlfw_status mlfw_language_count(const mlfw_language* lang, int length, char** out_decimal);
/* rank is a decimal string; writes up to cap ids and the full length. */
MLFW_API mlfw_status mlfw_language_unrank(const mlfw_language* lang, int length, const char* rank, int* out,
                                          size_t cap, size_t* out_len);
MLFW_API mlfw_status mlfw_language_parse(const mlfw_language* lang, const char* glyphs, int* out, size_t cap,
                                         size_t* out_len);
MLFW_API mlfw_status mlfw_language_render(const mlfw_language* lang, const int* symbols, size_t n,
                                          char** out_text);

/* n strings, length uniform in [lo, hi], as JSONL {"lang","symbols","length"}.
 * path NULL or "-" returns the text through out_text instead. */
MLFW_API mlfw_status mlfw_generate_strings(const mlfw_language* lang, int lo, int hi, int n, uint64_t seed,
                                           const char* path, char** out_text);

/* ---- grammar zoo -------------------------------------------------------- */

typedef struct mlfw_zoo mlfw_zoo;

MLFW_API mlfw_status mlfw_zoo_build(int n, double mdl_lo, double mdl_hi, uint64_t seed, mlfw_zoo** out);
MLFW_API mlfw_status mlfw_zoo_load(const char* path, mlfw_zoo** out);
MLFW_API mlfw_status mlfw_zoo_save(const mlfw_zoo* zoo, const char* path);
MLFW_API void mlfw_zoo_free(mlfw_zoo* zoo);
MLFW_API mlfw_status mlfw_zoo_size(const mlfw_zoo* zoo, size_t* out);
/* {"count","mean_mdl","min_mdl","max_mdl","histogram":[10]} */
MLFW_API mlfw_status mlfw_zoo_stats_json(const mlfw_zoo* zoo, char** out_json);
/* Expected MDL under weights proportional to exp(mdl / temperature). */
MLFW_API mlfw_status mlfw_zoo_expected_mdl(const mlfw_zoo* zoo, double temperature, double* out);
MLFW_API mlfw_status mlfw_zoo_grammar(const mlfw_zoo* zoo, size_t index, char** out_sexpr, double* out_mdl);

/* ---- models ------------------------------------------------------------- */

typedef struct mlfw_model mlfw_model;

/* arch_json: {"cell":"lstm"|"gru","layers","hidden_dim","embed_dim",
 * "vocab_size","forget_bias"}; missing fields take defaults. */
MLFW_API mlfw_status mlfw_model_init(const char* arch_json, uint64_t seed, mlfw_model** out);
MLFW_API mlfw_status mlfw_model_load(const char* path, mlfw_model** out);
MLFW_API mlfw_status mlfw_model_save(const mlfw_model* model, const char* path);
MLFW_API void mlfw_model_free(mlfw_model* model);
/* {"arch","metadata","hash","parameters","arrays":[{"name","rows","cols"}]} */
MLFW_API mlfw_status mlfw_model_info_json(const mlfw_model* model, char** out_json);
/* Per-array max |a-b| and L2 distance; shapes must match. */
MLFW_API mlfw_status mlfw_model_diff_json(const mlfw_model* a, const mlfw_model* b, char** out_json);
/* Next-token distribution after START followed by the prefix. */
MLFW_API mlfw_status mlfw_model_next_token(const mlfw_model* model, const int* prefix, size_t n,
                                           double out_dist[MLFW_VOCAB_SIZE]);

/* ---- meta-training ------------------------------------------------------ */

typedef void (*mlfw_meta_progress)(int outer_step, double mean_query_loss, double grad_norm, int clipped,
                                   void* user);

/* config_json: meta-training settings ("arch", "inner_lr", "outer_lr",
 * "inner_loops_total", "meta_accumulation", "support_batches",
 * "support_batch_size", "query_batches", "query_batch_size", "clip_norm",
 * "average_meta_grads", "seed"). source is a language name, or "zoo" with a
 * zoo handle and temperature. log_path may be NULL. */
MLFW_API mlfw_status mlfw_meta_train(const char* config_json, const char* source, const mlfw_zoo* zoo,
                                     double temperature, const char* log_path, mlfw_meta_progress progress,
                                     void* user, mlfw_model** out);

/* ---- downstream training ------------------------------------------------ */

/* Trains a copy of init on n_strings strings of lang (standard schedule for
 * n in {1, 10, 100}; schedule_json overrides any field and may be NULL).
 * init_id labels the initialization in the manifest (NULL: the init hash, or
 * "unmetatrained" when unmetatrained is nonzero). */
MLFW_API mlfw_status mlfw_train(const mlfw_model* init, int unmetatrained, const char* lang, int n_strings,
                                uint64_t seed, const char* schedule_json, mlfw_model** out,
                                char** out_manifest_json);

/* ---- evaluation --------------------------------------------------------- */

MLFW_API mlfw_status mlfw_metrics(const double dist[MLFW_VOCAB_SIZE], uint16_t valid_mask, double* out_p_val,
                                  double* out_bt, double* out_f1);

/* Continuation corpus JSONL {"lang","prefix","valid","length"}. */
MLFW_API mlfw_status mlfw_eval_corpus_build(const mlfw_language* lang, uint64_t seed, int max_length,
                                            int strings_per_length, int dedup, const char* path);

/* Scores a model on a corpus file. record_csv and aggregate_csv may be NULL.
 * Summary JSON: {"records","mean_f1","mean_p_val","mean_bt",
 * "language_mean_f1","languages":{...},"by_length":{...}}. */
MLFW_API mlfw_status mlfw_evaluate(const mlfw_model* model, const char* corpus_path, int max_length,
                                   const char* record_csv, const char* aggregate_csv, const char* checkpoint_label,
                                   int n_strings, char** out_summary_json);

/* ---- experiment grid ---------------------------------------------------- */

/* Runs the grid described by config_json into out_dir. Summary JSON:
 * {"rows","failed_cells","meta_runs","meta_cache_hits","warnings":[...]} */
MLFW_API mlfw_status mlfw_run_grid(const char* config_json, const char* out_dir, char** out_summary_json);

/* Rebuilds the aggregate tables from a results.csv into out_dir. */
MLFW_API mlfw_status mlfw_report(const char* results_csv, const char* out_dir, char** out_warnings_json);

#ifdef __cplusplus
}
#endif

#endif /* MLFW_MLFW_H */
