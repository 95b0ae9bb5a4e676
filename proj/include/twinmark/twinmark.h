#ifndef TWINMARK_H
#define TWINMARK_H

/* C interface to the twinmark watermarking toolkit.
 *
 * Every function returns a tmk_status; on failure tmk_last_error() holds a
 * message for the calling thread. Strings handed out through char** belong to
 * the caller and are released with tmk_string_free. Documents exchanged with
 * the pipeline functions are JSON and carry a "provenance" object (tool
 * version, seed, fully resolved config). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TMK_API __declspec(dllexport)
#else
#define TMK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tmk_status {
    TMK_OK = 0,
    TMK_ERR_INVALID_ARGUMENT = 1,
    TMK_ERR_EMPTY_CORPUS = 2,
    TMK_ERR_CORPUS_TOO_SHORT = 3,
    TMK_ERR_SEQUENCE_TOO_SHORT = 4,
    TMK_ERR_LENGTH_MISMATCH = 5,
    TMK_ERR_UNKNOWN_TOKEN = 6,
    TMK_ERR_IO = 7,
    TMK_ERR_FORMAT = 8,
    TMK_ERR_CONFIG = 9,
    TMK_ERR_INTERNAL = 100
} tmk_status;

typedef struct tmk_config tmk_config;
typedef struct tmk_model tmk_model;

TMK_API const char* tmk_version(void);
TMK_API const char* tmk_status_name(tmk_status status);
TMK_API const char* tmk_last_error(void);
TMK_API void tmk_string_free(char* s);

/* Config. NULL json gives the defaults. With check_paths, every non-empty
 * entry under "paths" must exist. */
TMK_API tmk_status tmk_config_parse(const char* json, int check_paths, tmk_config** out);
TMK_API tmk_status tmk_config_set_seed(tmk_config* cfg, uint64_t seed);
/* key: "model", "heldout" or "judge_corpus". */
TMK_API tmk_status tmk_config_set_path(tmk_config* cfg, const char* key, const char* path);
TMK_API tmk_status tmk_config_get_path(const tmk_config* cfg, const char* key, char** out);
TMK_API tmk_status tmk_config_json(const tmk_config* cfg, char** out);
TMK_API void tmk_config_free(tmk_config* cfg);

/* Synthetic corpus text from the config's "synthetic" section. Streams are
 * independent samples of the same language (0 train, 1 held-out, 2 judge by
 * convention). */
TMK_API tmk_status tmk_synthesize(const tmk_config* cfg, uint64_t tokens, uint64_t stream, char** out_text);

TMK_API tmk_status tmk_model_train(const tmk_config* cfg, const char* corpus_text, tmk_model** out);
TMK_API tmk_status tmk_model_load(const char* path, tmk_model** out);
/* cfg may be NULL; otherwise its provenance is embedded in the file. */
TMK_API tmk_status tmk_model_save(const tmk_model* model, const tmk_config* cfg, const char* path);
TMK_API void tmk_model_free(tmk_model* model);
TMK_API size_t tmk_model_vocab_size(const tmk_model* model);
/* JSON array of token ids; unknown words are an error. */
TMK_API tmk_status tmk_model_encode(const tmk_model* model, const char* text, char** out_json);

/* Watermarked generations. With prompt == NULL, experiment.n_pos prompts are
 * taken from the held-out file named by paths.heldout. Output: texts document. */
TMK_API tmk_status tmk_generate(const tmk_model* model, const tmk_config* cfg, const char* prompt, char** out_json);

/* input: a texts document or plain text. grouped != 0 scores each detector on
 * its own token group (series, parallel, hybrid). */
TMK_API tmk_status tmk_detect(const tmk_model* model, const tmk_config* cfg, const char* input, int grouped,
                              char** out_json);

/* Applies the config's "attack" to every text of a texts document. copy_paste
 * takes its host text from paths.heldout. */
TMK_API tmk_status tmk_attack(const tmk_model* model, const tmk_config* cfg, const char* texts_json, char** out_json);

/* Frequency-analysis estimate of the green list. corpus: texts document or
 * plain text; NULL collects stealing.budget_tokens of text watermarked with
 * the config's watermark, prompted from paths.heldout. */
TMK_API tmk_status tmk_steal(const tmk_model* model, const tmk_config* cfg, const char* corpus, char** out_json);

/* spoof.count texts biased toward an estimated green list. */
TMK_API tmk_status tmk_spoof(const tmk_model* model, const tmk_config* cfg, const char* greenlist_json,
                             char** out_json);

/* Fraction of texts the true-key logits detector scores above
 * stealing.z_spoof_threshold. */
TMK_API tmk_status tmk_asr(const tmk_model* model, const tmk_config* cfg, const char* texts_json, char** out_json);

/* Detection experiment per the "experiment" section. Any output pointer may be
 * NULL. records_csv holds one row per sample, roc_csv the curve points. */
TMK_API tmk_status tmk_eval(const tmk_model* model, const tmk_config* cfg, char** summary_json, char** records_csv,
                            char** roc_csv);

/* Hybrid entropy-gate sweep over sweep.alphas x sweep.betas; the configured
 * strategy is ignored. */
TMK_API tmk_status tmk_sweep(const tmk_model* model, const tmk_config* cfg, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
