/*
 * eham.h -- C interface to the entropic hetero-associative memory engine.
 *
 * All objects are opaque handles created by *_new / *_load functions and
 * released with the matching *_free. Every fallible call returns an
 * eham_status; on failure eham_last_error() describes the problem (the
 * message is per thread and valid until the next failing call on it).
 */
#ifndef EHAM_EHAM_H
#define EHAM_EHAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EHAM_BUILDING_LIBRARY)
#    define EHAM_API __declspec(dllexport)
#  else
#    define EHAM_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__)
#  define EHAM_API __attribute__((visibility("default")))
#else
#  define EHAM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eham_status {
  EHAM_OK = 0,
  EHAM_ERR_INVALID_ARGUMENT = 1,
  EHAM_ERR_PARSE = 2,
  EHAM_ERR_IO = 3,
  /* retrieval produced no object (empty column or no recognized candidate) */
  EHAM_ERR_RETRIEVAL_FAILED = 4,
  EHAM_ERR_INTERNAL = 5
} eham_status;

typedef enum eham_direction { EHAM_A2B = 0, EHAM_B2A = 1 } eham_direction;
typedef enum eham_method { EHAM_RS = 0, EHAM_ST = 1, EHAM_SS = 2 } eham_method;

EHAM_API const char* eham_last_error(void);
EHAM_API const char* eham_version(void);
EHAM_API void eham_string_free(char* s);

/* A borrowed view of one quantized function. `weights` may be NULL for
 * unit weights. */
typedef struct eham_fn_view {
  const uint16_t* values;
  const uint32_t* weights;
  size_t n_args;
  uint32_t n_levels;
} eham_fn_view;

typedef struct eham_params {
  double iota;
  double kappa;
  uint64_t xi;
} eham_params;

typedef struct eham_recognition {
  int accepted;
  uint64_t violations;
  double rho;
  int degenerate;
} eham_recognition;

/* ---- memory register ---------------------------------------------------- */

typedef struct eham_memory eham_memory;

EHAM_API eham_status eham_memory_new(uint32_t n, uint32_t m, uint32_t p,
                                     uint32_t q, uint32_t cap,
                                     eham_memory** out);
EHAM_API void eham_memory_free(eham_memory* mem);
EHAM_API eham_status eham_memory_load(const char* path, eham_memory** out);
EHAM_API eham_status eham_memory_save(const eham_memory* mem, const char* path);

/* dims receives n, m, p, q */
EHAM_API eham_status eham_memory_dims(const eham_memory* mem, uint32_t dims[4],
                                      uint32_t* cap);
EHAM_API eham_status eham_memory_cell(const eham_memory* mem, uint32_t i,
                                      uint32_t j, uint32_t k, uint32_t l,
                                      uint16_t* out);

EHAM_API eham_status eham_memory_register(eham_memory* mem, eham_fn_view fa,
                                          eham_fn_view fb);
EHAM_API eham_status eham_memory_recognize(const eham_memory* mem,
                                           eham_fn_view fa, eham_fn_view fb,
                                           const eham_params* params,
                                           eham_recognition* out);

EHAM_API eham_status eham_memory_omega_pair(const eham_memory* mem, uint32_t i,
                                            uint32_t j, double* out);
EHAM_API eham_status eham_memory_omega_mean(const eham_memory* mem,
                                            double* out);
EHAM_API eham_status eham_memory_thresholded(const eham_memory* mem,
                                             double iota, uint32_t i,
                                             uint32_t j, uint32_t k,
                                             uint32_t l, uint16_t* out);
EHAM_API eham_status eham_memory_entropy_pair(const eham_memory* mem,
                                              uint32_t i, uint32_t j,
                                              double* out);
EHAM_API eham_status eham_memory_entropy(const eham_memory* mem, double* out);

/* ---- retrieval ------------------------------------------------------------ */

typedef struct eham_search_config {
  uint32_t n_samples;
  uint32_t descent_budget;
  uint64_t seed;
  eham_params gate;
  int uniform_fallback;
} eham_search_config;

typedef struct eham_outcome_info {
  double distance; /* +inf when no candidate passed the gate */
  uint64_t evaluations;
  int failed;
} eham_outcome_info;

/* n_samples 128, descent_budget 800, seed 0, gate (0, 0, 0) */
EHAM_API void eham_search_config_default(eham_search_config* cfg);

/* Writes the target-field plane (args x levels, argument-major) into
 * `cells`, which must hold exactly `len` = args * levels doubles. */
EHAM_API eham_status eham_reduce(const eham_memory* mem, eham_fn_view cue,
                                 eham_direction dir, double* cells,
                                 size_t len);

EHAM_API eham_status eham_plane_distance(const double* cells, uint32_t n_args,
                                         uint32_t n_levels, eham_fn_view f,
                                         const eham_params* params,
                                         double* out);

EHAM_API eham_status eham_sample_plane(const double* cells, uint32_t n_args,
                                       uint32_t n_levels, uint64_t seed,
                                       int uniform_fallback, uint16_t* out);

/* Retrieves the partner of `cue`. `out_values` receives the target-field
 * function (out_len must equal its argument count). Returns
 * EHAM_ERR_RETRIEVAL_FAILED, with info->failed set, when nothing was
 * retrieved. */
EHAM_API eham_status eham_retrieve(const eham_memory* mem, eham_method method,
                                   eham_direction dir, eham_fn_view cue,
                                   const eham_search_config* cfg,
                                   uint16_t* out_values, size_t out_len,
                                   eham_outcome_info* info);

/* ---- featurized corpora (EHFN files) -------------------------------------- */

typedef struct eham_corpus eham_corpus;

EHAM_API eham_status eham_corpus_new(uint32_t n_args, uint32_t n_levels,
                                     eham_corpus** out);
EHAM_API void eham_corpus_free(eham_corpus* corpus);
EHAM_API eham_status eham_corpus_load(const char* path, eham_corpus** out);
EHAM_API eham_status eham_corpus_save(const eham_corpus* corpus,
                                      const char* path);
/* Reads an IDX image/label pair (gzip accepted) and featurizes it. */
EHAM_API eham_status eham_corpus_from_idx(const char* images_path,
                                          const char* labels_path,
                                          int transpose, eham_corpus** out);
EHAM_API size_t eham_corpus_size(const eham_corpus* corpus);
EHAM_API uint32_t eham_corpus_n_args(const eham_corpus* corpus);
EHAM_API uint32_t eham_corpus_n_levels(const eham_corpus* corpus);
EHAM_API eham_status eham_corpus_get(const eham_corpus* corpus, size_t index,
                                     uint16_t* label, uint16_t* values,
                                     size_t len);
EHAM_API eham_status eham_corpus_append(eham_corpus* corpus, uint16_t label,
                                        const uint16_t* values, size_t len);

/* 28x28 grayscale -> 64 values in 0..15 */
EHAM_API eham_status eham_featurize(const uint8_t* pixels, uint32_t width,
                                    uint32_t height, uint16_t out[64]);
EHAM_API eham_status eham_write_pgm(const uint16_t* values, size_t len,
                                    uint32_t scale, const char* path);

/* ---- experiments ------------------------------------------------------------ */

typedef struct eham_experiment eham_experiment;
typedef void (*eham_progress_fn)(const char* message, void* user);

EHAM_API eham_status eham_experiment_load(const char* config_path,
                                          eham_experiment** out);
EHAM_API eham_status eham_experiment_parse(const char* config_text,
                                           const char* base_dir,
                                           eham_experiment** out);
EHAM_API void eham_experiment_free(eham_experiment* exp);
EHAM_API eham_status eham_experiment_set_jobs(eham_experiment* exp,
                                              unsigned jobs);
/* Runs every configured fold. On success *csv_out holds the results CSV
 * (per-fold rows followed by mean/sd rows); free it with
 * eham_string_free. */
EHAM_API eham_status eham_experiment_run(eham_experiment* exp,
                                         eham_progress_fn progress, void* user,
                                         char** csv_out);
/* Test-split accuracy of the surrogate classifiers, after a run. */
EHAM_API eham_status eham_experiment_classifier_accuracy(
    const eham_experiment* exp, uint32_t fold, double* digits,
    double* letters);

/* Writes a synthetic glyph corpus as IDX files <prefix>-images-idx3-ubyte
 * and <prefix>-labels-idx1-ubyte. kind 0 = digits, 1 = letters. */
EHAM_API eham_status eham_synth_write(int kind, size_t per_class,
                                      uint64_t seed, double distortion,
                                      const char* dir, const char* prefix);

#ifdef __cplusplus
}
#endif

#endif /* EHAM_EHAM_H */
