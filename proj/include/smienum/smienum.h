#ifndef SMIENUM_H
#define SMIENUM_H

/* C interface to the smienum library.  Every fallible call returns a
 * smienum_status; on failure smienum_last_error() describes the problem
 * (thread-local, valid until the next call on the same thread).  Objects
 * returned through out-pointers are owned by the caller and released with
 * the matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SMIENUM_API __declspec(dllexport)
#else
#define SMIENUM_API __attribute__((visibility("default")))
#endif

typedef enum {
  SMIENUM_OK = 0,
  SMIENUM_E_INVALID_ARGUMENT = 1,
  SMIENUM_E_PARSE = 2,
  SMIENUM_E_SIZE_LIMIT = 3,
  SMIENUM_E_LENGTH = 4,
  SMIENUM_E_UNKNOWN_TOKEN = 5,
  SMIENUM_E_IO = 6,
  SMIENUM_E_SCHEMA = 7,
  SMIENUM_E_DUPLICATE_ID = 8,
  SMIENUM_E_NUMERIC = 9,
  SMIENUM_E_VOCAB_MISMATCH = 10,
  SMIENUM_E_INVALID_PERMUTATION = 11,
  SMIENUM_E_INTERNAL = 70
} smienum_status;

typedef struct smienum_molecule smienum_molecule;
typedef struct smienum_strings smienum_strings;
typedef struct smienum_vocab smienum_vocab;
typedef struct smienum_model smienum_model;
typedef struct smienum_predictions smienum_predictions;
typedef struct smienum_report smienum_report;
typedef struct smienum_search smienum_search;

SMIENUM_API const char *smienum_version(void);
SMIENUM_API const char *smienum_status_name(smienum_status status);
SMIENUM_API const char *smienum_last_error(void);
/* Character offset of the last parse error, or -1. */
SMIENUM_API long smienum_last_error_position(void);

SMIENUM_API void smienum_string_free(char *s);

/* ---- string lists ---- */

SMIENUM_API size_t smienum_strings_count(const smienum_strings *list);
SMIENUM_API const char *smienum_strings_at(const smienum_strings *list,
                                           size_t i);
SMIENUM_API void smienum_strings_free(smienum_strings *list);

/* ---- molecules ---- */

/* stripped_stereo (optional) is set to 1 when stereo marks were dropped. */
SMIENUM_API smienum_status smienum_parse(const char *smiles,
                                         smienum_molecule **out,
                                         int *stripped_stereo);
SMIENUM_API void smienum_molecule_free(smienum_molecule *mol);
SMIENUM_API size_t smienum_molecule_atom_count(const smienum_molecule *mol);
SMIENUM_API size_t smienum_molecule_bond_count(const smienum_molecule *mol);

/* order may be NULL for the identity order; otherwise a permutation of
 * 0..atom_count-1 giving the DFS start atom and neighbor priority. */
SMIENUM_API smienum_status smienum_write(const smienum_molecule *mol,
                                         const size_t *order, size_t n,
                                         char **out);
SMIENUM_API smienum_status smienum_canonical(const smienum_molecule *mol,
                                             char **out);
SMIENUM_API smienum_status smienum_canonicalize(const char *smiles,
                                                char **out);

SMIENUM_API smienum_status smienum_enumerate_random(
    const smienum_molecule *mol, int attempts, uint64_t seed,
    smienum_strings **out);
SMIENUM_API smienum_status smienum_enumerate_exhaustive(
    const smienum_molecule *mol, smienum_strings **out);
/* Per-molecule seed derived from a global seed and a molecule id. */
SMIENUM_API uint64_t smienum_molecule_seed(uint64_t seed, const char *id);

/* ---- vocabulary and one-hot encoding ---- */

SMIENUM_API smienum_status smienum_vocab_build(const char *const *corpus,
                                               size_t n, int margin,
                                               smienum_vocab **out);
SMIENUM_API smienum_status smienum_vocab_load(const char *path,
                                              smienum_vocab **out);
SMIENUM_API smienum_status smienum_vocab_save(const smienum_vocab *vocab,
                                              const char *path);
SMIENUM_API void smienum_vocab_free(smienum_vocab *vocab);
SMIENUM_API int smienum_vocab_size(const smienum_vocab *vocab);
SMIENUM_API int smienum_vocab_max_len(const smienum_vocab *vocab);

/* Writes a row-major max_len x size 0/1 matrix; capacity counts bytes. */
SMIENUM_API smienum_status smienum_encode(const smienum_vocab *vocab,
                                          const char *smiles,
                                          uint8_t *matrix, size_t capacity);
SMIENUM_API smienum_status smienum_decode(const smienum_vocab *vocab,
                                          const uint8_t *matrix,
                                          size_t size, char **out);

/* ---- models ---- */

typedef struct {
  int num_lstm_layers;
  int units;
  double dropout_w;
  double dropout_u;
  int num_dense_hidden;
  int dense_size;
  double l1;
  double l2;
  double learning_rate;
  int batch_size;
  int epochs;
  uint64_t seed;
} smienum_hyperparams;

SMIENUM_API void smienum_hyperparams_enumerated(smienum_hyperparams *hp);
SMIENUM_API void smienum_hyperparams_canonical(smienum_hyperparams *hp);
SMIENUM_API smienum_status smienum_hyperparams_validate(
    const smienum_hyperparams *hp);

/* vocab may be NULL to skip the fingerprint check. */
SMIENUM_API smienum_status smienum_model_load(const char *path,
                                              const smienum_vocab *vocab,
                                              smienum_model **out);
SMIENUM_API void smienum_model_free(smienum_model *model);
SMIENUM_API void smienum_model_hyperparams(const smienum_model *model,
                                           smienum_hyperparams *out);
SMIENUM_API smienum_status smienum_model_predict(const smienum_model *model,
                                                 const smienum_vocab *vocab,
                                                 const char *const *smiles,
                                                 size_t n, double *out);

/* ---- file workflows ---- */

typedef struct {
  const char *input;
  const char *out_dir;
  const char *id_column;
  const char *smiles_column;
  const char *activity_column;
  double test_fraction;
  int attempts;
  uint64_t seed;
  int margin;
  const char *invocation;
} smienum_augment_options;

typedef struct {
  size_t kept;
  size_t dropped;
  size_t train_molecules;
  size_t test_molecules;
  size_t train_rows;
  size_t test_rows;
  double scaler_mean;
  double scaler_std;
  int max_len;
  int vocab_size;
} smienum_augment_summary;

SMIENUM_API void smienum_augment_options_init(smienum_augment_options *o);
SMIENUM_API smienum_status smienum_augment(const smienum_augment_options *o,
                                           smienum_augment_summary *summary);

typedef void (*smienum_epoch_callback)(void *user, int epoch,
                                       double train_mse, double train_loss,
                                       double test_mse);

typedef struct {
  const char *dataset_dir;
  const char *view; /* "enumerated" or "canonical" */
  smienum_hyperparams hp;
  const char *checkpoint;
  const char *trace; /* NULL: <checkpoint>.trace.csv */
  const char *invocation;
  smienum_epoch_callback on_epoch;
  void *user;
} smienum_train_options;

typedef struct {
  int best_epoch;
  double best_test_mse;
  long updates;
  size_t train_rows;
  size_t test_rows;
} smienum_train_summary;

SMIENUM_API void smienum_train_options_init(smienum_train_options *o);
SMIENUM_API smienum_status smienum_train(const smienum_train_options *o,
                                         smienum_train_summary *summary);

typedef struct {
  const char *checkpoint;
  const char *vocab;
  const char *const *smiles;
  size_t smiles_count;
  const char *table; /* optional CSV with molecule_id,smiles */
  int average;
  int attempts;
  uint64_t seed;
} smienum_predict_options;

typedef struct {
  const char *key;
  size_t variants;
  double value;
} smienum_prediction;

SMIENUM_API void smienum_predict_options_init(smienum_predict_options *o);
SMIENUM_API smienum_status smienum_predict(const smienum_predict_options *o,
                                           smienum_predictions **out);
SMIENUM_API size_t smienum_predictions_count(const smienum_predictions *p);
SMIENUM_API const smienum_prediction *smienum_predictions_at(
    const smienum_predictions *p, size_t i);
SMIENUM_API void smienum_predictions_free(smienum_predictions *p);

typedef struct {
  const char *dataset_dir;
  const char *canonical_model;  /* optional */
  const char *enumerated_model; /* optional */
  const char *out_prefix;       /* optional */
  const char *invocation;
} smienum_eval_options;

SMIENUM_API smienum_status smienum_eval(const smienum_eval_options *o,
                                        smienum_report **out);
SMIENUM_API const char *smienum_report_text(const smienum_report *r);
/* fold is "train" or "test"; view "averaged" selects molecule means. */
SMIENUM_API smienum_status smienum_report_cell(const smienum_report *r,
                                               const char *model,
                                               const char *view,
                                               const char *fold, double *r2,
                                               double *rms, size_t *count);
SMIENUM_API void smienum_report_free(smienum_report *r);

typedef struct {
  int trial;
  smienum_hyperparams hp;
  double best_test_mse;
  int best_epoch;
} smienum_trial;

typedef void (*smienum_trial_callback)(void *user, const smienum_trial *t);

typedef struct {
  const char *dataset_dir;
  const char *view;
  int trials;
  uint64_t seed;
  smienum_hyperparams base; /* batch_size and epochs used per trial */
  const char *out_csv;      /* optional */
  const char *invocation;
  smienum_trial_callback on_trial;
  void *user;
} smienum_search_options;

SMIENUM_API void smienum_search_options_init(smienum_search_options *o);
SMIENUM_API smienum_status smienum_run_search(const smienum_search_options *o,
                                              smienum_search **out);
SMIENUM_API size_t smienum_search_count(const smienum_search *s);
SMIENUM_API size_t smienum_search_best(const smienum_search *s);
SMIENUM_API const smienum_trial *smienum_search_at(const smienum_search *s,
                                                   size_t i);
SMIENUM_API void smienum_search_free(smienum_search *s);

#ifdef __cplusplus
}
#endif

#endif
