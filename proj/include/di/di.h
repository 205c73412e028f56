#ifndef DI_DI_H
#define DI_DI_H

/* Public C interface of the domain-independent gesture recognition
 * library. All entry points return a di_status; on failure the handle
 * out-params are untouched and di_last_error() describes the problem.
 * Handles are opaque and must be released with the matching _free call.
 * Configuration is passed as JSON strings; unknown keys are rejected. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DI_API __declspec(dllexport)
#else
#define DI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum di_status {
  DI_OK = 0,
  DI_ERROR_CONFIG = 2, /* invalid configuration, arguments, or file contents */
  DI_ERROR_RUNTIME = 3 /* numeric or I/O failure during a valid operation */
} di_status;

typedef struct di_dataset di_dataset;
typedef struct di_model di_model;
typedef struct di_signmap di_signmap;

DI_API const char* di_version(void);

/* Message for the most recent failure on this thread; never NULL. */
DI_API const char* di_last_error(void);

/* Free a string returned through a char** out-param. */
DI_API void di_string_free(char* s);

/* ---- datasets ------------------------------------------------------- */

/* Generate the synthetic benchmark. config_json keys (all optional):
 * gestures, domains, reps, rows, cols, noise_sigma, gain_spread,
 * offset_spread, warp_spread, seed. */
DI_API di_status di_dataset_generate(const char* config_json, di_dataset** out);

/* Import NDJSON frame streams. manifest_json:
 * {"entries":[{"path":..., "domain":d, "gesture":g}, ...],
 *  "target_cols":128, "kalman":{"q":..,"r":..,"p0":..},
 *  "gestures":M?, "domains":N?} — class counts default to max label + 1. */
DI_API di_status di_dataset_import(const char* manifest_json, di_dataset** out);

DI_API di_status di_dataset_load(const char* path, di_dataset** out);
DI_API di_status di_dataset_save(const di_dataset* dataset, const char* path);

/* {"count":..,"rows":..,"cols":..,"gestures":..,"domains":..,"seed":..,
 *  "provenance":..} */
DI_API di_status di_dataset_info_json(const di_dataset* dataset, char** out_json);
DI_API int64_t di_dataset_count(const di_dataset* dataset);

/* Copy labels into caller arrays of length di_dataset_count(); either
 * pointer may be NULL to skip that channel. */
DI_API di_status di_dataset_labels(const di_dataset* dataset, uint16_t* domains,
                                   uint16_t* gestures);

/* Copy one flattened sample (rows*cols floats) into out. */
DI_API di_status di_dataset_sample(const di_dataset* dataset, int64_t index, float* out);

/* split_json: {"protocol":"mixed"|"lodo", "train_frac":0.8,
 *  "held_domain":0, "seed":42} — train_frac for mixed, held_domain for
 * lodo. */
DI_API di_status di_dataset_split(const di_dataset* dataset, const char* split_json,
                                  di_dataset** out_train, di_dataset** out_test);

DI_API void di_dataset_free(di_dataset* dataset);

/* ---- models --------------------------------------------------------- */

/* Train the domain-classification DCNN. hyper_json keys (optional):
 * epochs, lr, momentum, batch, hidden, strict_paper_arch, seed, verbose. */
DI_API di_status di_train_domain_dcnn(const di_dataset* train, const char* hyper_json,
                                      di_model** out);

/* Fit a gesture recognizer. config_json: {"kind":"knn"|"svm"|"cnn"} plus
 * kind-specific keys (knn: k; svm: lambda, epochs, lr, seed; cnn: same
 * keys as di_train_domain_dcnn). */
DI_API di_status di_fit_recognizer(const di_dataset* train, const char* config_json,
                                   di_model** out);

DI_API di_status di_model_load(const char* path, di_model** out);
DI_API di_status di_model_save(const di_model* model, const char* path);

/* {"kind":..,"classes":..,"rows":..,"cols":..} plus kind extras. */
DI_API di_status di_model_info_json(const di_model* model, char** out_json);

/* Predicted labels into a caller array of length di_dataset_count().
 * Domain models emit domain labels, recognizers gesture labels. */
DI_API di_status di_model_predict(const di_model* model, const di_dataset* dataset,
                                  uint16_t* out_labels);

/* Accuracy against the label channel matching the model kind. */
DI_API di_status di_model_accuracy(const di_model* model, const di_dataset* dataset,
                                   double* out_accuracy);

DI_API void di_model_free(di_model* model);

/* ---- domain-gap elimination ----------------------------------------- */

/* Per-sample gradient sign maps from a domain model. opts_json:
 * {"label_source":"true"|"predicted"}. */
DI_API di_status di_signmap_compute(const di_model* domain_model,
                                    const di_dataset* dataset, const char* opts_json,
                                    di_signmap** out);

DI_API int64_t di_signmap_count(const di_signmap* maps);

/* Copy one sign map (rows*cols entries, each -1/0/+1) into out. */
DI_API di_status di_signmap_values(const di_signmap* maps, int64_t index, int8_t* out);

/* x_DI = x + alpha * sign; labels are carried over unchanged. */
DI_API di_status di_dataset_apply_dge(const di_dataset* dataset, const di_signmap* maps,
                                      double alpha, di_dataset** out);

/* One-shot sign-map + apply. opts_json: {"alpha":0.1,
 *  "label_source":"true"|"predicted"}. */
DI_API di_status di_dataset_convert(const di_model* domain_model,
                                    const di_dataset* dataset, const char* opts_json,
                                    di_dataset** out);

DI_API void di_signmap_free(di_signmap* maps);

/* ---- analysis utilities --------------------------------------------- */

/* Two-component PCA scores into caller arrays of length
 * di_dataset_count(). */
DI_API di_status di_pca_project(const di_dataset* dataset, double* pc1, double* pc2);

/* Kalman-smooth a series in place semantics: out may alias series.
 * params_json (optional keys): {"q":1e-5,"r":1e-2,"p0":1.0}. */
DI_API di_status di_kalman_denoise(const double* series, int64_t n,
                                   const char* params_json, double* out);

DI_API di_status di_file_sha256(const char* path, char** out_hex);

#ifdef __cplusplus
}
#endif

#endif /* DI_DI_H */
