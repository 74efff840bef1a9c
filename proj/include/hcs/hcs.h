/* hcs — hierarchical cloth simulation toolkit.
 *
 * C API over the simulation core: opaque handles, status-code returns, and a
 * per-thread error message (hcs_last_error). All physical quantities are SI.
 */
#ifndef HCS_H
#define HCS_H

#include <stdint.h>

#if defined(_WIN32)
#define HCS_API __declspec(dllexport)
#else
#define HCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hcs_status {
  HCS_OK = 0,
  HCS_ERR_INVALID_ARGUMENT = 1,
  HCS_ERR_IO = 2,
  HCS_ERR_FORMAT = 3,
  HCS_ERR_TRUNCATED = 4,
  HCS_ERR_DIVERGED = 5,
  HCS_ERR_INFERENCE = 6,
  HCS_ERR_TOPOLOGY = 7,
  HCS_ERR_UNKNOWN = 8
} hcs_status;

HCS_API const char* hcs_status_string(hcs_status status);

/* Message for the most recent failure on this thread; empty string if none. */
HCS_API const char* hcs_last_error(void);

HCS_API const char* hcs_version(void);

/* ------------------------------------------------------------------ */
/* Hierarchy                                                           */

typedef struct hcs_hierarchy hcs_hierarchy;

/* Regular grid base mesh subdivided `finer_levels` times by edge-midpoint
 * insertion. */
HCS_API hcs_status hcs_hierarchy_create_grid(int nx, int ny, double width,
                                             double height, int finer_levels,
                                             hcs_hierarchy** out);
HCS_API int hcs_hierarchy_levels(const hcs_hierarchy* h); /* N + 1 */
HCS_API hcs_status hcs_hierarchy_counts(const hcs_hierarchy* h, int level,
                                        uint64_t* vertices, uint64_t* edges,
                                        uint64_t* triangles);
HCS_API hcs_status hcs_hierarchy_export_obj(const hcs_hierarchy* h, int level,
                                            const char* path);
HCS_API void hcs_hierarchy_destroy(hcs_hierarchy* h);

/* ------------------------------------------------------------------ */
/* Scene configuration                                                 */

typedef struct hcs_config hcs_config;

/* Built-in catalog: "flag", "hang", "sphere", "stretch". */
HCS_API hcs_status hcs_config_create(const char* scene, hcs_config** out);
HCS_API hcs_status hcs_config_load(const char* path, hcs_config** out);
/* Dotted-key override mirroring the JSON config layout, e.g.
 * ("grid.nx", "8") or ("solver.gravity", "[0,-9.8,0]"). */
HCS_API hcs_status hcs_config_set(hcs_config* config, const char* key,
                                  const char* value);
HCS_API int hcs_config_frames(const hcs_config* config);
HCS_API void hcs_config_destroy(hcs_config* config);

/* ------------------------------------------------------------------ */
/* Simulation                                                          */

typedef struct hcs_sim hcs_sim;

/* method: "admm" or "cg" run conventional physics on `level`; "hybrid" steps
 * level 0 and infers the finer levels from the config's model files. */
HCS_API hcs_status hcs_sim_create(const hcs_config* config, const char* method,
                                  int level, hcs_sim** out);
HCS_API hcs_status hcs_sim_step(hcs_sim* sim);
HCS_API int hcs_sim_frame(const hcs_sim* sim);
/* Borrowed view of a level's positions (xyz triplets); valid until the next
 * step or destroy. */
HCS_API hcs_status hcs_sim_positions(const hcs_sim* sim, int level,
                                     const double** xyz, uint64_t* count);
/* Writes frame_%05d_l%d.obj files for the current frame into `dir`. */
HCS_API hcs_status hcs_sim_export_frame(hcs_sim* sim, const char* dir);
HCS_API void hcs_sim_destroy(hcs_sim* sim);

/* ------------------------------------------------------------------ */
/* Models                                                              */

typedef struct hcs_model hcs_model;

/* Glorot-initialized (seeded) model for `level` with `hidden_layers` hidden
 * layers of width `hidden_width`. */
HCS_API hcs_status hcs_model_create(uint32_t level, int hidden_layers,
                                    int hidden_width, uint64_t seed,
                                    hcs_model** out);
/* All-zero parameters; the inference pipeline then reproduces rest positions
 * for every inserted mass. */
HCS_API hcs_status hcs_model_create_zero(uint32_t level, int hidden_layers,
                                         int hidden_width, hcs_model** out);
HCS_API hcs_status hcs_model_load(const char* path, hcs_model** out);
HCS_API hcs_status hcs_model_save(const hcs_model* model, const char* path);
HCS_API int hcs_model_level(const hcs_model* model);
HCS_API void hcs_model_destroy(hcs_model* model);

/* ------------------------------------------------------------------ */
/* Dataset generation and training                                     */

/* Runs each config's conventional ADMM simulation at its finest level and
 * writes the (feature, ground-truth) pairs for `target_level` to `out_path`. */
HCS_API hcs_status hcs_dataset_generate(const hcs_config* const* configs,
                                        int config_count, int target_level,
                                        int frames_per_scene, uint64_t seed,
                                        const char* out_path);
HCS_API hcs_status hcs_dataset_info(const char* path, uint32_t* level,
                                    uint64_t* samples);

typedef struct hcs_train_options {
  int epochs;            /* >= 1 */
  int batch_size;        /* >= 1 */
  double learning_rate;  /* > 0 */
  double beta1, beta2, epsilon;
  uint64_t seed;
  int hidden_layers;     /* hidden layer count, default 2 */
  int hidden_width;      /* default 32 */
  const char* checkpoint_epochs; /* comma list, e.g. "100,1500,3000,5000"; NULL: final only */
  const char* checkpoint_dir;    /* NULL: no checkpoint files */
  int record_every;      /* extra loss-log cadence; 0: checkpoints only */
  int workers;           /* parallel gradient chunks; 1 = bit-reproducible default */
} hcs_train_options;

HCS_API void hcs_train_options_init(hcs_train_options* options);

/* Trains on a dataset file; writes the final model and an `epoch,loss` CSV
 * (pass NULL to skip either output). */
HCS_API hcs_status hcs_train(const char* dataset_path,
                             const hcs_train_options* options,
                             const char* model_out, const char* loss_csv_out);

/* Depth {2,3,4,5} x width {16,32,64,128} architecture comparison; writes
 * depth_*.csv / width_*.csv and sweep_summary.csv under out_dir. */
HCS_API hcs_status hcs_sweep(const char* dataset_path,
                             const hcs_train_options* options,
                             const char* out_dir);

/* ------------------------------------------------------------------ */
/* Benchmark                                                           */

/* CG / ADMM at the finest level vs. the hybrid pipeline; appends
 * `method,masses,mean_ms,std_ms` rows to a CSV at out_path. */
HCS_API hcs_status hcs_bench(const hcs_config* config, int frames, int warmup,
                             const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HCS_H */
