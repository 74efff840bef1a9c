#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/dataset.hpp"
#include "core/mlp.hpp"

namespace hcs {

struct TrainConfig {
  int epochs = 500;
  int batch_size = 256;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t seed = 0;
  std::vector<int> hidden = {32, 32};
  std::vector<int> checkpoint_epochs;  // empty: the final epoch only
  std::string checkpoint_dir;          // empty: no checkpoint files
  int record_every = 0;                // additionally log every k epochs
  int workers = 1;                     // parallel batch-gradient chunks

  void validate() const;
};

/// Eq.-style RMSE over a batch: sqrt( (1/n) sum_samples sum_components
/// (g - o)^2 ) with n the sample count; the 9 components are not normalized.
double rmse_loss(const MlpModel& model, std::span<const TrainingSample> batch);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Gradients of the mean squared-error surrogate (1/n) sum_s |o_s - g_s|^2
/// (the square of the reported RMSE; same minimizers) for every parameter.
Gradients backward(const MlpModel& model, std::span<const TrainingSample> batch);

struct AdamState {
  std::vector<Eigen::MatrixXd> m_weights, v_weights;
  std::vector<Eigen::VectorXd> m_biases, v_biases;
  int64_t step_count = 0;
};

AdamState make_adam_state(const MlpModel& model);

/// Bias-corrected Adam: theta -= lr * m_hat / sqrt(v_hat + eps).
void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

struct TrainResult {
  MlpModel model;
  std::vector<std::pair<int, double>> loss_log;  // (epoch, full-dataset RMSE)
};

/// Mini-batched Adam training with seeded shuffling; deterministic for a
/// fixed seed and worker count. Full-dataset loss is recorded at every
/// checkpoint epoch (checkpoint files written if checkpoint_dir is set); a
/// non-finite loss aborts with the last good checkpoint left on disk.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

void write_loss_csv(const std::vector<std::pair<int, double>>& log,
                    const std::string& path);

struct SweepEntry {
  int depth = 0;  // number of weight layers
  int width = 0;
  std::string family;  // "depth" or "width"
  std::vector<std::pair<int, double>> losses;
  bool failed = false;
  std::string error;
};

/// Fig.-9-style experiment: depths {2,3,4,5} at width 32 and widths
/// {16,32,64,128} at depth 3, identical seed and budget. Per-configuration
/// failures are recorded and the sweep continues.
std::vector<SweepEntry> sweep_architectures(const Dataset& dataset,
                                            const TrainConfig& base,
                                            const std::vector<int>& depths,
                                            const std::vector<int>& widths);

/// Writes depth_*.csv / width_*.csv loss curves plus sweep_summary.csv
/// (family,depth,width,final_loss,status) under `dir`.
void write_sweep_reports(const std::vector<SweepEntry>& entries,
                         const std::string& dir);

}  // namespace hcs
