#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "core/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hcs {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be >= 1");
  if (learning_rate <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "learning rate must be > 0");
  }
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "Adam betas must be in [0, 1)");
  }
  if (epsilon <= 0.0) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
}

namespace {

struct Workspace {
  std::vector<Eigen::MatrixXd> z;  // pre-activations per layer
  std::vector<Eigen::MatrixXd> a;  // activations; a[0] is the input
  Eigen::MatrixXd delta;
  Eigen::MatrixXd delta_prev;
};

// Unnormalized gradient accumulation for `count` samples starting at
// `offset`, indirected through `order` when given: adds
// sum_s 2 (o_s - g_s) ... products into `grads`.
void accumulate_chunk(const MlpModel& model,
                      std::span<const TrainingSample> samples,
                      const std::vector<size_t>* order, size_t offset,
                      size_t count, Workspace& ws, Gradients& grads) {
  const int layers = model.layer_count();
  const Eigen::Index batch = static_cast<Eigen::Index>(count);

  ws.a.resize(static_cast<size_t>(layers) + 1);
  ws.z.resize(static_cast<size_t>(layers));
  ws.a[0].resize(model.input_dim(), batch);
  Eigen::MatrixXd targets(model.output_dim(), batch);
  for (Eigen::Index s = 0; s < batch; ++s) {
    size_t i = offset + static_cast<size_t>(s);
    const TrainingSample& sample = samples[order ? (*order)[i] : i];
    ws.a[0].col(s) = sample.input.cast<double>();
    targets.col(s) = sample.target.cast<double>();
  }

  for (int l = 0; l < layers; ++l) {
    auto& z = ws.z[static_cast<size_t>(l)];
    z.noalias() = model.weights[static_cast<size_t>(l)] * ws.a[static_cast<size_t>(l)];
    z.colwise() += model.biases[static_cast<size_t>(l)];
    if (l + 1 < layers) {
      ws.a[static_cast<size_t>(l) + 1] = z.cwiseMax(0.0);
    } else {
      ws.a[static_cast<size_t>(l) + 1] = z;
    }
  }

  ws.delta = 2.0 * (ws.a[static_cast<size_t>(layers)] - targets);
  for (int l = layers - 1; l >= 0; --l) {
    grads.weights[static_cast<size_t>(l)].noalias() +=
        ws.delta * ws.a[static_cast<size_t>(l)].transpose();
    grads.biases[static_cast<size_t>(l)] += ws.delta.rowwise().sum();
    if (l > 0) {
      ws.delta_prev.noalias() =
          model.weights[static_cast<size_t>(l)].transpose() * ws.delta;
      ws.delta_prev.array() *=
          (ws.z[static_cast<size_t>(l) - 1].array() > 0.0).cast<double>();
      std::swap(ws.delta, ws.delta_prev);
    }
  }
}

Gradients make_zero_gradients(const MlpModel& model) {
  Gradients g;
  for (size_t l = 0; l < model.weights.size(); ++l) {
    g.weights.emplace_back(
        Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    g.biases.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }
  return g;
}

void scale_gradients(Gradients& g, double factor) {
  for (auto& w : g.weights) w *= factor;
  for (auto& b : g.biases) b *= factor;
}

double sum_squared_error(const MlpModel& model,
                         std::span<const TrainingSample> samples) {
  constexpr Eigen::Index kChunk = 4096;
  double total = 0.0;
  Eigen::MatrixXd inputs, targets;
  for (size_t start = 0; start < samples.size(); start += kChunk) {
    Eigen::Index n = static_cast<Eigen::Index>(
        std::min<size_t>(kChunk, samples.size() - start));
    inputs.resize(9, n);
    targets.resize(9, n);
    for (Eigen::Index s = 0; s < n; ++s) {
      inputs.col(s) = samples[start + static_cast<size_t>(s)].input.cast<double>();
      targets.col(s) = samples[start + static_cast<size_t>(s)].target.cast<double>();
    }
    total += (forward_batch(model, inputs) - targets).squaredNorm();
  }
  return total;
}

}  // namespace

double rmse_loss(const MlpModel& model, std::span<const TrainingSample> batch) {
  if (batch.empty()) {
    throw Error(ErrorCode::InvalidArgument, "loss of an empty batch is undefined");
  }
  return std::sqrt(sum_squared_error(model, batch) /
                   static_cast<double>(batch.size()));
}

Gradients backward(const MlpModel& model, std::span<const TrainingSample> batch) {
  if (batch.empty()) {
    throw Error(ErrorCode::InvalidArgument, "gradient of an empty batch is undefined");
  }
  Gradients grads = make_zero_gradients(model);
  Workspace ws;
  accumulate_chunk(model, batch, nullptr, 0, batch.size(), ws, grads);
  scale_gradients(grads, 1.0 / static_cast<double>(batch.size()));
  return grads;
}

AdamState make_adam_state(const MlpModel& model) {
  AdamState s;
  for (size_t l = 0; l < model.weights.size(); ++l) {
    s.m_weights.emplace_back(
        Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    s.v_weights.emplace_back(
        Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    s.m_biases.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    s.v_biases.emplace_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }
  return s;
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  if (grads.weights.size() != model.weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "gradient/model layer mismatch");
  }
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step_count));

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = config.beta2 * v.array() + (1.0 - config.beta2) * grad.array().square();
    param.array() -= config.learning_rate * (m.array() / bc1) /
                     ((v.array() / bc2) + config.epsilon).sqrt();
  };
  for (size_t l = 0; l < model.weights.size(); ++l) {
    update(model.weights[l], grads.weights[l], state.m_weights[l], state.v_weights[l]);
    update(model.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l]);
  }
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.samples.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot train on an empty dataset");
  }

  std::vector<int> checkpoints = config.checkpoint_epochs;
  if (checkpoints.empty()) checkpoints.push_back(config.epochs);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());

  auto is_checkpoint = [&](int epoch) {
    return std::binary_search(checkpoints.begin(), checkpoints.end(), epoch);
  };
  auto records_loss = [&](int epoch) {
    return is_checkpoint(epoch) ||
           (config.record_every > 0 && epoch % config.record_every == 0) ||
           epoch == config.epochs;
  };

  TrainResult result;
  result.model = make_model(dataset.level, config.hidden);
  init_model(result.model, config.seed);
  AdamState adam = make_adam_state(result.model);

  const size_t n = dataset.samples.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 gen = seeded_rng(config.seed, 1);

  const int workers =
#ifdef _OPENMP
      std::max(1, config.workers);
#else
      1;
#endif
  std::vector<Workspace> workspaces(static_cast<size_t>(workers));
  std::vector<Gradients> partials;
  for (int w = 0; w < workers; ++w) {
    partials.push_back(make_zero_gradients(result.model));
  }
  Gradients grads = make_zero_gradients(result.model);

  std::string last_checkpoint;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_in_place(order, gen);
    for (size_t start = 0; start < n; start += static_cast<size_t>(config.batch_size)) {
      const size_t batch = std::min<size_t>(config.batch_size, n - start);
      const size_t chunk = (batch + static_cast<size_t>(workers) - 1) /
                           static_cast<size_t>(workers);

#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) num_threads(workers)
#endif
      for (int w = 0; w < workers; ++w) {
        for (auto& g : partials[static_cast<size_t>(w)].weights) g.setZero();
        for (auto& g : partials[static_cast<size_t>(w)].biases) g.setZero();
        size_t lo = std::min(batch, static_cast<size_t>(w) * chunk);
        size_t hi = std::min(batch, lo + chunk);
        if (lo >= hi) continue;
        accumulate_chunk(result.model, dataset.samples, &order, start + lo,
                         hi - lo, workspaces[static_cast<size_t>(w)],
                         partials[static_cast<size_t>(w)]);
      }

      for (size_t l = 0; l < grads.weights.size(); ++l) {
        grads.weights[l].setZero();
        grads.biases[l].setZero();
      }
      for (int w = 0; w < workers; ++w) {  // fixed-order reduction
        for (size_t l = 0; l < grads.weights.size(); ++l) {
          grads.weights[l] += partials[static_cast<size_t>(w)].weights[l];
          grads.biases[l] += partials[static_cast<size_t>(w)].biases[l];
        }
      }
      scale_gradients(grads, 1.0 / static_cast<double>(batch));
      adam_step(result.model, grads, adam, config);
    }

    if (records_loss(epoch)) {
      double loss = rmse_loss(result.model, dataset.samples);
      if (!std::isfinite(loss)) {
        std::string detail = last_checkpoint.empty()
                                 ? "no checkpoint written yet"
                                 : "last good checkpoint: " + last_checkpoint;
        throw Error(ErrorCode::Diverged,
                    "training loss became non-finite at epoch " +
                        std::to_string(epoch) + " (" + detail + ")");
      }
      result.loss_log.emplace_back(epoch, loss);
      if (is_checkpoint(epoch) && !config.checkpoint_dir.empty()) {
        std::filesystem::create_directories(config.checkpoint_dir);
        std::string path = config.checkpoint_dir + "/model_l" +
                           std::to_string(dataset.level) + "_e" +
                           std::to_string(epoch) + ".hcsnn";
        save_model(result.model, path);
        last_checkpoint = path;
      }
    }
  }
  return result;
}

void write_loss_csv(const std::vector<std::pair<int, double>>& log,
                    const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(
      std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  if (std::fprintf(f.get(), "epoch,loss\n") < 0) {
    throw Error(ErrorCode::Io, "write failed for '" + path + "'");
  }
  for (const auto& [epoch, loss] : log) {
    if (std::fprintf(f.get(), "%d,%.17g\n", epoch, loss) < 0) {
      throw Error(ErrorCode::Io, "write failed for '" + path + "'");
    }
  }
}

std::vector<SweepEntry> sweep_architectures(const Dataset& dataset,
                                            const TrainConfig& base,
                                            const std::vector<int>& depths,
                                            const std::vector<int>& widths) {
  std::vector<SweepEntry> entries;
  auto run = [&](const std::string& family, int depth, int width) {
    SweepEntry entry;
    entry.family = family;
    entry.depth = depth;
    entry.width = width;
    TrainConfig cfg = base;
    cfg.hidden.assign(static_cast<size_t>(depth) - 1, width);
    cfg.checkpoint_dir.clear();
    try {
      entry.losses = train(dataset, cfg).loss_log;
    } catch (const Error& e) {
      entry.failed = true;
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  };
  for (int d : depths) run("depth", d, 32);
  for (int w : widths) run("width", 3, w);
  return entries;
}

void write_sweep_reports(const std::vector<SweepEntry>& entries,
                         const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const SweepEntry& e : entries) {
    std::string name = e.family == "depth"
                           ? "depth_" + std::to_string(e.depth)
                           : "width_" + std::to_string(e.width);
    if (!e.failed) write_loss_csv(e.losses, dir + "/" + name + ".csv");
  }
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(
      std::fopen((dir + "/sweep_summary.csv").c_str(), "wb"), &std::fclose);
  if (!f) throw Error(ErrorCode::Io, "cannot open sweep summary for writing");
  std::fprintf(f.get(), "family,depth,width,final_loss,status\n");
  for (const SweepEntry& e : entries) {
    if (e.failed) {
      std::fprintf(f.get(), "%s,%d,%d,,failed\n", e.family.c_str(), e.depth, e.width);
    } else {
      std::fprintf(f.get(), "%s,%d,%d,%.17g,ok\n", e.family.c_str(), e.depth,
                   e.width, e.losses.back().second);
    }
  }
}

}  // namespace hcs
