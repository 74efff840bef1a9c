#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace hcs {

/// Fully connected network with a rectifier after every layer except the
/// last. Default shape is 9 -> 32 -> 32 -> 9. Parameters are held in doubles;
/// checkpoint files store 32-bit floats (see save_model).
struct MlpModel {
  uint32_t level_index = 0;
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;

  int layer_count() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
  std::vector<int> layer_dims() const;
};

/// Zero-initialized model. `hidden` lists the hidden layer widths, so
/// {32, 32} gives the default three-weight-layer network.
MlpModel make_model(uint32_t level_index, const std::vector<int>& hidden,
                    int input_dim = 9, int output_dim = 9);

/// Glorot-uniform weights (quantized to float32 so a fresh model survives a
/// checkpoint round trip bit-exactly), zero biases. Deterministic in `seed`.
void init_model(MlpModel& model, uint64_t seed);

/// o = W_L relu(... relu(W_1 x + b_1) ...) + b_L
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& input);

/// Column-per-sample batched forward pass.
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

/// Checkpoint format (all integers and floats little-endian):
///   magic "HCSNN1", u32 level index, u32 layer count,
///   per layer: u32 rows, u32 cols,
///   then per layer: weights row-major float32, bias float32.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace hcs
