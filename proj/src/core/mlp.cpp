#include "core/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "core/rng.hpp"

namespace hcs {

std::vector<int> MlpModel::layer_dims() const {
  std::vector<int> dims;
  dims.push_back(input_dim());
  for (const auto& w : weights) dims.push_back(static_cast<int>(w.rows()));
  return dims;
}

MlpModel make_model(uint32_t level_index, const std::vector<int>& hidden,
                    int input_dim, int output_dim) {
  if (input_dim < 1 || output_dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "layer dimensions must be >= 1");
  }
  for (int h : hidden) {
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "hidden width must be >= 1");
  }
  MlpModel m;
  m.level_index = level_index;
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    m.weights.emplace_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    m.biases.emplace_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  return m;
}

void init_model(MlpModel& model, uint64_t seed) {
  std::mt19937_64 gen = seeded_rng(seed);
  for (size_t l = 0; l < model.weights.size(); ++l) {
    Eigen::MatrixXd& w = model.weights[l];
    const double fan_in = static_cast<double>(w.cols());
    const double fan_out = static_cast<double>(w.rows());
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = static_cast<double>(
            static_cast<float>(uniform(gen, -bound, bound)));
      }
    }
    model.biases[l].setZero();
  }
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& input) {
  if (input.size() != model.input_dim()) {
    throw Error(ErrorCode::InvalidArgument, "input size does not match model");
  }
  Eigen::VectorXd a = input;
  const int layers = model.layer_count();
  for (int l = 0; l < layers; ++l) {
    a = (model.weights[static_cast<size_t>(l)] * a +
         model.biases[static_cast<size_t>(l)])
            .eval();
    if (l + 1 < layers) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != model.input_dim()) {
    throw Error(ErrorCode::InvalidArgument, "input rows do not match model");
  }
  Eigen::MatrixXd a = inputs;
  const int layers = model.layer_count();
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = model.weights[static_cast<size_t>(l)] * a;
    z.colwise() += model.biases[static_cast<size_t>(l)];
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

namespace {

constexpr char kMagic[6] = {'H', 'C', 'S', 'N', 'N', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_bytes(std::FILE* f, const void* data, size_t n, const std::string& path) {
  if (std::fwrite(data, 1, n, f) != n) {
    throw Error(ErrorCode::Io, "write failed for '" + path + "'");
  }
}

void read_bytes(std::FILE* f, void* data, size_t n, const std::string& path) {
  if (std::fread(data, 1, n, f) != n) {
    throw Error(ErrorCode::Truncated, "unexpected end of file in '" + path + "'");
  }
}

void write_u32(std::FILE* f, uint32_t v, const std::string& path) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  write_bytes(f, b, 4, path);
}

uint32_t read_u32(std::FILE* f, const std::string& path) {
  unsigned char b[4];
  read_bytes(f, b, 4, path);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_f32(std::FILE* f, float v, const std::string& path) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(f, bits, path);
}

float read_f32(std::FILE* f, const std::string& path) {
  uint32_t bits = read_u32(f, path);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void save_model(const MlpModel& model, const std::string& path) {
  if (model.weights.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot save a model with no layers");
  }
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");

  write_bytes(f.get(), kMagic, sizeof(kMagic), path);
  write_u32(f.get(), model.level_index, path);
  write_u32(f.get(), static_cast<uint32_t>(model.layer_count()), path);
  for (const auto& w : model.weights) {
    write_u32(f.get(), static_cast<uint32_t>(w.rows()), path);
    write_u32(f.get(), static_cast<uint32_t>(w.cols()), path);
  }
  for (size_t l = 0; l < model.weights.size(); ++l) {
    const Eigen::MatrixXd& w = model.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        write_f32(f.get(), static_cast<float>(w(r, c)), path);
      }
    }
    const Eigen::VectorXd& b = model.biases[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) {
      write_f32(f.get(), static_cast<float>(b[r]), path);
    }
  }
  if (std::fflush(f.get()) != 0) {
    throw Error(ErrorCode::Io, "flush failed for '" + path + "'");
  }
}

MlpModel load_model(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "'");

  char magic[6];
  read_bytes(f.get(), magic, sizeof(magic), path);
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::Format, "'" + path + "' is not a model checkpoint");
  }
  MlpModel m;
  m.level_index = read_u32(f.get(), path);
  uint32_t layers = read_u32(f.get(), path);
  if (layers == 0 || layers > 64) {
    throw Error(ErrorCode::Format, "implausible layer count in '" + path + "'");
  }
  std::vector<std::pair<uint32_t, uint32_t>> dims(layers);
  for (auto& d : dims) {
    d.first = read_u32(f.get(), path);
    d.second = read_u32(f.get(), path);
    if (d.first == 0 || d.second == 0 || d.first > 1u << 20 || d.second > 1u << 20) {
      throw Error(ErrorCode::Format, "implausible layer shape in '" + path + "'");
    }
  }
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l + 1].second != dims[l].first) {
      throw Error(ErrorCode::Format,
                  "layer dimension mismatch in '" + path + "': layer " +
                      std::to_string(l + 1) + " expects input " +
                      std::to_string(dims[l + 1].second) + " but layer " +
                      std::to_string(l) + " outputs " + std::to_string(dims[l].first));
    }
  }
  for (const auto& d : dims) {
    Eigen::MatrixXd w(d.first, d.second);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = read_f32(f.get(), path);
      }
    }
    Eigen::VectorXd b(d.first);
    for (Eigen::Index r = 0; r < b.size(); ++r) {
      b[r] = read_f32(f.get(), path);
    }
    if (!w.allFinite() || !b.allFinite()) {
      throw Error(ErrorCode::Format, "non-finite parameters in '" + path + "'");
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  // Reject trailing garbage so a concatenated/corrupt file is not accepted.
  unsigned char extra;
  if (std::fread(&extra, 1, 1, f.get()) == 1) {
    throw Error(ErrorCode::Format, "trailing bytes after parameters in '" + path + "'");
  }
  return m;
}

}  // namespace hcs
