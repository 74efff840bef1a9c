#include "core/dataset.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

namespace hcs {

namespace {

constexpr char kMagic[6] = {'H', 'C', 'S', 'D', 'S', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u32(unsigned char* b, uint32_t v) {
  b[0] = static_cast<unsigned char>(v);
  b[1] = static_cast<unsigned char>(v >> 8);
  b[2] = static_cast<unsigned char>(v >> 16);
  b[3] = static_cast<unsigned char>(v >> 24);
}

uint32_t get_u32(const unsigned char* b) {
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");

  unsigned char header[6 + 4 + 8];
  std::memcpy(header, kMagic, 6);
  put_u32(header + 6, dataset.level);
  uint64_t count = dataset.samples.size();
  for (int i = 0; i < 8; ++i) {
    header[10 + i] = static_cast<unsigned char>(count >> (8 * i));
  }
  if (std::fwrite(header, 1, sizeof(header), f.get()) != sizeof(header)) {
    throw Error(ErrorCode::Io, "write failed for '" + path + "'");
  }

  for (const TrainingSample& s : dataset.samples) {
    unsigned char record[18 * 4];
    for (int k = 0; k < 9; ++k) {
      uint32_t bits;
      std::memcpy(&bits, &s.input[k], 4);
      put_u32(record + 4 * k, bits);
      std::memcpy(&bits, &s.target[k], 4);
      put_u32(record + 4 * (9 + k), bits);
    }
    if (std::fwrite(record, 1, sizeof(record), f.get()) != sizeof(record)) {
      throw Error(ErrorCode::Io, "write failed for '" + path + "'");
    }
  }
  if (std::fflush(f.get()) != 0) {
    throw Error(ErrorCode::Io, "flush failed for '" + path + "'");
  }
}

Dataset load_dataset(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "'");

  unsigned char header[6 + 4 + 8];
  if (std::fread(header, 1, sizeof(header), f.get()) != sizeof(header)) {
    throw Error(ErrorCode::Truncated, "unexpected end of file in '" + path + "'");
  }
  if (std::memcmp(header, kMagic, 6) != 0) {
    throw Error(ErrorCode::Format, "'" + path + "' is not a dataset file");
  }
  Dataset d;
  d.level = get_u32(header + 6);
  uint64_t count = 0;
  for (int i = 0; i < 8; ++i) {
    count |= static_cast<uint64_t>(header[10 + i]) << (8 * i);
  }
  d.samples.resize(count);
  for (uint64_t s = 0; s < count; ++s) {
    unsigned char record[18 * 4];
    if (std::fread(record, 1, sizeof(record), f.get()) != sizeof(record)) {
      throw Error(ErrorCode::Truncated, "unexpected end of file in '" + path + "'");
    }
    for (int k = 0; k < 9; ++k) {
      uint32_t bits = get_u32(record + 4 * k);
      std::memcpy(&d.samples[s].input[k], &bits, 4);
      bits = get_u32(record + 4 * (9 + k));
      std::memcpy(&d.samples[s].target[k], &bits, 4);
    }
  }
  unsigned char extra;
  if (std::fread(&extra, 1, 1, f.get()) == 1) {
    throw Error(ErrorCode::Format, "trailing bytes after samples in '" + path + "'");
  }
  return d;
}

}  // namespace hcs
