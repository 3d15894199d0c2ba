#pragma once

#include "segblend/dense.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace segblend {

struct NamedTensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // column-major

  bool operator==(const NamedTensor&) const = default;
};

// Checkpoint container: a JSON metadata document followed by named float64
// tensors. Values are stored as raw little-endian IEEE-754, so a round trip
// is bit-exact.
//
//   "SEGBLEND-TENSORS 1\n"
//   u64 metadata length, metadata bytes
//   u64 tensor count, then per tensor:
//     u32 name length, name bytes, u64 rows, u64 cols, rows*cols f64
struct TensorContainer {
  std::string metadata_json;
  std::vector<NamedTensor> tensors;

  const NamedTensor& get(const std::string& name) const;
  bool operator==(const TensorContainer&) const = default;
};

void write_tensor_container(const std::filesystem::path& path, const TensorContainer& container);
TensorContainer read_tensor_container(const std::filesystem::path& path);

// Tensors "<prefix>.<i>.weight" and "<prefix>.<i>.bias" for every layer.
void append_net(TensorContainer& container, const std::string& prefix, const DenseNet& net);
DenseNet extract_net(const TensorContainer& container, const std::string& prefix,
                     std::size_t layer_count);

}  // namespace segblend
