#include "segblend/tensor_io.hpp"

#include "segblend/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace segblend {

namespace {

constexpr std::string_view kMagic = "SEGBLEND-TENSORS 1\n";

static_assert(std::endian::native == std::endian::little,
              "tensor container I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::istream& in, const std::string& what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw FormatError("checkpoint truncated while reading " + what);
  }
  return value;
}

}  // namespace

const NamedTensor& TensorContainer::get(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw FormatError("checkpoint has no tensor '" + name + "'");
}

void write_tensor_container(const std::filesystem::path& path, const TensorContainer& container) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  put<std::uint64_t>(out, container.metadata_json.size());
  out.write(container.metadata_json.data(), static_cast<std::streamsize>(container.metadata_json.size()));
  put<std::uint64_t>(out, container.tensors.size());
  for (const auto& t : container.tensors) {
    if (t.values.size() != t.rows * t.cols) throw ShapeError("tensor '" + t.name + "' has wrong size");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::uint64_t>(out, t.rows);
    put<std::uint64_t>(out, t.cols);
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
  }
  if (!out) throw IoError("write failed for " + path.string());
}

TensorContainer read_tensor_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string magic(kMagic.size(), '\0');
  if (!in.read(magic.data(), static_cast<std::streamsize>(magic.size())) || magic != kMagic) {
    throw FormatError(path.string() + " is not a segblend tensor container");
  }
  TensorContainer c;
  const auto meta_len = take<std::uint64_t>(in, "metadata length");
  if (meta_len > (std::uint64_t{1} << 30)) throw FormatError("checkpoint metadata is implausibly large");
  c.metadata_json.resize(meta_len);
  if (!in.read(c.metadata_json.data(), static_cast<std::streamsize>(meta_len))) {
    throw FormatError("checkpoint truncated in metadata");
  }
  const auto count = take<std::uint64_t>(in, "tensor count");
  for (std::uint64_t i = 0; i < count; ++i) {
    NamedTensor t;
    const auto name_len = take<std::uint32_t>(in, "tensor name length");
    t.name.resize(name_len);
    if (!in.read(t.name.data(), name_len)) throw FormatError("checkpoint truncated in tensor name");
    t.rows = take<std::uint64_t>(in, "tensor rows");
    t.cols = take<std::uint64_t>(in, "tensor cols");
    if (t.rows * t.cols > (std::uint64_t{1} << 32)) throw FormatError("tensor '" + t.name + "' too large");
    t.values.resize(t.rows * t.cols);
    if (!in.read(reinterpret_cast<char*>(t.values.data()),
                 static_cast<std::streamsize>(t.values.size() * sizeof(double)))) {
      throw FormatError("checkpoint truncated in tensor '" + t.name + "'");
    }
    c.tensors.push_back(std::move(t));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("checkpoint has trailing bytes");
  return c;
}

void append_net(TensorContainer& container, const std::string& prefix, const DenseNet& net) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& layer = net.layers[i];
    const std::string base = prefix + "." + std::to_string(i);
    NamedTensor w{base + ".weight", static_cast<std::size_t>(layer.weight.rows()),
                  static_cast<std::size_t>(layer.weight.cols()),
                  std::vector<double>(layer.weight.data(), layer.weight.data() + layer.weight.size())};
    NamedTensor b{base + ".bias", static_cast<std::size_t>(layer.bias.size()), 1,
                  std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())};
    container.tensors.push_back(std::move(w));
    container.tensors.push_back(std::move(b));
  }
}

DenseNet extract_net(const TensorContainer& container, const std::string& prefix,
                     std::size_t layer_count) {
  DenseNet net;
  for (std::size_t i = 0; i < layer_count; ++i) {
    const std::string base = prefix + "." + std::to_string(i);
    const NamedTensor& w = container.get(base + ".weight");
    const NamedTensor& b = container.get(base + ".bias");
    if (b.rows != w.rows || b.cols != 1) throw ShapeError("bias shape mismatch in " + base);
    DenseLayer layer;
    layer.weight = Eigen::Map<const Matrix>(w.values.data(), static_cast<Eigen::Index>(w.rows),
                                            static_cast<Eigen::Index>(w.cols));
    layer.bias = Eigen::Map<const Vector>(b.values.data(), static_cast<Eigen::Index>(b.rows));
    if (!net.layers.empty() && net.layers.back().weight.rows() != layer.weight.cols()) {
      throw ShapeError("layer dimensions do not chain in " + prefix);
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace segblend
