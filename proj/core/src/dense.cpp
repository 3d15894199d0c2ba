#include "segblend/dense.hpp"

#include "segblend/errors.hpp"

#include <cmath>
#include <string>

namespace segblend {

namespace {

std::string dims(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

template <typename T>
std::size_t BasicDenseNet<T>::in_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols());
}

template <typename T>
std::size_t BasicDenseNet<T>::out_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows());
}

template <typename T>
std::size_t BasicDenseNet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

template <typename T>
BasicDenseNet<T> BasicDenseNet<T>::initialize(std::span<const std::size_t> widths, std::mt19937_64& rng) {
  BasicDenseNet net = zeros(widths);
  for (auto& layer : net.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<T>(dist(rng));
  }
  return net;
}

template <typename T>
BasicDenseNet<T> BasicDenseNet<T>::zeros(std::span<const std::size_t> widths) {
  if (widths.size() < 2) throw ShapeError("a dense net needs at least an input and an output width");
  BasicDenseNet net;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    if (widths[i] == 0 || widths[i + 1] == 0) throw ShapeError("layer widths must be positive");
    const auto out = static_cast<Eigen::Index>(widths[i + 1]);
    const auto in = static_cast<Eigen::Index>(widths[i]);
    net.layers.push_back({MatrixT<T>::Zero(out, in), VectorT<T>::Zero(out)});
  }
  return net;
}

template <typename T>
bool BasicDenseNet<T>::operator==(const BasicDenseNet& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = other.layers[i];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols()) return false;
    if (a.weight != b.weight || a.bias != b.bias) return false;
  }
  return true;
}

template <typename T>
BasicDenseGrads<T> BasicDenseGrads<T>::zeros_like(const BasicDenseNet<T>& net) {
  BasicDenseGrads g;
  for (const auto& layer : net.layers) {
    g.weight.push_back(MatrixT<T>::Zero(layer.weight.rows(), layer.weight.cols()));
    g.bias.push_back(VectorT<T>::Zero(layer.bias.size()));
  }
  return g;
}

Matrix BinaryBatch::to_dense() const {
  Matrix dense = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(batch()));
  for (std::size_t b = 0; b < active.size(); ++b) {
    for (std::uint32_t i : active[b]) dense(i, static_cast<Eigen::Index>(b)) = 1.0;
  }
  return dense;
}

namespace {

// Runs layers [0, n) given layer 0's affine output.
template <typename T>
MatrixT<T> finish_forward(const BasicDenseNet<T>& net, MatrixT<T> pre, BasicForwardCache<T>* cache) {
  const std::size_t n = net.layers.size();
  for (std::size_t i = 0;; ++i) {
    if (i + 1 == n) {
      if (cache != nullptr) cache->pre.push_back(pre);
      return pre;
    }
    MatrixT<T> activation = pre.cwiseMax(T(0));
    if (cache != nullptr) cache->pre.push_back(std::move(pre));
    const auto& next = net.layers[i + 1];
    pre = next.weight * activation;
    pre.colwise() += next.bias;
    if (cache != nullptr) cache->inputs.push_back(std::move(activation));
  }
}

}  // namespace

template <typename T>
MatrixT<T> forward(const BasicDenseNet<T>& net, const MatrixT<T>& input, BasicForwardCache<T>* cache) {
  if (net.layers.empty()) throw ShapeError("forward through an empty net");
  if (static_cast<std::size_t>(input.rows()) != net.in_dim()) {
    throw ShapeError("forward: input has " + std::to_string(input.rows()) + " rows, net expects " +
                     std::to_string(net.in_dim()));
  }
  MatrixT<T> pre = net.layers[0].weight * input;
  pre.colwise() += net.layers[0].bias;
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre.clear();
    cache->binary = false;
    cache->binary_input = {};
    cache->inputs.push_back(input);
  }
  return finish_forward(net, std::move(pre), cache);
}

template <typename T>
VectorT<T> forward(const BasicDenseNet<T>& net, const VectorT<T>& input) {
  MatrixT<T> out = forward(net, MatrixT<T>(input), static_cast<BasicForwardCache<T>*>(nullptr));
  return out.col(0);
}

template <typename T>
MatrixT<T> forward(const BasicDenseNet<T>& net, const BinaryBatch& input, BasicForwardCache<T>* cache) {
  if (net.layers.empty()) throw ShapeError("forward through an empty net");
  if (input.dim != net.in_dim()) {
    throw ShapeError("forward: binary input has dimension " + std::to_string(input.dim) +
                     ", net expects " + std::to_string(net.in_dim()));
  }
  const auto& first = net.layers[0];
  MatrixT<T> pre(first.weight.rows(), static_cast<Eigen::Index>(input.batch()));
  for (std::size_t b = 0; b < input.batch(); ++b) {
    auto col = pre.col(static_cast<Eigen::Index>(b));
    col = first.bias;
    for (std::uint32_t i : input.active[b]) {
      if (i >= input.dim) throw ShapeError("forward: binary index out of range");
      col += first.weight.col(i);
    }
  }
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre.clear();
    cache->binary = true;
    cache->binary_input = input;
    cache->inputs.emplace_back();
  }
  return finish_forward(net, std::move(pre), cache);
}

template <typename T>
BasicDenseGrads<T> backward(const BasicDenseNet<T>& net, const BasicForwardCache<T>& cache,
                            const MatrixT<T>& output_grad, MatrixT<T>* input_grad) {
  const std::size_t n = net.layers.size();
  if (cache.inputs.size() != n || cache.pre.size() != n) {
    throw ShapeError("backward: cache has " + std::to_string(cache.inputs.size()) +
                     " layers, net has " + std::to_string(n));
  }
  const Eigen::Index batch = output_grad.cols();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& layer = net.layers[i];
    const bool binary_layer = cache.binary && i == 0;
    const bool input_ok =
        binary_layer ? (cache.binary_input.dim == static_cast<std::size_t>(layer.weight.cols()) &&
                        static_cast<Eigen::Index>(cache.binary_input.batch()) == batch)
                     : (cache.inputs[i].rows() == layer.weight.cols() && cache.inputs[i].cols() == batch);
    if (!input_ok || cache.pre[i].rows() != layer.weight.rows() || cache.pre[i].cols() != batch) {
      throw ShapeError("backward: stale cache for layer " + std::to_string(i));
    }
  }
  if (output_grad.rows() != net.layers.back().weight.rows()) {
    throw ShapeError("backward: output gradient is " + dims(output_grad.rows(), output_grad.cols()));
  }

  BasicDenseGrads<T> grads;
  grads.weight.resize(n);
  grads.bias.resize(n);
  MatrixT<T> delta = output_grad;
  for (std::size_t k = n; k-- > 0;) {
    const auto& layer = net.layers[k];
    if (k + 1 < n) {
      // ReLU derivative: pass-through where the pre-activation was positive.
      delta = delta.cwiseProduct((cache.pre[k].array() > T(0)).template cast<T>().matrix());
    }
    if (k == 0 && cache.binary) {
      grads.weight[k] = MatrixT<T>::Zero(layer.weight.rows(), layer.weight.cols());
      for (Eigen::Index b = 0; b < batch; ++b) {
        for (std::uint32_t i : cache.binary_input.active[static_cast<std::size_t>(b)]) {
          grads.weight[k].col(i) += delta.col(b);
        }
      }
    } else {
      grads.weight[k].noalias() = delta * cache.inputs[k].transpose();
    }
    grads.bias[k] = delta.rowwise().sum();
    if (k > 0 || input_grad != nullptr) {
      MatrixT<T> upstream = layer.weight.transpose() * delta;
      if (k == 0) {
        *input_grad = std::move(upstream);
      } else {
        delta = std::move(upstream);
      }
    }
  }
  return grads;
}

template <typename T>
std::vector<std::span<T>> parameter_blocks(BasicDenseNet<T>& net) {
  std::vector<std::span<T>> blocks;
  for (auto& layer : net.layers) {
    blocks.emplace_back(layer.weight.data(), static_cast<std::size_t>(layer.weight.size()));
    blocks.emplace_back(layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  return blocks;
}

template <typename T>
std::vector<std::span<const T>> gradient_blocks(const BasicDenseGrads<T>& grads) {
  std::vector<std::span<const T>> blocks;
  for (std::size_t i = 0; i < grads.weight.size(); ++i) {
    blocks.emplace_back(grads.weight[i].data(), static_cast<std::size_t>(grads.weight[i].size()));
    blocks.emplace_back(grads.bias[i].data(), static_cast<std::size_t>(grads.bias[i].size()));
  }
  return blocks;
}

#define SEGBLEND_INSTANTIATE_DENSE(T)                                                                   \
  template struct BasicDenseNet<T>;                                                                    \
  template struct BasicDenseGrads<T>;                                                                  \
  template MatrixT<T> forward(const BasicDenseNet<T>&, const MatrixT<T>&, BasicForwardCache<T>*);      \
  template VectorT<T> forward(const BasicDenseNet<T>&, const VectorT<T>&);                             \
  template MatrixT<T> forward(const BasicDenseNet<T>&, const BinaryBatch&, BasicForwardCache<T>*);     \
  template BasicDenseGrads<T> backward(const BasicDenseNet<T>&, const BasicForwardCache<T>&,           \
                                       const MatrixT<T>&, MatrixT<T>*);                                \
  template std::vector<std::span<T>> parameter_blocks(BasicDenseNet<T>&);                              \
  template std::vector<std::span<const T>> gradient_blocks(const BasicDenseGrads<T>&);

SEGBLEND_INSTANTIATE_DENSE(float)
SEGBLEND_INSTANTIATE_DENSE(double)

}  // namespace segblend
