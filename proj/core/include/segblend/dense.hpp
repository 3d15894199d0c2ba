#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace segblend {

template <typename T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Matrix = MatrixT<double>;
using Vector = VectorT<double>;

template <typename T>
struct BasicDenseLayer {
  MatrixT<T> weight;  // out x in
  VectorT<T> bias;    // out
};

// Fully connected stack: ReLU after every layer except the last.
// Batched calls take one sample per column. Instantiated for float (model
// training) and double (reference checks).
template <typename T>
struct BasicDenseNet {
  std::vector<BasicDenseLayer<T>> layers;

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t parameter_count() const;

  // widths = {in, hidden..., out}. Weights are U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
  // biases zero. Draws are made in double and rounded, so float and double
  // nets from the same generator agree to float precision.
  static BasicDenseNet initialize(std::span<const std::size_t> widths, std::mt19937_64& rng);
  static BasicDenseNet zeros(std::span<const std::size_t> widths);

  template <typename U>
  BasicDenseNet<U> cast() const {
    BasicDenseNet<U> out;
    for (const auto& l : layers) out.layers.push_back({l.weight.template cast<U>(), l.bias.template cast<U>()});
    return out;
  }

  bool operator==(const BasicDenseNet& other) const;
};

// Batch of binary input vectors stored as the indices of their 1 entries.
// One-hot tile grids are almost entirely zeros, so the first layer's
// product reduces to column gathers.
struct BinaryBatch {
  std::size_t dim = 0;
  std::vector<std::vector<std::uint32_t>> active;

  std::size_t batch() const { return active.size(); }
  Matrix to_dense() const;
};

template <typename T>
struct BasicForwardCache {
  // inputs[i] is what layer i consumed; pre[i] its affine output. For a
  // binary forward inputs[0] stays empty and binary_input holds the batch.
  std::vector<MatrixT<T>> inputs;
  std::vector<MatrixT<T>> pre;
  BinaryBatch binary_input;
  bool binary = false;
};

template <typename T>
struct BasicDenseGrads {
  std::vector<MatrixT<T>> weight;
  std::vector<VectorT<T>> bias;

  static BasicDenseGrads zeros_like(const BasicDenseNet<T>& net);
};

using DenseLayer = BasicDenseLayer<double>;
using DenseNet = BasicDenseNet<double>;
using ForwardCache = BasicForwardCache<double>;
using DenseGrads = BasicDenseGrads<double>;

template <typename T>
MatrixT<T> forward(const BasicDenseNet<T>& net, const MatrixT<T>& input, BasicForwardCache<T>* cache = nullptr);
template <typename T>
VectorT<T> forward(const BasicDenseNet<T>& net, const VectorT<T>& input);
template <typename T>
MatrixT<T> forward(const BasicDenseNet<T>& net, const BinaryBatch& input, BasicForwardCache<T>* cache = nullptr);

// Gradients of a scalar loss given dLoss/dOutput for the cached batch.
// When input_grad is non-null it receives dLoss/dInput.
template <typename T>
BasicDenseGrads<T> backward(const BasicDenseNet<T>& net, const BasicForwardCache<T>& cache,
                            const MatrixT<T>& output_grad, MatrixT<T>* input_grad = nullptr);

// Flat views in layer order (weight, bias, weight, bias, ...), used by the optimizer.
template <typename T>
std::vector<std::span<T>> parameter_blocks(BasicDenseNet<T>& net);
template <typename T>
std::vector<std::span<const T>> gradient_blocks(const BasicDenseGrads<T>& grads);

}  // namespace segblend
