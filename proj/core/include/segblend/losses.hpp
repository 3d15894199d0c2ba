#pragma once

#include "segblend/dense.hpp"

#include <cstddef>

namespace segblend {

struct GaussianParams {
  Vector mu;
  Vector logvar;
};

struct KlResult {
  double value = 0.0;
  Vector grad_mu;
  Vector grad_logvar;
};

// KL(N(mu, exp(logvar)) || N(0, I)) = 0.5 * sum(exp(logvar) + mu^2 - 1 - logvar).
KlResult kl_standard_normal(const GaussianParams& g);

struct CrossEntropyResult {
  double loss = 0.0;
  Vector grad;  // softmax(logits) - one_hot(target)
};

CrossEntropyResult softmax_cross_entropy(const Eigen::Ref<const Vector>& logits, std::size_t target);

// Numerically stable softmax (max-shifted).
Vector softmax(const Eigen::Ref<const Vector>& logits);

// z = mu + exp(0.5 * logvar) * noise
Vector reparameterize(const GaussianParams& g, const Vector& noise);

}  // namespace segblend
