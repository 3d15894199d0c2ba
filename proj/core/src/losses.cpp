#include "segblend/losses.hpp"

#include "segblend/errors.hpp"

#include <cmath>
#include <string>

namespace segblend {

KlResult kl_standard_normal(const GaussianParams& g) {
  if (g.mu.size() != g.logvar.size()) throw ShapeError("kl: mu and logvar lengths differ");
  KlResult r;
  const Eigen::ArrayXd var = g.logvar.array().exp();
  r.value = 0.5 * (var + g.mu.array().square() - 1.0 - g.logvar.array()).sum();
  r.grad_mu = g.mu;
  r.grad_logvar = (0.5 * (var - 1.0)).matrix();
  return r;
}

Vector softmax(const Eigen::Ref<const Vector>& logits) {
  const double shift = logits.maxCoeff();
  Vector e = (logits.array() - shift).exp().matrix();
  return e / e.sum();
}

CrossEntropyResult softmax_cross_entropy(const Eigen::Ref<const Vector>& logits, std::size_t target) {
  if (target >= static_cast<std::size_t>(logits.size())) {
    throw PreconditionError("cross-entropy target " + std::to_string(target) +
                            " outside vocabulary of " + std::to_string(logits.size()));
  }
  const double shift = logits.maxCoeff();
  const Eigen::ArrayXd shifted = logits.array() - shift;
  const double log_norm = std::log(shifted.exp().sum());
  CrossEntropyResult r;
  r.loss = log_norm - shifted(static_cast<Eigen::Index>(target));
  r.grad = (shifted - log_norm).exp().matrix();
  r.grad(static_cast<Eigen::Index>(target)) -= 1.0;
  return r;
}

Vector reparameterize(const GaussianParams& g, const Vector& noise) {
  if (noise.size() != g.mu.size() || g.logvar.size() != g.mu.size()) {
    throw ShapeError("reparameterize: noise length " + std::to_string(noise.size()) +
                     " does not match latent size " + std::to_string(g.mu.size()));
  }
  return g.mu + ((0.5 * g.logvar.array()).exp() * noise.array()).matrix();
}

}  // namespace segblend
