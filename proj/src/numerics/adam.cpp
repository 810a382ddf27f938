#include "a2gcn/numerics/adam.hpp"

#include <cmath>

#include "a2gcn/errors.hpp"
#include "a2gcn/numerics/init.hpp"
#include "a2gcn/numerics/random.hpp"

namespace a2gcn::numerics {

Tensor xavier_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Tensor t(rows, cols);
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

AdamState::AdamState(AdamConfig config, const std::vector<const Tensor*>& params)
    : config_(config) {
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const Tensor* p : params) {
    Tensor zm = *p, zv = *p;
    zm.fill(0.0);
    zv.fill(0.0);
    m_.push_back(std::move(zm));
    v_.push_back(std::move(zv));
  }
}

void AdamState::step(const std::vector<Tensor*>& params,
                     const std::vector<const Tensor*>& grads,
                     const std::vector<std::string>& names) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw NumericError("adam_step: parameter/gradient count mismatch");
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& grad = *grads[k];
    if (!p.same_shape(grad))
      throw NumericError("adam_step: shape mismatch for " +
                         (k < names.size() ? names[k] : std::to_string(k)));
    if (!grad.all_finite())
      throw NumericError("adam_step: non-finite gradient for " +
                         (k < names.size() ? names[k] : std::to_string(k)));
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      const double mhat = m[i] / corr1;
      const double vhat = v[i] / corr2;
      p[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace a2gcn::numerics
