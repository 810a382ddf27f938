#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "a2gcn/numerics/tensor.hpp"

namespace a2gcn::numerics {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Per-parameter first/second moments plus the shared step counter.
class AdamState {
 public:
  AdamState(AdamConfig config, const std::vector<const Tensor*>& params);

  // Standard bias-corrected Adam update, in place. Throws NumericError naming
  // the parameter if its gradient contains NaN/Inf.
  void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
            const std::vector<std::string>& names);

  std::int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

}  // namespace a2gcn::numerics
