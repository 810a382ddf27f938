#pragma once

#include <functional>
#include <vector>

#include "a2gcn/numerics/tensor.hpp"

namespace a2gcn::numerics {

// Central-difference verification of analytic gradients.
//
// `eval` recomputes the scalar objective from the current contents of
// `params` (which are perturbed in place, one coordinate at a time).
// `analytic` holds the gradients under test, aligned with `params`.
// Returns max over all coordinates of
//   |analytic - central_difference| / max(1, |analytic|).
double grad_check(const std::function<double()>& eval, const std::vector<Tensor*>& params,
                  const std::vector<const Tensor*>& analytic, double epsilon);

}  // namespace a2gcn::numerics
