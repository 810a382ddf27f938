#include "a2gcn/numerics/grad_check.hpp"

#include <cmath>

#include "a2gcn/errors.hpp"

namespace a2gcn::numerics {

double grad_check(const std::function<double()>& eval, const std::vector<Tensor*>& params,
                  const std::vector<const Tensor*>& analytic, double epsilon) {
  if (params.size() != analytic.size())
    throw NumericError("grad_check: params/analytic count mismatch");
  double max_rel = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k];
    const Tensor& a = *analytic[k];
    if (!p.same_shape(a)) throw NumericError("grad_check: gradient shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + epsilon;
      const double fp = eval();
      p[i] = saved - epsilon;
      const double fm = eval();
      p[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw NumericError("grad_check: objective is not finite at perturbed point");
      const double numeric = (fp - fm) / (2.0 * epsilon);
      const double rel = std::abs(a[i] - numeric) / std::max(1.0, std::abs(a[i]));
      if (rel > max_rel) max_rel = rel;
    }
  }
  return max_rel;
}

}  // namespace a2gcn::numerics
