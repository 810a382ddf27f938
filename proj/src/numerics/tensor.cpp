#include "a2gcn/numerics/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "a2gcn/errors.hpp"

namespace a2gcn::numerics {

Tensor Tensor::scalar(double v) {
  Tensor t(std::size_t{1});
  t[0] = v;
  return t;
}

Tensor Tensor::from(std::vector<double> values) {
  Tensor t;
  t.shape_ = {values.size()};
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::full(std::size_t rows, std::size_t cols, double v) {
  Tensor t(rows, cols);
  t.fill(v);
  return t;
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "x" : "") << shape_[i];
  os << "]";
  return os.str();
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Tensor::check_finite(const std::string& what) const {
  if (!all_finite()) throw NumericError("non-finite value in " + what);
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b))
    throw NumericError("max_abs_diff: shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace a2gcn::numerics
