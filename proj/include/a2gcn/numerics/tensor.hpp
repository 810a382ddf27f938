#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace a2gcn::numerics {

// Dense row-major tensor of doubles. Rank 1 or 2 is all this project needs.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::size_t n) : shape_{n}, data_(n, 0.0) {}
  Tensor(std::size_t rows, std::size_t cols)
      : shape_{rows, cols}, data_(rows * cols, 0.0) {}

  static Tensor scalar(double v);
  static Tensor from(std::vector<double> values);
  static Tensor full(std::size_t rows, std::size_t cols, double v);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Row/column view: rank-1 tensors count as a single column.
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_str() const;

  void fill(double v);
  bool all_finite() const;
  // Throws NumericError naming `what` if any entry is NaN or Inf.
  void check_finite(const std::string& what) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace a2gcn::numerics
