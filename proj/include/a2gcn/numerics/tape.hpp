#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "a2gcn/numerics/tensor.hpp"

namespace a2gcn::numerics {

// Reverse-mode gradient tape over a fixed kernel set. Define-by-run: each op
// records its backward closure; backward() replays them in reverse order.
// The kernel set is exactly what the model needs: dense matmul, pointwise
// ops, row gathers/scatters, segment reductions and segment softmax.
class Tape {
 public:
  using Id = int;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf with gradient tracking (model parameter or input).
  Id param(Tensor value, std::string name = "param");
  // Leaf without gradient tracking.
  Id constant(Tensor value);

  // --- kernels -------------------------------------------------------------
  // C = op(A) * op(B), op = optional transpose.
  Id matmul(Id a, Id b, bool trans_a = false, bool trans_b = false);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id elementwise_mul(Id a, Id b);
  Id scale(Id a, double c);
  Id leaky_relu(Id a, double negative_slope);
  Id sigmoid(Id a);
  // softplus(x) = ln(1 + e^x); -ln(sigmoid(x)) == softplus(-x).
  Id softplus(Id a);
  // Softmax over the last dimension (whole vector for rank 1, per row for
  // rank 2), computed with max-subtraction.
  Id softmax(Id a);
  // Row-wise cosine similarity of two equal-shape matrices -> n-vector.
  // Zero rows yield similarity 0 with zero gradient.
  Id cosine_similarity(Id a, Id b);
  // Column-wise mean over rows: (n x d) -> (d).
  Id mean_rows(Id a);
  // Row-wise inner product: (n x d, n x d) -> (n).
  Id row_dot(Id a, Id b);
  Id gather_rows(Id a, std::vector<int> idx);
  // Row r scaled by s[r]: (n x d, n) -> (n x d).
  Id scale_rows(Id a, Id s);
  // Sum rows within each segment; offsets has n_segments+1 entries.
  Id segment_sum(Id a, std::vector<std::size_t> offsets);
  // Joint softmax per segment over [segment scores..., self score]. Output is
  // a flat vector: normalized edge weights (aligned with `scores`) followed by
  // the n_segments self weights.
  Id segment_softmax_self(Id scores, std::vector<std::size_t> offsets, Id self_scores);
  Id concat_rows(Id a, Id b);
  Id slice_rows(Id a, std::size_t begin, std::size_t end);
  Id sum_squares(Id a);  // -> scalar
  Id mean_all(Id a);     // -> scalar
  Id broadcast_scalar(Id a, std::size_t n);

  // --- execution -----------------------------------------------------------
  void backward(Id loss);
  const Tensor& value(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Tensor& grad(Id id) const;
  std::size_t node_count() const { return nodes_.size(); }

  // When on, every kernel output is checked for NaN/Inf (test mode).
  void set_check_finite(bool on) { check_finite_ = on; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> back;  // empty for leaves/constants
    bool needs_grad = true;
    std::string name;
  };

  std::vector<Node> nodes_;
  bool check_finite_ = false;
  bool grads_ready_ = false;

  Id push(Tensor value, const char* op, std::function<void()> back);
  Tensor& val(Id id) { return nodes_[static_cast<std::size_t>(id)].value; }
  Tensor& g(Id id) { return nodes_[static_cast<std::size_t>(id)].grad; }
  const Tensor& cval(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
};

// C = op(A) * op(B); shared by the tape and the plain forward-only paths.
void gemm(Tensor& out, const Tensor& a, bool trans_a, const Tensor& b, bool trans_b,
          bool accumulate = false);

}  // namespace a2gcn::numerics
