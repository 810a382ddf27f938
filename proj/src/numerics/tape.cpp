#include "a2gcn/numerics/tape.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "a2gcn/errors.hpp"

namespace a2gcn::numerics {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw NumericError(msg);
}

std::string shapes(const Tensor& a, const Tensor& b) {
  return a.shape_str() + " vs " + b.shape_str();
}

double stable_softplus(double x) {
  // ln(1 + e^x) without overflow on either side.
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double stable_sigmoid(double x) {
  if (x >= 0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void gemm(Tensor& out, const Tensor& a, bool trans_a, const Tensor& b, bool trans_b,
          bool accumulate) {
  const std::size_t m = trans_a ? a.cols() : a.rows();
  const std::size_t k = trans_a ? a.rows() : a.cols();
  const std::size_t kb = trans_b ? b.cols() : b.rows();
  const std::size_t n = trans_b ? b.rows() : b.cols();
  require(k == kb, "matmul: inner dimensions differ, " + shapes(a, b));
  if (!accumulate) {
    out = Tensor(m, n);
  } else {
    require(out.rows() == m && out.cols() == n, "matmul: bad accumulator shape");
  }
  if (!trans_a && !trans_b) {
    for (std::size_t i = 0; i < m; ++i) {
      double* oi = out.data() + i * n;
      const double* ai = a.data() + i * k;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = ai[p];
        if (av == 0.0) continue;
        const double* bp = b.data() + p * n;
        for (std::size_t j = 0; j < n; ++j) oi[j] += av * bp[j];
      }
    }
  } else if (!trans_a && trans_b) {
    // Rows of b are contiguous: plain dot products.
    for (std::size_t i = 0; i < m; ++i) {
      const double* ai = a.data() + i * k;
      double* oi = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double* bj = b.data() + j * k;
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
        oi[j] += s;
      }
    }
  } else if (trans_a && !trans_b) {
    for (std::size_t p = 0; p < k; ++p) {
      const double* ap = a.data() + p * m;
      const double* bp = b.data() + p * n;
      for (std::size_t i = 0; i < m; ++i) {
        const double av = ap[i];
        if (av == 0.0) continue;
        double* oi = out.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) oi[j] += av * bp[j];
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      double* oi = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += a(p, i) * b(j, p);
        oi[j] += s;
      }
    }
  }
}

Tape::Id Tape::push(Tensor value, const char* op, std::function<void()> back) {
  if (check_finite_) value.check_finite(op);
  Node n;
  n.value = std::move(value);
  n.back = std::move(back);
  n.name = op;
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::param(Tensor value, std::string name) {
  Node n;
  n.value = std::move(value);
  n.name = std::move(name);
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = false;
  n.name = "constant";
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

const Tensor& Tape::grad(Id id) const {
  require(grads_ready_, "grad() called before backward()");
  return nodes_[static_cast<std::size_t>(id)].grad;
}

Tape::Id Tape::matmul(Id a, Id b, bool trans_a, bool trans_b) {
  const Tensor& A = cval(a);
  const Tensor& B = cval(b);
  Tensor out;
  gemm(out, A, trans_a, B, trans_b);
  Id id = push(std::move(out), "matmul", nullptr);
  nodes_.back().back = [this, id, a, b, trans_a, trans_b] {
    const Tensor& dC = g(id);
    if (!trans_a)
      gemm(g(a), dC, false, cval(b), !trans_b, true);
    else
      gemm(g(a), cval(b), trans_b, dC, true, true);
    if (!trans_b)
      gemm(g(b), cval(a), !trans_a, dC, false, true);
    else
      gemm(g(b), dC, true, cval(a), trans_a, true);
  };
  return id;
}

Tape::Id Tape::add(Id a, Id b) {
  const Tensor& A = cval(a);
  const Tensor& B = cval(b);
  require(A.same_shape(B), "add: shape mismatch, " + shapes(A, B));
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  Id id = push(std::move(out), "add", nullptr);
  nodes_.back().back = [this, id, a, b] {
    const Tensor& d = g(id);
    Tensor& da = g(a);
    Tensor& db = g(b);
    for (std::size_t i = 0; i < d.size(); ++i) {
      da[i] += d[i];
      db[i] += d[i];
    }
  };
  return id;
}

Tape::Id Tape::sub(Id a, Id b) {
  const Tensor& A = cval(a);
  const Tensor& B = cval(b);
  require(A.same_shape(B), "sub: shape mismatch, " + shapes(A, B));
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  Id id = push(std::move(out), "sub", nullptr);
  nodes_.back().back = [this, id, a, b] {
    const Tensor& d = g(id);
    Tensor& da = g(a);
    Tensor& db = g(b);
    for (std::size_t i = 0; i < d.size(); ++i) {
      da[i] += d[i];
      db[i] -= d[i];
    }
  };
  return id;
}

Tape::Id Tape::elementwise_mul(Id a, Id b) {
  const Tensor& A = cval(a);
  const Tensor& B = cval(b);
  require(A.same_shape(B), "elementwise_mul: shape mismatch, " + shapes(A, B));
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  Id id = push(std::move(out), "elementwise_mul", nullptr);
  nodes_.back().back = [this, id, a, b] {
    const Tensor& d = g(id);
    const Tensor& A = cval(a);
    const Tensor& B = cval(b);
    Tensor& da = g(a);
    Tensor& db = g(b);
    for (std::size_t i = 0; i < d.size(); ++i) {
      da[i] += d[i] * B[i];
      db[i] += d[i] * A[i];
    }
  };
  return id;
}

Tape::Id Tape::scale(Id a, double c) {
  Tensor out = cval(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  Id id = push(std::move(out), "scale", nullptr);
  nodes_.back().back = [this, id, a, c] {
    const Tensor& d = g(id);
    Tensor& da = g(a);
    for (std::size_t i = 0; i < d.size(); ++i) da[i] += c * d[i];
  };
  return id;
}

Tape::Id Tape::leaky_relu(Id a, double negative_slope) {
  const Tensor& A = cval(a);
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] < 0.0) out[i] *= negative_slope;
  Id id = push(std::move(out), "leaky_relu", nullptr);
  nodes_.back().back = [this, id, a, negative_slope] {
    const Tensor& d = g(id);
    const Tensor& A = cval(a);
    Tensor& da = g(a);
    for (std::size_t i = 0; i < d.size(); ++i)
      da[i] += d[i] * (A[i] < 0.0 ? negative_slope : 1.0);
  };
  return id;
}

Tape::Id Tape::sigmoid(Id a) {
  const Tensor& A = cval(a);
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(out[i]);
  Id id = push(std::move(out), "sigmoid", nullptr);
  nodes_.back().back = [this, id, a] {
    const Tensor& d = g(id);
    const Tensor& y = cval(id);
    Tensor& da = g(a);
    for (std::size_t i = 0; i < d.size(); ++i) da[i] += d[i] * y[i] * (1.0 - y[i]);
  };
  return id;
}

Tape::Id Tape::softplus(Id a) {
  const Tensor& A = cval(a);
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = stable_softplus(out[i]);
  Id id = push(std::move(out), "softplus", nullptr);
  nodes_.back().back = [this, id, a] {
    const Tensor& d = g(id);
    const Tensor& A = cval(a);
    Tensor& da = g(a);
    for (std::size_t i = 0; i < d.size(); ++i) da[i] += d[i] * stable_sigmoid(A[i]);
  };
  return id;
}

Tape::Id Tape::softmax(Id a) {
  const Tensor& A = cval(a);
  const std::size_t n = A.rank() == 1 ? 1 : A.rows();
  const std::size_t d = A.rank() == 1 ? A.size() : A.cols();
  require(d > 0, "softmax: empty input");
  Tensor out = A;
  for (std::size_t r = 0; r < n; ++r) {
    double* row = out.data() + r * d;
    double mx = row[0];
    for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) row[j] /= sum;
  }
  Id id = push(std::move(out), "softmax", nullptr);
  nodes_.back().back = [this, id, a, n, d] {
    const Tensor& dy = g(id);
    const Tensor& y = cval(id);
    Tensor& da = g(a);
    for (std::size_t r = 0; r < n; ++r) {
      const double* yr = y.data() + r * d;
      const double* dr = dy.data() + r * d;
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += yr[j] * dr[j];
      double* gr = da.data() + r * d;
      for (std::size_t j = 0; j < d; ++j) gr[j] += yr[j] * (dr[j] - dot);
    }
  };
  return id;
}

Tape::Id Tape::cosine_similarity(Id a, Id b) {
  const Tensor& A = cval(a);
  const Tensor& B = cval(b);
  require(A.same_shape(B), "cosine_similarity: shape mismatch, " + shapes(A, B));
  const std::size_t n = A.rows();
  const std::size_t d = A.cols();
  Tensor out(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = A.data() + r * d;
    const double* y = B.data() + r * d;
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      xy += x[j] * y[j];
      xx += x[j] * x[j];
      yy += y[j] * y[j];
    }
    out[r] = (xx == 0.0 || yy == 0.0) ? 0.0 : xy / (std::sqrt(xx) * std::sqrt(yy));
  }
  Id id = push(std::move(out), "cosine_similarity", nullptr);
  nodes_.back().back = [this, id, a, b, n, d] {
    const Tensor& dc = g(id);
    const Tensor& A = cval(a);
    const Tensor& B = cval(b);
    Tensor& da = g(a);
    Tensor& db = g(b);
    for (std::size_t r = 0; r < n; ++r) {
      const double* x = A.data() + r * d;
      const double* y = B.data() + r * d;
      double xy = 0.0, xx = 0.0, yy = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        xy += x[j] * y[j];
        xx += x[j] * x[j];
        yy += y[j] * y[j];
      }
      if (xx == 0.0 || yy == 0.0) continue;  // guarded value has zero grad
      const double nx = std::sqrt(xx), ny = std::sqrt(yy);
      const double c = xy / (nx * ny);
      const double s = dc[r];
      double* gx = da.data() + r * d;
      double* gy = db.data() + r * d;
      for (std::size_t j = 0; j < d; ++j) {
        gx[j] += s * (y[j] / (nx * ny) - c * x[j] / xx);
        gy[j] += s * (x[j] / (nx * ny) - c * y[j] / yy);
      }
    }
  };
  return id;
}

Tape::Id Tape::mean_rows(Id a) {
  const Tensor& A = cval(a);
  require(A.rank() == 2 && A.rows() > 0, "mean_rows: needs a non-empty matrix");
  const std::size_t n = A.rows(), d = A.cols();
  Tensor out(d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) out[j] += A(r, j);
  for (std::size_t j = 0; j < d; ++j) out[j] /= static_cast<double>(n);
  Id id = push(std::move(out), "mean_rows", nullptr);
  nodes_.back().back = [this, id, a, n, d] {
    const Tensor& dy = g(id);
    Tensor& da = g(a);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < d; ++j) da(r, j) += dy[j] * inv;
  };
  return id;
}

Tape::Id Tape::row_dot(Id a, Id b) {
  const Tensor& A = cval(a);
  const Tensor& B = cval(b);
  require(A.same_shape(B), "row_dot: shape mismatch, " + shapes(A, B));
  const std::size_t n = A.rows(), d = A.cols();
  Tensor out(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += A(r, j) * B(r, j);
    out[r] = s;
  }
  Id id = push(std::move(out), "row_dot", nullptr);
  nodes_.back().back = [this, id, a, b, n, d] {
    const Tensor& dy = g(id);
    const Tensor& A = cval(a);
    const Tensor& B = cval(b);
    Tensor& da = g(a);
    Tensor& db = g(b);
    for (std::size_t r = 0; r < n; ++r) {
      const double s = dy[r];
      for (std::size_t j = 0; j < d; ++j) {
        da(r, j) += s * B(r, j);
        db(r, j) += s * A(r, j);
      }
    }
  };
  return id;
}

Tape::Id Tape::gather_rows(Id a, std::vector<int> idx) {
  const Tensor& A = cval(a);
  const std::size_t d = A.cols();
  for (int i : idx)
    require(i >= 0 && static_cast<std::size_t>(i) < A.rows(),
            "gather_rows: index out of range");
  Tensor out(idx.size(), d);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double* src = A.data() + static_cast<std::size_t>(idx[r]) * d;
    std::copy(src, src + d, out.data() + r * d);
  }
  Id id = push(std::move(out), "gather_rows", nullptr);
  nodes_.back().back = [this, id, a, idx = std::move(idx), d] {
    const Tensor& dy = g(id);
    Tensor& da = g(a);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      double* dst = da.data() + static_cast<std::size_t>(idx[r]) * d;
      const double* src = dy.data() + r * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
  };
  return id;
}

Tape::Id Tape::scale_rows(Id a, Id s) {
  const Tensor& A = cval(a);
  const Tensor& S = cval(s);
  require(S.rank() == 1 && S.size() == A.rows(),
          "scale_rows: scale vector size " + S.shape_str() + " != rows of " + A.shape_str());
  const std::size_t n = A.rows(), d = A.cols();
  Tensor out = A;
  for (std::size_t r = 0; r < n; ++r) {
    const double w = S[r];
    double* row = out.data() + r * d;
    for (std::size_t j = 0; j < d; ++j) row[j] *= w;
  }
  Id id = push(std::move(out), "scale_rows", nullptr);
  nodes_.back().back = [this, id, a, s, n, d] {
    const Tensor& dy = g(id);
    const Tensor& A = cval(a);
    const Tensor& S = cval(s);
    Tensor& da = g(a);
    Tensor& ds = g(s);
    for (std::size_t r = 0; r < n; ++r) {
      const double w = S[r];
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        da(r, j) += w * dy(r, j);
        dot += A(r, j) * dy(r, j);
      }
      ds[r] += dot;
    }
  };
  return id;
}

Tape::Id Tape::segment_sum(Id a, std::vector<std::size_t> offsets) {
  const Tensor& A = cval(a);
  require(!offsets.empty() && offsets.back() == A.rows(),
          "segment_sum: offsets do not cover input rows");
  const std::size_t nseg = offsets.size() - 1;
  const std::size_t d = A.cols();
  Tensor out(nseg, d);
  for (std::size_t seg = 0; seg < nseg; ++seg) {
    double* dst = out.data() + seg * d;
    for (std::size_t r = offsets[seg]; r < offsets[seg + 1]; ++r) {
      const double* src = A.data() + r * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
  }
  Id id = push(std::move(out), "segment_sum", nullptr);
  nodes_.back().back = [this, id, a, offsets = std::move(offsets), d] {
    const Tensor& dy = g(id);
    Tensor& da = g(a);
    for (std::size_t seg = 0; seg + 1 < offsets.size(); ++seg) {
      const double* src = dy.data() + seg * d;
      for (std::size_t r = offsets[seg]; r < offsets[seg + 1]; ++r) {
        double* dst = da.data() + r * d;
        for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
      }
    }
  };
  return id;
}

Tape::Id Tape::segment_softmax_self(Id scores, std::vector<std::size_t> offsets,
                                    Id self_scores) {
  const Tensor& S = cval(scores);
  const Tensor& F = cval(self_scores);
  require(!offsets.empty() && offsets.back() == S.size(),
          "segment_softmax_self: offsets do not cover scores");
  const std::size_t nseg = offsets.size() - 1;
  require(F.size() == nseg, "segment_softmax_self: self score count != segment count");
  const std::size_t ne = S.size();
  Tensor out(ne + nseg);
  for (std::size_t seg = 0; seg < nseg; ++seg) {
    double mx = F[seg];
    for (std::size_t r = offsets[seg]; r < offsets[seg + 1]; ++r) mx = std::max(mx, S[r]);
    double sum = std::exp(F[seg] - mx);
    const double self_e = sum;
    for (std::size_t r = offsets[seg]; r < offsets[seg + 1]; ++r) {
      out[r] = std::exp(S[r] - mx);
      sum += out[r];
    }
    for (std::size_t r = offsets[seg]; r < offsets[seg + 1]; ++r) out[r] /= sum;
    out[ne + seg] = self_e / sum;
  }
  Id id = push(std::move(out), "segment_softmax_self", nullptr);
  nodes_.back().back = [this, id, scores, self_scores, offsets = std::move(offsets), ne] {
    const Tensor& y = cval(id);
    const Tensor& dy = g(id);
    Tensor& ds = g(scores);
    Tensor& df = g(self_scores);
    for (std::size_t seg = 0; seg + 1 < offsets.size(); ++seg) {
      double dot = dy[ne + seg] * y[ne + seg];
      for (std::size_t r = offsets[seg]; r < offsets[seg + 1]; ++r) dot += dy[r] * y[r];
      for (std::size_t r = offsets[seg]; r < offsets[seg + 1]; ++r)
        ds[r] += y[r] * (dy[r] - dot);
      df[seg] += y[ne + seg] * (dy[ne + seg] - dot);
    }
  };
  return id;
}

Tape::Id Tape::concat_rows(Id a, Id b) {
  const Tensor& A = cval(a);
  const Tensor& B = cval(b);
  require(A.cols() == B.cols(), "concat_rows: column mismatch, " + shapes(A, B));
  const std::size_t d = A.cols();
  Tensor out(A.rows() + B.rows(), d);
  std::copy(A.data(), A.data() + A.size(), out.data());
  std::copy(B.data(), B.data() + B.size(), out.data() + A.size());
  Id id = push(std::move(out), "concat_rows", nullptr);
  nodes_.back().back = [this, id, a, b] {
    const Tensor& dy = g(id);
    Tensor& da = g(a);
    Tensor& db = g(b);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i];
    for (std::size_t i = 0; i < db.size(); ++i) db[i] += dy[da.size() + i];
  };
  return id;
}

Tape::Id Tape::slice_rows(Id a, std::size_t begin, std::size_t end) {
  const Tensor& A = cval(a);
  require(begin <= end && end <= A.rows(), "slice_rows: bad range");
  const std::size_t d = A.cols();
  Tensor out = A.rank() == 1 ? Tensor(end - begin) : Tensor(end - begin, d);
  std::copy(A.data() + begin * d, A.data() + end * d, out.data());
  Id id = push(std::move(out), "slice_rows", nullptr);
  nodes_.back().back = [this, id, a, begin, d] {
    const Tensor& dy = g(id);
    Tensor& da = g(a);
    double* dst = da.data() + begin * d;
    for (std::size_t i = 0; i < dy.size(); ++i) dst[i] += dy[i];
  };
  return id;
}

Tape::Id Tape::sum_squares(Id a) {
  const Tensor& A = cval(a);
  double s = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) s += A[i] * A[i];
  Id id = push(Tensor::scalar(s), "sum_squares", nullptr);
  nodes_.back().back = [this, id, a] {
    const double d = g(id)[0];
    const Tensor& A = cval(a);
    Tensor& da = g(a);
    for (std::size_t i = 0; i < A.size(); ++i) da[i] += 2.0 * d * A[i];
  };
  return id;
}

Tape::Id Tape::mean_all(Id a) {
  const Tensor& A = cval(a);
  require(A.size() > 0, "mean_all: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) s += A[i];
  Id id = push(Tensor::scalar(s / static_cast<double>(A.size())), "mean_all", nullptr);
  nodes_.back().back = [this, id, a] {
    const double d = g(id)[0] / static_cast<double>(cval(a).size());
    Tensor& da = g(a);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += d;
  };
  return id;
}

Tape::Id Tape::broadcast_scalar(Id a, std::size_t n) {
  const Tensor& A = cval(a);
  require(A.size() == 1, "broadcast_scalar: input must be scalar");
  Tensor out(n);
  out.fill(A[0]);
  Id id = push(std::move(out), "broadcast_scalar", nullptr);
  nodes_.back().back = [this, id, a] {
    const Tensor& dy = g(id);
    double s = 0.0;
    for (std::size_t i = 0; i < dy.size(); ++i) s += dy[i];
    g(a)[0] += s;
  };
  return id;
}

void Tape::backward(Id loss) {
  const Tensor& L = cval(loss);
  require(L.size() == 1, "backward: loss must be scalar");
  require(L.all_finite(), "backward: loss is not finite");
  for (Node& n : nodes_) {
    n.grad = Tensor();
    if (n.value.rank() == 1)
      n.grad = Tensor(n.value.size());
    else
      n.grad = Tensor(n.value.rows(), n.value.cols());
  }
  nodes_[static_cast<std::size_t>(loss)].grad[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) nodes_[i].back();
  }
  grads_ready_ = true;
}

}  // namespace a2gcn::numerics
