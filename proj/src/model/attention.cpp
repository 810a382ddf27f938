#include <algorithm>
#include <cmath>

#include "a2gcn/errors.hpp"
#include "a2gcn/model/model.hpp"

namespace a2gcn::model {

namespace {

// W * e for one embedding row; W is (d x d) row-major.
std::vector<double> matvec(const Tensor& W, const double* e) {
  const std::size_t d = W.cols();
  std::vector<double> out(W.rows(), 0.0);
  for (std::size_t j = 0; j < W.rows(); ++j) {
    const double* wj = W.data() + j * d;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += wj[k] * e[k];
    out[j] = s;
  }
  return out;
}

double cosine(const double* x, const double* y, std::size_t d) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    xy += x[k] * y[k];
    xx += x[k] * x[k];
    yy += y[k] * y[k];
  }
  if (xx == 0.0 || yy == 0.0) return 0.0;
  return xy / (std::sqrt(xx) * std::sqrt(yy));
}

// Softmax over [self, scores...]; accumulation order matches the tape's
// segment_softmax_self kernel.
NodeAttention softmax_with_self(const std::vector<double>& scores, double self_score) {
  double mx = self_score;
  for (double s : scores) mx = std::max(mx, s);
  double sum = std::exp(self_score - mx);
  const double self_e = sum;
  NodeAttention out;
  out.neighbor_w.reserve(scores.size());
  for (double s : scores) {
    const double e = std::exp(s - mx);
    out.neighbor_w.push_back(e);
    sum += e;
  }
  for (double& w : out.neighbor_w) w /= sum;
  out.self_w = self_e / sum;
  return out;
}

NodeAttention uniform_attention(std::size_t degree) {
  NodeAttention out;
  const double w = 1.0 / static_cast<double>(degree + 1);
  out.neighbor_w.assign(degree, w);
  out.self_w = w;
  return out;
}

}  // namespace

NodeAttention item_attention(const ModelParams& params, const graph::TripartiteGraph& g, int v,
                             const ModelConfig& config) {
  if (v < 0 || v >= g.n_items) throw DataError("item_attention: item index out of range");
  const auto& users = g.item_users[static_cast<std::size_t>(v)];
  const auto& attrs = g.item_attrs[static_cast<std::size_t>(v)];
  const bool with_attrs = config.variant.use_attributes;
  const std::size_t degree = users.size() + (with_attrs ? attrs.size() : 0);
  if (!config.variant.use_attention) return uniform_attention(degree);

  const std::size_t d = params.E_v.cols();
  const double* ev = params.E_v.data() + static_cast<std::size_t>(v) * d;
  std::vector<double> scores;
  scores.reserve(degree);
  for (int u : users) {
    const auto t = matvec(params.W_vu, params.E_u.data() + static_cast<std::size_t>(u) * d);
    scores.push_back(cosine(ev, t.data(), d));
  }
  if (with_attrs) {
    for (int a : attrs) {
      const auto t = matvec(params.W_va, params.E_a.data() + static_cast<std::size_t>(a) * d);
      scores.push_back(cosine(ev, t.data(), d));
    }
  }
  const double self_score = config.learned_self_scores ? params.self_score_item[0] : 1.0;
  return softmax_with_self(scores, self_score);
}

NodeAttention user_attention(const ModelParams& params, const graph::TripartiteGraph& g, int u,
                             bool attribute_aware, const ModelConfig& config) {
  if (u < 0 || u >= g.n_users) throw DataError("user_attention: user index out of range");
  const auto& items = g.user_items[static_cast<std::size_t>(u)];
  if (!config.variant.use_attention) return uniform_attention(items.size());

  const std::size_t d = params.E_u.cols();
  const double* eu = params.E_u.data() + static_cast<std::size_t>(u) * d;
  std::vector<double> scores;
  scores.reserve(items.size());
  std::vector<double> h(d);
  for (int v : items) {
    const double* ev = params.E_v.data() + static_cast<std::size_t>(v) * d;
    std::copy(ev, ev + d, h.begin());
    const auto& attrs = g.item_attrs[static_cast<std::size_t>(v)];
    if (attribute_aware && !attrs.empty()) {
      // mean-pooled attribute embedding, then the context transform
      std::vector<double> pooled(d, 0.0);
      const double inv = 1.0 / static_cast<double>(attrs.size());
      for (int a : attrs) {
        const double* ea = params.E_a.data() + static_cast<std::size_t>(a) * d;
        for (std::size_t k = 0; k < d; ++k) pooled[k] += ea[k] * inv;
      }
      const auto ctx = matvec(params.W_a, pooled.data());
      for (std::size_t k = 0; k < d; ++k) h[k] += ctx[k];
    }
    const auto t = matvec(params.W_uv, h.data());
    scores.push_back(cosine(eu, t.data(), d));
  }
  const double self_score = config.learned_self_scores ? params.self_score_user[0] : 1.0;
  return softmax_with_self(scores, self_score);
}

graph::AttentionWeights compute_attention(const ModelParams& params,
                                          const graph::TripartiteGraph& g,
                                          const ModelConfig& config) {
  config.variant.validate();
  graph::AttentionWeights w;
  const auto nv = static_cast<std::size_t>(g.n_items);
  const auto nu = static_cast<std::size_t>(g.n_users);
  w.item_user.resize(nv);
  w.item_attr.resize(nv);
  w.item_self.resize(nv);
  w.user_item.resize(nu);
  w.user_self.resize(nu);
  for (int v = 0; v < g.n_items; ++v) {
    NodeAttention att = item_attention(params, g, v, config);
    const std::size_t n_user = g.item_users[static_cast<std::size_t>(v)].size();
    auto& uw = w.item_user[static_cast<std::size_t>(v)];
    auto& aw = w.item_attr[static_cast<std::size_t>(v)];
    uw.assign(att.neighbor_w.begin(), att.neighbor_w.begin() + static_cast<long>(n_user));
    if (config.variant.use_attributes) {
      aw.assign(att.neighbor_w.begin() + static_cast<long>(n_user), att.neighbor_w.end());
    } else {
      aw.assign(g.item_attrs[static_cast<std::size_t>(v)].size(), 0.0);
    }
    w.item_self[static_cast<std::size_t>(v)] = att.self_w;
  }
  for (int u = 0; u < g.n_users; ++u) {
    NodeAttention att =
        user_attention(params, g, u, config.variant.attribute_aware_attention, config);
    w.user_item[static_cast<std::size_t>(u)] = att.neighbor_w;
    w.user_self[static_cast<std::size_t>(u)] = att.self_w;
  }
  return w;
}

}  // namespace a2gcn::model
