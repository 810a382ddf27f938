#include <cmath>

#include "a2gcn/errors.hpp"
#include "a2gcn/model/model.hpp"
#include "internal.hpp"

namespace a2gcn::model {

namespace {

void check_weight_shape(const graph::TripartiteGraph& g, const graph::AttentionWeights& w) {
  auto fail = [](const std::string& what) {
    throw DataError("propagate: attention weights missing for " + what);
  };
  if (w.item_user.size() != static_cast<std::size_t>(g.n_items) ||
      w.item_attr.size() != static_cast<std::size_t>(g.n_items) ||
      w.item_self.size() != static_cast<std::size_t>(g.n_items))
    fail("item rows");
  if (w.user_item.size() != static_cast<std::size_t>(g.n_users) ||
      w.user_self.size() != static_cast<std::size_t>(g.n_users))
    fail("user rows");
  for (std::size_t v = 0; v < w.item_user.size(); ++v) {
    if (w.item_user[v].size() != g.item_users[v].size()) fail("item " + std::to_string(v));
    if (w.item_attr[v].size() != g.item_attrs[v].size())
      fail("item " + std::to_string(v) + " attributes");
  }
  for (std::size_t u = 0; u < w.user_item.size(); ++u)
    if (w.user_item[u].size() != g.user_items[u].size()) fail("user " + std::to_string(u));
}

}  // namespace

Propagated propagate(const ModelParams& params, const graph::TripartiteGraph& g,
                     const graph::AttentionWeights& weights, const ModelConfig& config,
                     const GraphMask* mask) {
  config.variant.validate();
  if (!config.variant.use_propagation) return {params.E_u, params.E_v};
  check_weight_shape(g, weights);
  ForwardPlan plan = ForwardPlan::build(g, config.variant, mask);
  const int n_users = g.n_users;

  // Map provided per-adjacency weights onto the surviving plan edges. With a
  // mask, weights are renormalized over survivors plus self (softmax over a
  // subset keeps the ratios), then scaled by the message mask.
  std::vector<double> item_edge_w(plan.item_src.size());
  std::vector<double> item_self_w(weights.item_self);
  for (int v = 0; v < g.n_items; ++v) {
    const std::size_t begin = plan.item_offsets[static_cast<std::size_t>(v)];
    const std::size_t end = plan.item_offsets[static_cast<std::size_t>(v) + 1];
    for (std::size_t e = begin; e < end; ++e) {
      const auto pos = static_cast<std::size_t>(plan.item_pos[e]);
      item_edge_w[e] = plan.item_src[e] < n_users
                           ? weights.item_user[static_cast<std::size_t>(v)][pos]
                           : weights.item_attr[static_cast<std::size_t>(v)][pos];
    }
    if (mask) {
      double denom = weights.item_self[static_cast<std::size_t>(v)];
      for (std::size_t e = begin; e < end; ++e) denom += item_edge_w[e];
      if (denom <= 0.0) throw NumericError("propagate: non-positive weight sum");
      for (std::size_t e = begin; e < end; ++e) item_edge_w[e] /= denom;
      item_self_w[static_cast<std::size_t>(v)] /= denom;
    }
    for (std::size_t e = begin; e < end; ++e) item_edge_w[e] *= plan.item_msg_mult[e];
  }
  std::vector<double> user_edge_w(plan.user_src.size());
  std::vector<double> user_self_w(weights.user_self);
  for (int u = 0; u < g.n_users; ++u) {
    const std::size_t begin = plan.user_offsets[static_cast<std::size_t>(u)];
    const std::size_t end = plan.user_offsets[static_cast<std::size_t>(u) + 1];
    for (std::size_t e = begin; e < end; ++e)
      user_edge_w[e] =
          weights.user_item[static_cast<std::size_t>(u)][static_cast<std::size_t>(plan.user_pos[e])];
    if (mask) {
      double denom = weights.user_self[static_cast<std::size_t>(u)];
      for (std::size_t e = begin; e < end; ++e) denom += user_edge_w[e];
      if (denom <= 0.0) throw NumericError("propagate: non-positive weight sum");
      for (std::size_t e = begin; e < end; ++e) user_edge_w[e] /= denom;
      user_self_w[static_cast<std::size_t>(u)] /= denom;
    }
    for (std::size_t e = begin; e < end; ++e) user_edge_w[e] *= plan.user_msg_mult[e];
  }

  Tape tape;
  Tape::Id e_u = tape.constant(params.E_u);
  Tape::Id e_v = tape.constant(params.E_v);
  Tape::Id w1 = tape.constant(params.W1);
  Tape::Id w2 = tape.constant(params.W2);
  Tape::Id item_src_emb = e_u;
  if (plan.use_attrs) item_src_emb = tape.concat_rows(e_u, tape.constant(params.E_a));

  Tape::Id items = detail::aggregate_side(
      tape, config, e_v, item_src_emb, plan.item_src, plan.item_offsets,
      tape.constant(Tensor::from(item_edge_w)), tape.constant(Tensor::from(item_self_w)), w1, w2);
  Tape::Id users = detail::aggregate_side(
      tape, config, e_u, e_v, plan.user_src, plan.user_offsets,
      tape.constant(Tensor::from(user_edge_w)), tape.constant(Tensor::from(user_self_w)), w1, w2);
  return {tape.value(users), tape.value(items)};
}

Propagated propagate_matrix(const ModelParams& params, const graph::AttentionLaplacian& lap,
                            const ModelConfig& config) {
  if (lap.n_users != params.n_users() || lap.n_items != params.n_items() ||
      lap.n_attrs != params.n_attrs())
    throw NumericError("propagate_matrix: Laplacian/parameter dimension mismatch");
  const auto side = static_cast<std::size_t>(lap.side());
  const std::size_t d = params.E_u.cols();
  const auto nu = static_cast<std::size_t>(lap.n_users);
  const auto nv = static_cast<std::size_t>(lap.n_items);

  Tensor E(side, d);
  std::copy(params.E_u.data(), params.E_u.data() + params.E_u.size(), E.data());
  std::copy(params.E_v.data(), params.E_v.data() + params.E_v.size(), E.data() + nu * d);
  std::copy(params.E_a.data(), params.E_a.data() + params.E_a.size(), E.data() + (nu + nv) * d);

  // agg = L E (off-diagonal attention blocks)
  Tensor agg(side, d);
  for (std::size_t r = 0; r < side; ++r) {
    double* out = agg.data() + r * d;
    for (std::size_t k = lap.row_offsets[r]; k < lap.row_offsets[r + 1]; ++k) {
      const double w = lap.values[k];
      const double* src = E.data() + static_cast<std::size_t>(lap.col_indices[k]) * d;
      for (std::size_t j = 0; j < d; ++j) out[j] += w * src[j];
    }
  }
  // with_self = agg + diag(self) E
  Tensor with_self = agg;
  for (std::size_t r = 0; r < side; ++r) {
    const double w = lap.diag[r];
    if (w == 0.0) continue;
    double* out = with_self.data() + r * d;
    const double* src = E.data() + r * d;
    for (std::size_t j = 0; j < d; ++j) out[j] += w * src[j];
  }
  Tensor linear;
  gemm(linear, with_self, false, params.W1, true);
  Tensor interact_in = agg;
  for (std::size_t i = 0; i < interact_in.size(); ++i) interact_in[i] *= E[i];
  gemm(linear, interact_in, false, params.W2, true, /*accumulate=*/true);

  Propagated out;
  out.users = Tensor(nu, d);
  out.items = Tensor(nv, d);
  const double slope = config.leaky_relu_slope;
  for (std::size_t i = 0; i < nu * d; ++i) {
    const double x = linear[i];
    out.users[i] = x < 0.0 ? slope * x : x;
  }
  for (std::size_t i = 0; i < nv * d; ++i) {
    const double x = linear[nu * d + i];
    out.items[i] = x < 0.0 ? slope * x : x;
  }
  return out;
}

double predict(const Propagated& embeddings, int u, int v) {
  const std::size_t d = embeddings.users.cols();
  const double* eu = embeddings.users.data() + static_cast<std::size_t>(u) * d;
  const double* ev = embeddings.items.data() + static_cast<std::size_t>(v) * d;
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += eu[k] * ev[k];
  return s;
}

}  // namespace a2gcn::model
