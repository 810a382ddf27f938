#include <cmath>

#include "a2gcn/errors.hpp"
#include "a2gcn/model/model.hpp"
#include "internal.hpp"

namespace a2gcn::model {

ForwardPlan ForwardPlan::build(const graph::TripartiteGraph& g, const VariantConfig& variant,
                               const GraphMask* mask) {
  variant.validate();
  ForwardPlan plan;
  plan.n_users = g.n_users;
  plan.n_items = g.n_items;
  plan.n_attrs = g.n_attrs;
  plan.use_attrs = variant.use_attributes;
  plan.has_dropout = mask != nullptr;

  if (mask) {
    if (mask->node_kept.size() != static_cast<std::size_t>(g.total_nodes()))
      throw DataError("ForwardPlan: mask node count mismatch");
    if (mask->item_user_msg.size() != g.n_interaction_edges() ||
        mask->user_item_msg.size() != g.n_interaction_edges() ||
        mask->item_attr_msg.size() != g.n_attribute_edges())
      throw DataError("ForwardPlan: mask edge count mismatch");
  }
  auto user_kept = [&](int u) { return !mask || mask->node_kept[static_cast<std::size_t>(u)]; };
  auto item_kept = [&](int v) {
    return !mask || mask->node_kept[static_cast<std::size_t>(g.n_users + v)];
  };
  auto attr_kept = [&](int a) {
    return !mask || mask->node_kept[static_cast<std::size_t>(g.n_users + g.n_items + a)];
  };

  // item side: user edges then attribute edges, grouped per item
  plan.item_offsets.push_back(0);
  std::size_t iu_edge = 0, ia_edge = 0;
  std::vector<std::size_t> ia_edge_base(static_cast<std::size_t>(g.n_items) + 1, 0);
  for (int v = 0; v < g.n_items; ++v)
    ia_edge_base[static_cast<std::size_t>(v) + 1] =
        ia_edge_base[static_cast<std::size_t>(v)] +
        g.item_attrs[static_cast<std::size_t>(v)].size();
  for (int v = 0; v < g.n_items; ++v) {
    const auto& users = g.item_users[static_cast<std::size_t>(v)];
    for (std::size_t k = 0; k < users.size(); ++k, ++iu_edge) {
      if (!user_kept(users[k])) continue;
      plan.item_dst.push_back(v);
      plan.item_src.push_back(users[k]);
      plan.item_pos.push_back(static_cast<int>(k));
      plan.item_msg_mult.push_back(
          (mask && !mask->item_user_msg[iu_edge]) ? 0.0 : (mask ? mask->message_scale : 1.0));
    }
    if (variant.use_attributes) {
      const auto& attrs = g.item_attrs[static_cast<std::size_t>(v)];
      ia_edge = ia_edge_base[static_cast<std::size_t>(v)];
      for (std::size_t k = 0; k < attrs.size(); ++k, ++ia_edge) {
        if (!attr_kept(attrs[k])) continue;
        plan.item_dst.push_back(v);
        plan.item_src.push_back(g.n_users + attrs[k]);
        plan.item_pos.push_back(static_cast<int>(k));
        plan.item_msg_mult.push_back(
            (mask && !mask->item_attr_msg[ia_edge]) ? 0.0 : (mask ? mask->message_scale : 1.0));
      }
    }
    plan.item_offsets.push_back(plan.item_src.size());
  }

  // user side
  plan.user_offsets.push_back(0);
  std::size_t ui_edge = 0;
  for (int u = 0; u < g.n_users; ++u) {
    const auto& items = g.user_items[static_cast<std::size_t>(u)];
    for (std::size_t k = 0; k < items.size(); ++k, ++ui_edge) {
      if (!item_kept(items[k])) continue;
      plan.user_dst.push_back(u);
      plan.user_src.push_back(items[k]);
      plan.user_pos.push_back(static_cast<int>(k));
      plan.user_msg_mult.push_back(
          (mask && !mask->user_item_msg[ui_edge]) ? 0.0 : (mask ? mask->message_scale : 1.0));
    }
    plan.user_offsets.push_back(plan.user_src.size());
  }

  // mean-pooling over surviving attribute edges (attribute-aware attention)
  if (variant.use_attributes) {
    plan.pool_offsets.push_back(0);
    for (int v = 0; v < g.n_items; ++v) {
      const auto& attrs = g.item_attrs[static_cast<std::size_t>(v)];
      std::size_t begin = plan.pool_src.size();
      for (int a : attrs)
        if (attr_kept(a)) plan.pool_src.push_back(a);
      const std::size_t deg = plan.pool_src.size() - begin;
      if (deg > 0) {
        const double inv = 1.0 / static_cast<double>(deg);
        for (std::size_t k = 0; k < deg; ++k) plan.pool_weights.push_back(inv);
      }
      plan.pool_offsets.push_back(plan.pool_src.size());
    }
  }

  // uniform weights for the attention-off variants
  if (!variant.use_attention) {
    plan.item_uniform.resize(plan.item_src.size());
    plan.item_uniform_self.resize(static_cast<std::size_t>(g.n_items));
    for (int v = 0; v < g.n_items; ++v) {
      const std::size_t deg = plan.item_offsets[static_cast<std::size_t>(v) + 1] -
                              plan.item_offsets[static_cast<std::size_t>(v)];
      const double w = 1.0 / static_cast<double>(deg + 1);
      plan.item_uniform_self[static_cast<std::size_t>(v)] = w;
      for (std::size_t e = plan.item_offsets[static_cast<std::size_t>(v)];
           e < plan.item_offsets[static_cast<std::size_t>(v) + 1]; ++e)
        plan.item_uniform[e] = w * plan.item_msg_mult[e];
    }
    plan.user_uniform.resize(plan.user_src.size());
    plan.user_uniform_self.resize(static_cast<std::size_t>(g.n_users));
    for (int u = 0; u < g.n_users; ++u) {
      const std::size_t deg = plan.user_offsets[static_cast<std::size_t>(u) + 1] -
                              plan.user_offsets[static_cast<std::size_t>(u)];
      const double w = 1.0 / static_cast<double>(deg + 1);
      plan.user_uniform_self[static_cast<std::size_t>(u)] = w;
      for (std::size_t e = plan.user_offsets[static_cast<std::size_t>(u)];
           e < plan.user_offsets[static_cast<std::size_t>(u) + 1]; ++e)
        plan.user_uniform[e] = w * plan.user_msg_mult[e];
    }
  }
  return plan;
}

namespace {

struct GammaVars {
  Tape::Id edges = -1;  // per-edge weights (message mask applied)
  Tape::Id self = -1;   // per-node self weights
};

// Attention softmax on the tape, or the plan's uniform constants.
GammaVars item_side_gamma(Tape& tape, const ModelParams& params, const ForwardPlan& plan,
                          const ModelConfig& config, Tape::Id e_u, Tape::Id e_v, Tape::Id e_a,
                          Tape::Id w_vu, Tape::Id w_va, ForwardVars& vars) {
  GammaVars out;
  const std::size_t ne = plan.item_src.size();
  const auto nv = static_cast<std::size_t>(plan.n_items);
  if (!config.variant.use_attention) {
    out.edges = tape.constant(Tensor::from(plan.item_uniform));
    out.self = tape.constant(Tensor::from(plan.item_uniform_self));
    return out;
  }
  Tape::Id transformed = tape.matmul(e_u, w_vu, false, true);
  if (plan.use_attrs) {
    Tape::Id ta = tape.matmul(e_a, w_va, false, true);
    transformed = tape.concat_rows(transformed, ta);
  }
  Tape::Id scores = tape.cosine_similarity(tape.gather_rows(e_v, plan.item_dst),
                                           tape.gather_rows(transformed, plan.item_src));
  Tape::Id selfs;
  if (config.learned_self_scores) {
    Tape::Id p = tape.param(params.self_score_item, "self_score_item");
    vars.trainable.emplace_back("self_score_item", p);
    selfs = tape.broadcast_scalar(p, nv);
  } else {
    selfs = tape.constant(Tensor::from(std::vector<double>(nv, 1.0)));
  }
  Tape::Id gamma = tape.segment_softmax_self(scores, plan.item_offsets, selfs);
  vars.item_gamma = gamma;
  out.edges = tape.slice_rows(gamma, 0, ne);
  out.self = tape.slice_rows(gamma, ne, ne + nv);
  if (plan.has_dropout)
    out.edges = tape.elementwise_mul(out.edges, tape.constant(Tensor::from(plan.item_msg_mult)));
  return out;
}

GammaVars user_side_gamma(Tape& tape, const ModelParams& params, const ForwardPlan& plan,
                          const ModelConfig& config, Tape::Id e_u, Tape::Id e_v, Tape::Id e_a,
                          Tape::Id w_uv, Tape::Id w_a, ForwardVars& vars) {
  GammaVars out;
  const std::size_t ne = plan.user_src.size();
  const auto nu = static_cast<std::size_t>(plan.n_users);
  if (!config.variant.use_attention) {
    out.edges = tape.constant(Tensor::from(plan.user_uniform));
    out.self = tape.constant(Tensor::from(plan.user_uniform_self));
    return out;
  }
  Tape::Id context = e_v;
  if (config.variant.attribute_aware_attention) {
    Tape::Id pooled = tape.segment_sum(
        tape.scale_rows(tape.gather_rows(e_a, plan.pool_src),
                        tape.constant(Tensor::from(plan.pool_weights))),
        plan.pool_offsets);
    context = tape.add(e_v, tape.matmul(pooled, w_a, false, true));
  }
  Tape::Id transformed = tape.matmul(context, w_uv, false, true);
  Tape::Id scores = tape.cosine_similarity(tape.gather_rows(e_u, plan.user_dst),
                                           tape.gather_rows(transformed, plan.user_src));
  Tape::Id selfs;
  if (config.learned_self_scores) {
    Tape::Id p = tape.param(params.self_score_user, "self_score_user");
    vars.trainable.emplace_back("self_score_user", p);
    selfs = tape.broadcast_scalar(p, nu);
  } else {
    selfs = tape.constant(Tensor::from(std::vector<double>(nu, 1.0)));
  }
  Tape::Id gamma = tape.segment_softmax_self(scores, plan.user_offsets, selfs);
  vars.user_gamma = gamma;
  out.edges = tape.slice_rows(gamma, 0, ne);
  out.self = tape.slice_rows(gamma, ne, ne + nu);
  if (plan.has_dropout)
    out.edges = tape.elementwise_mul(out.edges, tape.constant(Tensor::from(plan.user_msg_mult)));
  return out;
}

}  // namespace

ForwardVars build_forward(Tape& tape, const ModelParams& params, const ForwardPlan& plan,
                          const ModelConfig& config) {
  config.variant.validate();
  if (params.n_users() != plan.n_users || params.n_items() != plan.n_items ||
      (plan.use_attrs && params.n_attrs() != plan.n_attrs))
    throw NumericError("build_forward: parameter/plan dimension mismatch");

  ForwardVars vars;
  vars.e_u = tape.param(params.E_u, "E_u");
  vars.e_v = tape.param(params.E_v, "E_v");
  vars.trainable.emplace_back("E_u", vars.e_u);
  vars.trainable.emplace_back("E_v", vars.e_v);
  if (plan.use_attrs) {
    if (config.train_attr_embeddings) {
      vars.e_a = tape.param(params.E_a, "E_a");
      vars.trainable.emplace_back("E_a", vars.e_a);
    } else {
      vars.e_a = tape.constant(params.E_a);
    }
  }

  if (!config.variant.use_propagation) {
    vars.users = vars.e_u;
    vars.items = vars.e_v;
    return vars;
  }

  Tape::Id w1 = tape.param(params.W1, "W1");
  Tape::Id w2 = tape.param(params.W2, "W2");
  vars.trainable.emplace_back("W1", w1);
  vars.trainable.emplace_back("W2", w2);
  Tape::Id w_vu = -1, w_va = -1, w_uv = -1, w_a = -1;
  if (config.variant.use_attention) {
    w_vu = tape.param(params.W_vu, "W_vu");
    w_uv = tape.param(params.W_uv, "W_uv");
    vars.trainable.emplace_back("W_vu", w_vu);
    vars.trainable.emplace_back("W_uv", w_uv);
    if (plan.use_attrs) {
      w_va = tape.param(params.W_va, "W_va");
      vars.trainable.emplace_back("W_va", w_va);
    }
    if (config.variant.attribute_aware_attention) {
      w_a = tape.param(params.W_a, "W_a");
      vars.trainable.emplace_back("W_a", w_a);
    }
  }

  GammaVars item_gamma =
      item_side_gamma(tape, params, plan, config, vars.e_u, vars.e_v, vars.e_a, w_vu, w_va, vars);
  GammaVars user_gamma =
      user_side_gamma(tape, params, plan, config, vars.e_u, vars.e_v, vars.e_a, w_uv, w_a, vars);

  Tape::Id item_src_emb = plan.use_attrs ? tape.concat_rows(vars.e_u, vars.e_a) : vars.e_u;
  vars.items = detail::aggregate_side(tape, config, vars.e_v, item_src_emb, plan.item_src,
                                      plan.item_offsets, item_gamma.edges, item_gamma.self,
                                      w1, w2);
  vars.users = detail::aggregate_side(tape, config, vars.e_u, vars.e_v, plan.user_src,
                                      plan.user_offsets, user_gamma.edges, user_gamma.self,
                                      w1, w2);
  return vars;
}

Propagated forward_full(const ModelParams& params, const graph::TripartiteGraph& g,
                        const ModelConfig& config) {
  ForwardPlan plan = ForwardPlan::build(g, config.variant, nullptr);
  Tape tape;
  ForwardVars vars = build_forward(tape, params, plan, config);
  return {tape.value(vars.users), tape.value(vars.items)};
}

}  // namespace a2gcn::model
