#include "a2gcn/errors.hpp"
#include "a2gcn/numerics/random.hpp"
#include "a2gcn/training/training.hpp"

namespace a2gcn::training {

using numerics::Rng;

model::GraphMask apply_dropout(const graph::TripartiteGraph& g, const DropoutSpec& spec) {
  if (spec.node_drop_ratio < 0.0 || spec.node_drop_ratio > 0.8 ||
      spec.message_drop_ratio < 0.0 || spec.message_drop_ratio > 0.8)
    throw DataError("apply_dropout: drop ratios must lie in [0, 0.8]");

  model::GraphMask mask;
  mask.message_scale =
      spec.message_drop_ratio > 0.0 ? 1.0 / (1.0 - spec.message_drop_ratio) : 1.0;
  const auto n_nodes = static_cast<std::size_t>(g.total_nodes());
  mask.node_kept.assign(n_nodes, 1);
  mask.item_user_msg.assign(g.n_interaction_edges(), 1);
  mask.user_item_msg.assign(g.n_interaction_edges(), 1);
  mask.item_attr_msg.assign(g.n_attribute_edges(), 1);

  Rng rng(spec.seed);
  if (spec.node_drop_ratio > 0.0) {
    for (std::size_t n = 0; n < n_nodes; ++n)
      mask.node_kept[n] = rng.bernoulli(spec.node_drop_ratio) ? 0 : 1;
  }
  if (spec.message_drop_ratio > 0.0) {
    for (auto& flag : mask.item_user_msg)
      flag = rng.bernoulli(spec.message_drop_ratio) ? 0 : 1;
    for (auto& flag : mask.item_attr_msg)
      flag = rng.bernoulli(spec.message_drop_ratio) ? 0 : 1;
    for (auto& flag : mask.user_item_msg)
      flag = rng.bernoulli(spec.message_drop_ratio) ? 0 : 1;
  }
  return mask;
}

}  // namespace a2gcn::training
