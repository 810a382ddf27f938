#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "a2gcn/graph/graph.hpp"
#include "a2gcn/numerics/tape.hpp"
#include "a2gcn/numerics/tensor.hpp"

namespace a2gcn::model {

using numerics::Tape;
using numerics::Tensor;

// Ablation switches. The named presets:
//   gcn_b    - no attributes, no attention (uniform weights)
//   a_gcn_am - attention only
//   a_gcn_att- attributes only (uniform weights)
//   a2gcn_v  - attributes + attention, plain user-side attention
//   a2gcn    - full model (attribute-aware user attention)
//   bpr_mf   - propagation disabled (raw embedding dot products)
struct VariantConfig {
  bool use_attributes = true;
  bool use_attention = true;
  bool attribute_aware_attention = true;
  bool use_propagation = true;

  void validate() const;
  static VariantConfig preset(const std::string& name);
  std::string preset_name() const;
  bool operator==(const VariantConfig&) const = default;
};

struct ModelConfig {
  VariantConfig variant;
  double leaky_relu_slope = 0.2;
  // Self-connection scores are cos(e, e) = 1 by default; optionally a
  // learned scalar per side.
  bool learned_self_scores = false;
  bool train_attr_embeddings = true;
};

// Embeddings and weight matrices. d' = d: the transform keeps messages in
// the embedding space so the self-message stays additive.
struct ModelParams {
  Tensor E_u, E_v, E_a;   // node embeddings, one row per node
  Tensor W1, W2;          // message transforms
  Tensor W_vu;            // item-side attention transform of user embeddings
  Tensor W_va;            // item-side attention transform of attribute embeddings
  Tensor W_uv;            // user-side attention transform of item embeddings
  Tensor W_a;             // attribute-context transform inside user-side attention
  Tensor self_score_item; // scalar, used when learned_self_scores
  Tensor self_score_user;

  int n_users() const { return static_cast<int>(E_u.rows()); }
  int n_items() const { return static_cast<int>(E_v.rows()); }
  int n_attrs() const { return static_cast<int>(E_a.rows()); }
  int dim() const { return static_cast<int>(E_u.cols()); }

  static ModelParams init(int n_users, int n_items, int n_attrs, int dim, std::uint64_t seed);
  // Fixed serialization/update order.
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
  void check_finite() const;
};

// Training-time view of the graph: nodes with dropped outgoing messages and
// per-message keep flags, aligned with the graph adjacency order.
struct GraphMask {
  std::vector<std::uint8_t> node_kept;      // users, then items, then attrs
  std::vector<std::uint8_t> item_user_msg;  // aligned with item_users, item-major
  std::vector<std::uint8_t> item_attr_msg;
  std::vector<std::uint8_t> user_item_msg;  // aligned with user_items, user-major
  double message_scale = 1.0;               // 1/(1-p) applied to kept messages
};

// Flattened, variant- and mask-filtered edge arrays consumed by the tape
// forward pass. Item-side edges are grouped per item (user edges before
// attribute edges); attribute sources are indexed as n_users + a into the
// stacked [users; attributes] embedding matrix.
struct ForwardPlan {
  int n_users = 0, n_items = 0, n_attrs = 0;
  bool use_attrs = false;
  bool has_dropout = false;

  std::vector<int> item_dst, item_src, item_pos;
  std::vector<std::size_t> item_offsets;
  std::vector<double> item_msg_mult;

  std::vector<int> user_dst, user_src, user_pos;
  std::vector<std::size_t> user_offsets;
  std::vector<double> user_msg_mult;

  // surviving item-attribute edges for attention mean-pooling
  std::vector<int> pool_src;
  std::vector<std::size_t> pool_offsets;
  std::vector<double> pool_weights;

  // uniform attention weights (attention disabled), message mask included
  std::vector<double> item_uniform, user_uniform;
  std::vector<double> item_uniform_self, user_uniform_self;

  static ForwardPlan build(const graph::TripartiteGraph& g, const VariantConfig& variant,
                           const GraphMask* mask = nullptr);
};

struct Propagated {
  Tensor users;
  Tensor items;
};

// --- differentiable pipeline ------------------------------------------------

struct ForwardVars {
  Tape::Id users = -1;  // propagated user embeddings
  Tape::Id items = -1;
  Tape::Id e_u = -1, e_v = -1, e_a = -1;  // embedding leaves
  // attention outputs (flat [edge gammas..., self gammas]), -1 when uniform
  Tape::Id item_gamma = -1, user_gamma = -1;
  std::vector<std::pair<std::string, Tape::Id>> trainable;
};

// Records attention + propagation on the tape. Gradients flow to every
// trainable tensor for the active variant.
ForwardVars build_forward(Tape& tape, const ModelParams& params, const ForwardPlan& plan,
                          const ModelConfig& config);

// One full no-dropout forward pass (evaluation path).
Propagated forward_full(const ModelParams& params, const graph::TripartiteGraph& g,
                        const ModelConfig& config);

// --- spec operation surface --------------------------------------------------

struct NodeAttention {
  std::vector<double> neighbor_w;  // users then attrs for items; items for users
  double self_w = 1.0;
};

// Softmax attention for one item over its users, attributes and self.
NodeAttention item_attention(const ModelParams& params, const graph::TripartiteGraph& g, int v,
                             const ModelConfig& config);
// Softmax attention for one user over its items and self; `attribute_aware`
// augments item embeddings with their mean attribute embedding.
NodeAttention user_attention(const ModelParams& params, const graph::TripartiteGraph& g, int u,
                             bool attribute_aware, const ModelConfig& config);
// All nodes at once (batched transforms, same arithmetic as the per-node ops).
graph::AttentionWeights compute_attention(const ModelParams& params,
                                          const graph::TripartiteGraph& g,
                                          const ModelConfig& config);

// Attention-weighted one-layer message passing with optional dropout mask.
// Provided weights are renormalized over surviving neighbors when a mask
// drops edges.
Propagated propagate(const ModelParams& params, const graph::TripartiteGraph& g,
                     const graph::AttentionWeights& weights, const ModelConfig& config,
                     const GraphMask* mask = nullptr);

// Same propagation expressed through the assembled sparse attention matrix.
Propagated propagate_matrix(const ModelParams& params, const graph::AttentionLaplacian& lap,
                            const ModelConfig& config);

double predict(const Propagated& embeddings, int u, int v);

}  // namespace a2gcn::model
