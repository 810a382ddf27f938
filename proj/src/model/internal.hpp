#pragma once

#include "a2gcn/model/model.hpp"

namespace a2gcn::model::detail {

// One aggregation side of the propagation layer:
//   LeakyReLU(W1 (agg + gamma_self * self) + W2 (agg (.) self))
// where agg sums gamma-weighted source rows per destination segment.
inline Tape::Id aggregate_side(Tape& tape, const ModelConfig& config, Tape::Id self_emb,
                               Tape::Id src_emb, const std::vector<int>& src,
                               const std::vector<std::size_t>& offsets, Tape::Id gamma_edges,
                               Tape::Id gamma_self, Tape::Id w1, Tape::Id w2) {
  Tape::Id agg =
      tape.segment_sum(tape.scale_rows(tape.gather_rows(src_emb, src), gamma_edges), offsets);
  Tape::Id self_msg = tape.scale_rows(self_emb, gamma_self);
  Tape::Id linear = tape.matmul(tape.add(agg, self_msg), w1, false, true);
  Tape::Id interact = tape.matmul(tape.elementwise_mul(agg, self_emb), w2, false, true);
  return tape.leaky_relu(tape.add(linear, interact), config.leaky_relu_slope);
}

}  // namespace a2gcn::model::detail
