#include "a2gcn/graph/graph.hpp"

#include "a2gcn/errors.hpp"

namespace a2gcn::graph {

std::size_t AttentionLaplacian::nonzeros_with_diag() const {
  std::size_t n = values.size();
  for (double d : diag) n += (d != 0.0) ? 1 : 0;
  return n;
}

AttentionLaplacian assemble_laplacian(const TripartiteGraph& graph,
                                      const AttentionWeights& weights) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw DataError("assemble_laplacian: missing coefficients for " + what);
  };
  const auto nu = static_cast<std::size_t>(graph.n_users);
  const auto nv = static_cast<std::size_t>(graph.n_items);
  check(weights.user_item.size() == nu && weights.user_self.size() == nu, "user rows");
  check(weights.item_user.size() == nv && weights.item_attr.size() == nv &&
            weights.item_self.size() == nv,
        "item rows");
  for (std::size_t u = 0; u < nu; ++u)
    check(weights.user_item[u].size() == graph.user_items[u].size(),
          "user " + std::to_string(u));
  for (std::size_t v = 0; v < nv; ++v) {
    check(weights.item_user[v].size() == graph.item_users[v].size(),
          "item " + std::to_string(v));
    check(weights.item_attr[v].size() == graph.item_attrs[v].size(),
          "item " + std::to_string(v) + " attributes");
  }

  AttentionLaplacian lap;
  lap.n_users = graph.n_users;
  lap.n_items = graph.n_items;
  lap.n_attrs = graph.n_attrs;
  const auto side = static_cast<std::size_t>(lap.side());
  lap.row_offsets.assign(side + 1, 0);
  lap.diag.assign(side, 0.0);

  for (std::size_t u = 0; u < nu; ++u) {
    lap.row_offsets[u + 1] = lap.row_offsets[u] + graph.user_items[u].size();
    lap.diag[u] = weights.user_self[u];
  }
  for (std::size_t v = 0; v < nv; ++v) {
    lap.row_offsets[nu + v + 1] = lap.row_offsets[nu + v] + graph.item_users[v].size() +
                                  graph.item_attrs[v].size();
    lap.diag[nu + v] = weights.item_self[v];
  }
  for (std::size_t a = nu + nv; a < side; ++a) lap.row_offsets[a + 1] = lap.row_offsets[a];

  lap.col_indices.resize(lap.row_offsets.back());
  lap.values.resize(lap.row_offsets.back());
  for (std::size_t u = 0; u < nu; ++u) {
    std::size_t at = lap.row_offsets[u];
    for (std::size_t k = 0; k < graph.user_items[u].size(); ++k, ++at) {
      lap.col_indices[at] = graph.n_users + graph.user_items[u][k];
      lap.values[at] = weights.user_item[u][k];
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    std::size_t at = lap.row_offsets[nu + v];
    for (std::size_t k = 0; k < graph.item_users[v].size(); ++k, ++at) {
      lap.col_indices[at] = graph.item_users[v][k];
      lap.values[at] = weights.item_user[v][k];
    }
    for (std::size_t k = 0; k < graph.item_attrs[v].size(); ++k, ++at) {
      lap.col_indices[at] = graph.n_users + graph.n_items + graph.item_attrs[v][k];
      lap.values[at] = weights.item_attr[v][k];
    }
  }
  return lap;
}

}  // namespace a2gcn::graph
