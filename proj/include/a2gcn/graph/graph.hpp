#pragma once

#include <string>
#include <vector>

#include "a2gcn/data/tables.hpp"

namespace a2gcn::graph {

// Users, items and attributes with user-item and item-attribute edges.
// There are no user-attribute edges and no stored self-loops. Adjacency
// lists are sorted, so construction is input-order independent.
struct TripartiteGraph {
  int n_users = 0;
  int n_items = 0;
  int n_attrs = 0;
  std::vector<std::vector<int>> user_items;  // per user: item neighbors
  std::vector<std::vector<int>> item_users;  // per item: user neighbors
  std::vector<std::vector<int>> item_attrs;  // per item: attribute neighbors

  int total_nodes() const { return n_users + n_items + n_attrs; }
  std::size_t n_interaction_edges() const;
  std::size_t n_attribute_edges() const;
};

TripartiteGraph build_graph(const data::InteractionTable& train,
                            const data::IndexedAttributes& attrs);

// Graph without attribute information (user-item edges only).
TripartiteGraph build_graph(const data::InteractionTable& train);

// Debug export, one edge per line: "type_src id_src type_dst id_dst".
void write_edge_list(const TripartiteGraph& graph, const std::string& path);

// Normalized attention coefficients, aligned entry-for-entry with the
// graph adjacency lists. For every node the listed weights plus the self
// weight sum to 1.
struct AttentionWeights {
  std::vector<std::vector<double>> item_user;  // gamma for u in item_users[v]
  std::vector<std::vector<double>> item_attr;  // gamma for a in item_attrs[v]
  std::vector<double> item_self;
  std::vector<std::vector<double>> user_item;  // gamma for v in user_items[u]
  std::vector<double> user_self;
};

// Sparse attention matrix over the stacked (user | item | attribute) index
// space: user rows hold item-column weights, item rows hold user- and
// attribute-column weights, attribute rows are empty. Self weights live on
// a separate diagonal; attribute diagonal entries are 0.
struct AttentionLaplacian {
  int n_users = 0;
  int n_items = 0;
  int n_attrs = 0;
  std::vector<std::size_t> row_offsets;  // side()+1
  std::vector<int> col_indices;
  std::vector<double> values;
  std::vector<double> diag;  // side()

  int side() const { return n_users + n_items + n_attrs; }
  std::size_t nonzeros_with_diag() const;
};

// Throws DataError if the weight lists do not match the graph adjacency.
AttentionLaplacian assemble_laplacian(const TripartiteGraph& graph,
                                      const AttentionWeights& weights);

}  // namespace a2gcn::graph
