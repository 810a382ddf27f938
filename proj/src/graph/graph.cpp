#include "a2gcn/graph/graph.hpp"

#include <algorithm>
#include <fstream>

#include "a2gcn/errors.hpp"

namespace a2gcn::graph {

std::size_t TripartiteGraph::n_interaction_edges() const {
  std::size_t n = 0;
  for (const auto& v : user_items) n += v.size();
  return n;
}

std::size_t TripartiteGraph::n_attribute_edges() const {
  std::size_t n = 0;
  for (const auto& v : item_attrs) n += v.size();
  return n;
}

TripartiteGraph build_graph(const data::InteractionTable& train,
                            const data::IndexedAttributes& attrs) {
  TripartiteGraph g = build_graph(train);
  if (attrs.item_attrs.size() != static_cast<std::size_t>(g.n_items))
    throw DataError("build_graph: attribute table covers " +
                    std::to_string(attrs.item_attrs.size()) + " items, interaction table has " +
                    std::to_string(g.n_items));
  g.n_attrs = attrs.n_attrs();
  g.item_attrs = attrs.item_attrs;
  for (auto& set : g.item_attrs) {
    std::sort(set.begin(), set.end());
    for (int a : set)
      if (a < 0 || a >= g.n_attrs) throw DataError("build_graph: attribute index out of range");
  }
  return g;
}

TripartiteGraph build_graph(const data::InteractionTable& train) {
  TripartiteGraph g;
  g.n_users = train.n_users();
  g.n_items = train.n_items();
  g.n_attrs = 0;
  g.user_items.resize(static_cast<std::size_t>(g.n_users));
  g.item_users.resize(static_cast<std::size_t>(g.n_items));
  g.item_attrs.resize(static_cast<std::size_t>(g.n_items));
  for (const auto& r : train.records) {
    if (r.user < 0 || r.user >= g.n_users || r.item < 0 || r.item >= g.n_items)
      throw DataError("build_graph: interaction index out of range");
    g.user_items[static_cast<std::size_t>(r.user)].push_back(r.item);
    g.item_users[static_cast<std::size_t>(r.item)].push_back(r.user);
  }
  for (auto& v : g.user_items) std::sort(v.begin(), v.end());
  for (auto& v : g.item_users) std::sort(v.begin(), v.end());
  return g;
}

void write_edge_list(const TripartiteGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (int u = 0; u < graph.n_users; ++u)
    for (int v : graph.user_items[static_cast<std::size_t>(u)])
      out << "u " << u << " v " << v << "\n";
  for (int v = 0; v < graph.n_items; ++v)
    for (int a : graph.item_attrs[static_cast<std::size_t>(v)])
      out << "v " << v << " a " << a << "\n";
}

}  // namespace a2gcn::graph
