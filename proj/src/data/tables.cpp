#include "a2gcn/data/tables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "a2gcn/errors.hpp"
#include "a2gcn/numerics/random.hpp"

namespace a2gcn::data {

using numerics::Rng;
using numerics::derive_seed;

std::vector<int> InteractionTable::user_degrees() const {
  std::vector<int> deg(user_ids.size(), 0);
  for (const auto& r : records) ++deg[static_cast<std::size_t>(r.user)];
  return deg;
}

std::vector<int> InteractionTable::item_degrees() const {
  std::vector<int> deg(item_ids.size(), 0);
  for (const auto& r : records) ++deg[static_cast<std::size_t>(r.item)];
  return deg;
}

std::size_t AttributeTable::total_associations() const {
  std::size_t n = 0;
  for (const auto& [id, labels] : items) n += labels.size();
  return n;
}

void AttributeTable::add(const std::string& item, const std::string& label) {
  auto [lit, lnew] = label_index.try_emplace(label, static_cast<int>(labels.size()));
  if (lnew) labels.push_back(label);
  auto [iit, inew] = item_pos.try_emplace(item, items.size());
  if (inew) items.emplace_back(item, std::vector<int>{});
  std::vector<int>& set = items[iit->second].second;
  auto pos = std::lower_bound(set.begin(), set.end(), lit->second);
  if (pos == set.end() || *pos != lit->second) set.insert(pos, lit->second);
}

void AttributeTable::ensure_item(const std::string& item) {
  auto [it, inserted] = item_pos.try_emplace(item, items.size());
  if (inserted) items.emplace_back(item, std::vector<int>{});
}

std::size_t IndexedAttributes::total_associations() const {
  std::size_t n = 0;
  for (const auto& set : item_attrs) n += set.size();
  return n;
}

std::size_t IndexedAttributes::items_with_attrs() const {
  std::size_t n = 0;
  for (const auto& set : item_attrs) n += set.empty() ? 0 : 1;
  return n;
}

IndexedAttributes index_attributes(const AttributeTable& attrs, const InteractionTable& table) {
  IndexedAttributes out;
  out.item_attrs.resize(table.item_ids.size());
  // Compact the vocabulary to labels attached to surviving items, keeping
  // the original first-seen label order.
  std::vector<int> remap(attrs.labels.size(), -1);
  std::vector<std::vector<int>> old_sets(table.item_ids.size());
  for (std::size_t v = 0; v < table.item_ids.size(); ++v) {
    auto it = attrs.item_pos.find(table.item_ids[v]);
    if (it != attrs.item_pos.end()) old_sets[v] = attrs.items[it->second].second;
  }
  std::vector<char> used(attrs.labels.size(), 0);
  for (const auto& set : old_sets)
    for (int a : set) used[static_cast<std::size_t>(a)] = 1;
  for (std::size_t a = 0; a < used.size(); ++a) {
    if (used[a]) {
      remap[a] = static_cast<int>(out.labels.size());
      out.labels.push_back(attrs.labels[a]);
    }
  }
  for (std::size_t v = 0; v < old_sets.size(); ++v) {
    for (int a : old_sets[v]) out.item_attrs[v].push_back(remap[static_cast<std::size_t>(a)]);
    std::sort(out.item_attrs[v].begin(), out.item_attrs[v].end());
  }
  return out;
}

InteractionTable kcore_filter(const InteractionTable& table, int k) {
  if (k < 1) throw DataError("kcore_filter: k must be >= 1");
  std::vector<char> user_kept(table.user_ids.size(), 1);
  std::vector<char> item_kept(table.item_ids.size(), 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> udeg(table.user_ids.size(), 0), ideg(table.item_ids.size(), 0);
    for (const auto& r : table.records) {
      if (user_kept[static_cast<std::size_t>(r.user)] &&
          item_kept[static_cast<std::size_t>(r.item)]) {
        ++udeg[static_cast<std::size_t>(r.user)];
        ++ideg[static_cast<std::size_t>(r.item)];
      }
    }
    for (std::size_t u = 0; u < user_kept.size(); ++u) {
      if (user_kept[u] && udeg[u] < k) {
        user_kept[u] = 0;
        changed = true;
      }
    }
    for (std::size_t v = 0; v < item_kept.size(); ++v) {
      if (item_kept[v] && ideg[v] < k) {
        item_kept[v] = 0;
        changed = true;
      }
    }
  }
  InteractionTable out;
  std::unordered_map<int, int> umap, vmap;
  for (const auto& r : table.records) {
    if (!user_kept[static_cast<std::size_t>(r.user)] ||
        !item_kept[static_cast<std::size_t>(r.item)])
      continue;
    auto [uit, unew] = umap.try_emplace(r.user, static_cast<int>(out.user_ids.size()));
    if (unew) out.user_ids.push_back(table.user_ids[static_cast<std::size_t>(r.user)]);
    auto [vit, vnew] = vmap.try_emplace(r.item, static_cast<int>(out.item_ids.size()));
    if (vnew) out.item_ids.push_back(table.item_ids[static_cast<std::size_t>(r.item)]);
    out.records.push_back({uit->second, vit->second});
  }
  if (out.records.empty()) throw DataError("k-core empty");
  return out;
}

Split make_split(const InteractionTable& table, double train_ratio,
                 double val_fraction_of_train, std::uint64_t seed) {
  if (train_ratio <= 0.0 || train_ratio >= 1.0)
    throw DataError("make_split: train_ratio must be in (0,1)");
  if (val_fraction_of_train < 0.0 || val_fraction_of_train >= 1.0)
    throw DataError("make_split: val_fraction_of_train must be in [0,1)");

  const std::size_t n_users = table.user_ids.size();
  std::vector<std::vector<std::size_t>> per_user(n_users);
  for (std::size_t i = 0; i < table.records.size(); ++i)
    per_user[static_cast<std::size_t>(table.records[i].user)].push_back(i);

  // 0 = train, 1 = validation, 2 = test
  std::vector<char> part(table.records.size(), 0);
  Rng test_rng(derive_seed(seed, 0));
  std::vector<int> train_count(n_users, 0);
  for (std::size_t u = 0; u < n_users; ++u) {
    auto& recs = per_user[u];
    if (recs.size() < 2)
      throw DataError("make_split: user '" + table.user_ids[u] +
                      "' has fewer than 2 interactions");
    test_rng.shuffle(recs);
    const auto n = static_cast<double>(recs.size());
    std::size_t n_test = static_cast<std::size_t>(
        std::max<long>(1, std::lround((1.0 - train_ratio) * n)));
    if (n_test >= recs.size()) n_test = recs.size() - 1;
    for (std::size_t i = 0; i < n_test; ++i) part[recs[i]] = 2;
    train_count[u] = static_cast<int>(recs.size() - n_test);
  }

  // Move a global share of train interactions into validation, but never
  // below 3 remaining train interactions per user.
  std::vector<std::size_t> train_pool;
  for (std::size_t i = 0; i < part.size(); ++i)
    if (part[i] == 0) train_pool.push_back(i);
  std::size_t quota = static_cast<std::size_t>(
      std::lround(val_fraction_of_train * static_cast<double>(train_pool.size())));
  Rng val_rng(derive_seed(seed, 1));
  val_rng.shuffle(train_pool);
  for (std::size_t i = 0; i < train_pool.size() && quota > 0; ++i) {
    const std::size_t rec = train_pool[i];
    const auto u = static_cast<std::size_t>(table.records[rec].user);
    if (train_count[u] > 3) {
      part[rec] = 1;
      --train_count[u];
      --quota;
    }
  }

  Split split;
  split.seed = seed;
  for (InteractionTable* t : {&split.train, &split.validation, &split.test}) {
    t->user_ids = table.user_ids;
    t->item_ids = table.item_ids;
  }
  for (std::size_t i = 0; i < table.records.size(); ++i) {
    if (part[i] == 0)
      split.train.records.push_back(table.records[i]);
    else if (part[i] == 1)
      split.validation.records.push_back(table.records[i]);
    else
      split.test.records.push_back(table.records[i]);
  }
  return split;
}

IndexedAttributes remove_attributes(const IndexedAttributes& attrs, double ratio,
                                    std::uint64_t seed) {
  if (ratio < 0.0 || ratio > 1.0) throw DataError("remove_attributes: ratio must be in [0,1]");
  const std::size_t total = attrs.total_associations();
  const std::size_t n_remove =
      static_cast<std::size_t>(std::lround(ratio * static_cast<double>(total)));
  if (n_remove == 0) return attrs;

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<char> removed(total, 0);
  for (std::size_t i = 0; i < n_remove; ++i) removed[order[i]] = 1;

  IndexedAttributes out;
  out.labels = attrs.labels;
  out.item_attrs.resize(attrs.item_attrs.size());
  std::size_t edge = 0;
  for (std::size_t v = 0; v < attrs.item_attrs.size(); ++v) {
    for (int a : attrs.item_attrs[v]) {
      if (!removed[edge]) out.item_attrs[v].push_back(a);
      ++edge;
    }
  }
  return out;
}

std::vector<std::vector<int>> group_users_by_sparsity(const InteractionTable& train,
                                                      const std::vector<int>& thresholds) {
  if (thresholds.empty()) throw DataError("group_users_by_sparsity: empty thresholds");
  for (std::size_t i = 0; i + 1 < thresholds.size(); ++i)
    if (thresholds[i] >= thresholds[i + 1])
      throw DataError("group_users_by_sparsity: thresholds must be strictly increasing");

  const std::vector<int> deg = train.user_degrees();
  std::vector<std::vector<int>> groups(thresholds.size() + 1);
  for (std::size_t u = 0; u < deg.size(); ++u) {
    if (deg[u] == 0) continue;
    std::size_t group = thresholds.size();
    for (std::size_t g = 0; g < thresholds.size(); ++g) {
      if (deg[u] < thresholds[g]) {
        group = g;
        break;
      }
    }
    groups[group].push_back(static_cast<int>(u));
  }
  return groups;
}

}  // namespace a2gcn::data
