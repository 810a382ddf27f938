#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace a2gcn::data {

struct Interaction {
  int user = 0;
  int item = 0;
  bool operator==(const Interaction&) const = default;
};

// User-item interaction records with dense indices assigned in first-seen
// order. Ratings, if present in the input, are discarded: interactions are
// implicit positives. No duplicate (user, item) pairs.
struct InteractionTable {
  std::vector<std::string> user_ids;  // dense index -> raw id
  std::vector<std::string> item_ids;
  std::vector<Interaction> records;

  int n_users() const { return static_cast<int>(user_ids.size()); }
  int n_items() const { return static_cast<int>(item_ids.size()); }

  std::vector<int> user_degrees() const;
  std::vector<int> item_degrees() const;
};

// Raw item -> attribute-label associations keyed by raw item id, with a
// first-seen label vocabulary. Items may be absent (no attributes).
struct AttributeTable {
  std::vector<std::string> labels;  // dense label index -> label
  std::unordered_map<std::string, int> label_index;
  // first-seen item order; label index lists are sorted and deduplicated
  std::vector<std::pair<std::string, std::vector<int>>> items;
  std::unordered_map<std::string, std::size_t> item_pos;

  int n_attrs() const { return static_cast<int>(labels.size()); }
  std::size_t total_associations() const;
  // Adds one association, growing the vocabulary as needed.
  void add(const std::string& item, const std::string& label);
  // Registers an item with no associations (explicit empty set).
  void ensure_item(const std::string& item);
};

// Dense item -> attribute sets aligned with an InteractionTable's item
// indices. The vocabulary is compacted to the labels that survive indexing.
struct IndexedAttributes {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> item_attrs;  // per dense item, sorted

  int n_attrs() const { return static_cast<int>(labels.size()); }
  int n_items() const { return static_cast<int>(item_attrs.size()); }
  std::size_t total_associations() const;
  std::size_t items_with_attrs() const;
  bool operator==(const IndexedAttributes&) const = default;
};

struct Split {
  InteractionTable train;
  InteractionTable validation;
  InteractionTable test;
  std::uint64_t seed = 0;
};

// Dense attribute sets for the items of `table`; items not listed in `attrs`
// get empty sets.
IndexedAttributes index_attributes(const AttributeTable& attrs, const InteractionTable& table);

// Maximal subtable where every user and item has >= k interactions
// (iterative removal until fixpoint), reindexed densely. Throws DataError
// with "k-core empty" if nothing survives.
InteractionTable kcore_filter(const InteractionTable& table, int k);

// Per-user random train/test partition (test gets >= 1 interaction), then a
// global `val_fraction_of_train` share of train interactions is moved to the
// validation set without taking any user below 3 remaining train
// interactions. Deterministic given seed.
Split make_split(const InteractionTable& table, double train_ratio, double val_fraction_of_train,
                 std::uint64_t seed);

// Uniformly removes round(ratio * total) item-attribute association edges
// (the label vocabulary is kept). Deterministic given seed.
IndexedAttributes remove_attributes(const IndexedAttributes& attrs, double ratio,
                                    std::uint64_t seed);

// Buckets train users by interaction count into [0,t1), [t1,t2), ...,
// [t_last, inf). Only users with at least one train interaction are grouped.
std::vector<std::vector<int>> group_users_by_sparsity(const InteractionTable& train,
                                                      const std::vector<int>& thresholds);

}  // namespace a2gcn::data
