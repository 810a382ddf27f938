#pragma once

#include <cstdint>

#include "a2gcn/data/tables.hpp"

namespace a2gcn::data {

// Planted-preference dataset: every user is assigned one label, every item
// carries exactly one label, and a user's positives come mostly from items
// with its label plus a few random off-label items.
struct SyntheticSpec {
  int n_users = 200;
  int n_items = 100;
  int n_labels = 10;
  int on_label_positives = 8;
  int off_label_positives = 4;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  InteractionTable interactions;
  AttributeTable attrs;
};

SyntheticData make_planted_dataset(const SyntheticSpec& spec);

}  // namespace a2gcn::data
