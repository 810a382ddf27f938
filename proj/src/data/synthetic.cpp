#include "a2gcn/data/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "a2gcn/errors.hpp"
#include "a2gcn/numerics/random.hpp"

namespace a2gcn::data {

using numerics::Rng;

SyntheticData make_planted_dataset(const SyntheticSpec& spec) {
  if (spec.n_items % spec.n_labels != 0)
    throw DataError("make_planted_dataset: n_items must be divisible by n_labels");
  const int per_label = spec.n_items / spec.n_labels;
  if (spec.on_label_positives > per_label)
    throw DataError("make_planted_dataset: not enough items per label");

  SyntheticData out;
  auto user_name = [](int u) { return "u" + std::to_string(u); };
  auto item_name = [](int v) { return "i" + std::to_string(v); };
  for (int u = 0; u < spec.n_users; ++u) out.interactions.user_ids.push_back(user_name(u));
  for (int v = 0; v < spec.n_items; ++v) out.interactions.item_ids.push_back(item_name(v));

  // item v carries label v % n_labels
  for (int v = 0; v < spec.n_items; ++v)
    out.attrs.add(item_name(v), "L" + std::to_string(v % spec.n_labels));

  std::vector<std::vector<int>> label_items(static_cast<std::size_t>(spec.n_labels));
  for (int v = 0; v < spec.n_items; ++v)
    label_items[static_cast<std::size_t>(v % spec.n_labels)].push_back(v);

  Rng rng(spec.seed);
  for (int u = 0; u < spec.n_users; ++u) {
    const int label = u % spec.n_labels;
    std::vector<int> on = label_items[static_cast<std::size_t>(label)];
    rng.shuffle(on);
    std::vector<char> taken(static_cast<std::size_t>(spec.n_items), 0);
    std::vector<int> chosen;
    for (int i = 0; i < spec.on_label_positives; ++i) {
      chosen.push_back(on[static_cast<std::size_t>(i)]);
      taken[static_cast<std::size_t>(on[static_cast<std::size_t>(i)])] = 1;
    }
    int added = 0;
    while (added < spec.off_label_positives) {
      const int v = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.n_items)));
      if (taken[static_cast<std::size_t>(v)] || v % spec.n_labels == label) continue;
      taken[static_cast<std::size_t>(v)] = 1;
      chosen.push_back(v);
      ++added;
    }
    for (int v : chosen) out.interactions.records.push_back({u, v});
  }
  return out;
}

}  // namespace a2gcn::data
