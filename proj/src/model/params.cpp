#include "a2gcn/errors.hpp"
#include "a2gcn/model/model.hpp"
#include "a2gcn/numerics/init.hpp"
#include "a2gcn/numerics/random.hpp"

namespace a2gcn::model {

using numerics::derive_seed;
using numerics::xavier_init;

void VariantConfig::validate() const {
  if (attribute_aware_attention && !(use_attention && use_attributes))
    throw DataError(
        "variant: attribute_aware_attention requires use_attention and use_attributes");
}

VariantConfig VariantConfig::preset(const std::string& name) {
  VariantConfig v;
  if (name == "a2gcn") {
    v = {true, true, true, true};
  } else if (name == "a2gcn_v") {
    v = {true, true, false, true};
  } else if (name == "a_gcn_att") {
    v = {true, false, false, true};
  } else if (name == "a_gcn_am") {
    v = {false, true, false, true};
  } else if (name == "gcn_b") {
    v = {false, false, false, true};
  } else if (name == "bpr_mf") {
    v = {false, false, false, false};
  } else {
    throw DataError("unknown variant preset: " + name);
  }
  return v;
}

std::string VariantConfig::preset_name() const {
  for (const char* name : {"a2gcn", "a2gcn_v", "a_gcn_att", "a_gcn_am", "gcn_b", "bpr_mf"})
    if (*this == preset(name)) return name;
  return "custom";
}

ModelParams ModelParams::init(int n_users, int n_items, int n_attrs, int dim,
                              std::uint64_t seed) {
  if (n_users < 1 || n_items < 1 || n_attrs < 0 || dim < 1)
    throw DataError("ModelParams::init: bad dimensions");
  const auto nu = static_cast<std::size_t>(n_users);
  const auto nv = static_cast<std::size_t>(n_items);
  const auto na = static_cast<std::size_t>(n_attrs);
  const auto d = static_cast<std::size_t>(dim);
  ModelParams p;
  p.E_u = xavier_init(nu, d, derive_seed(seed, 0));
  p.E_v = xavier_init(nv, d, derive_seed(seed, 1));
  p.E_a = xavier_init(na, d, derive_seed(seed, 2));
  p.W1 = xavier_init(d, d, derive_seed(seed, 3));
  p.W2 = xavier_init(d, d, derive_seed(seed, 4));
  p.W_vu = xavier_init(d, d, derive_seed(seed, 5));
  p.W_va = xavier_init(d, d, derive_seed(seed, 6));
  p.W_uv = xavier_init(d, d, derive_seed(seed, 7));
  p.W_a = xavier_init(d, d, derive_seed(seed, 8));
  p.self_score_item = Tensor::scalar(1.0);
  p.self_score_user = Tensor::scalar(1.0);
  return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named_tensors() {
  return {{"E_u", &E_u},   {"E_v", &E_v},   {"E_a", &E_a},
          {"W1", &W1},     {"W2", &W2},     {"W_vu", &W_vu},
          {"W_va", &W_va}, {"W_uv", &W_uv}, {"W_a", &W_a},
          {"self_score_item", &self_score_item},
          {"self_score_user", &self_score_user}};
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named_tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->named_tensors()) out.emplace_back(name, t);
  return out;
}

void ModelParams::check_finite() const {
  for (auto& [name, t] : named_tensors()) t->check_finite(name);
}

}  // namespace a2gcn::model
