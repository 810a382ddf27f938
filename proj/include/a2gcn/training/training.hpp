#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "a2gcn/data/tables.hpp"
#include "a2gcn/graph/graph.hpp"
#include "a2gcn/model/model.hpp"

namespace a2gcn::training {

// Hyperparameters. Grids follow the tuning protocol: learning rate in
// {0.1, 0.01, 0.001, 0.0001}, L2 weight on the decade grid 1e-5..1e2,
// dropout ratios in [0, 0.8] with step 0.1, batch size 1024, dimension 64.
struct TrainConfig {
  double learning_rate = 0.001;
  double l2_lambda = 1e-4;
  double message_dropout = 0.0;
  double node_dropout = 0.0;
  int batch_size = 1024;
  int embedding_dim = 64;
  int max_epochs = 400;
  int patience_epochs = 50;
  int checkpoint_every = 10;
  std::uint64_t seed = 2024;
  model::VariantConfig variant;
  double leaky_relu_slope = 0.2;
  bool learned_self_scores = false;
  bool train_attr_embeddings = true;
  int top_n = 20;

  void validate() const;
  model::ModelConfig model_config() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct DropoutSpec {
  double message_drop_ratio = 0.0;
  double node_drop_ratio = 0.0;
  std::uint64_t seed = 0;
};

// Node dropout blocks all outgoing messages of dropped nodes (self-messages
// always survive); message dropout independently zeroes surviving messages
// and rescales the kept ones by 1/(1-p). Applied only during training.
model::GraphMask apply_dropout(const graph::TripartiteGraph& g, const DropoutSpec& spec);

struct TripletBatch {
  std::vector<int> users;
  std::vector<int> pos_items;
  std::vector<int> neg_items;
  std::size_t size() const { return users.size(); }
};

// One triplet per observed train interaction per epoch; negatives drawn
// uniformly from the items the user never interacted with anywhere in the
// full dataset, resampled every epoch.
class TripletSampler {
 public:
  TripletSampler(const data::InteractionTable& train, const data::Split& full, int n_items);

  std::vector<TripletBatch> epoch(std::uint64_t epoch_seed, int batch_size) const;
  std::size_t n_positives() const { return positives_.size(); }

 private:
  std::vector<data::Interaction> positives_;
  std::vector<std::vector<int>> interacted_;  // per user, sorted, full data
  int n_items_;
};

// Mean over the batch of -ln(sigmoid(pos - neg)), plus
// lambda / batch * sum of squared entries of the regularized tensors.
// Throws NumericError on non-finite scores.
model::Tape::Id bpr_loss(model::Tape& tape, model::Tape::Id pos_scores,
                         model::Tape::Id neg_scores,
                         const std::vector<model::Tape::Id>& regularized, double lambda);

struct Checkpoint {
  model::ModelParams params;
  TrainConfig config;
  int epoch = 0;
  double best_val_ndcg = 0.0;
};

// Versioned binary container: "A2GCN" magic, dims, named float32 tensors
// with shape prefixes, config as an embedded JSON blob. Round-trips
// byte-identically.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double val_hr = 0.0;
  double val_ndcg = 0.0;
};

struct FitResult {
  Checkpoint best;
  std::vector<EpochStats> history;
  int best_epoch = 0;
  int stopped_epoch = 0;
  bool diverged = false;
};

struct FitOptions {
  // Directory for periodic checkpoint_latest.bin saves; empty disables them.
  std::string checkpoint_dir;
  // Validation metric override (returns {hr, ndcg}); the default ranks the
  // validation items with train items excluded. Injection point for tests.
  std::function<std::pair<double, double>(const model::ModelParams&, int epoch)> validation_metric;
  std::function<void(const EpochStats&)> on_epoch;
};

// Mini-batch Adam over the BPR objective with per-epoch triplet resampling
// and dropout masks, validation NDCG early stopping, and best-checkpoint
// tracking. Aborts (keeping the last good checkpoint) if the loss diverges.
FitResult fit(const TrainConfig& config, const data::Split& split,
              const data::IndexedAttributes& attrs, const FitOptions& options = {});

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history);

}  // namespace a2gcn::training
