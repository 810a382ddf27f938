#pragma once

#include <string>

#include "a2gcn/data/tables.hpp"

namespace a2gcn::data {

enum class InteractionFormat { Csv, JsonLines };

// CSV columns: user,item[,rating,timestamp] (optional header row), or
// JSON-lines with Amazon-style {"reviewerID": ..., "asin": ...} records.
// Dense ids are assigned in first-seen order; duplicate (user, item) pairs
// collapse to the first record.
InteractionTable load_interactions(const std::string& path, InteractionFormat format);

// Picks the format from the file extension (.json/.jsonl -> JSON lines).
InteractionTable load_interactions(const std::string& path);

// CSV rows item,label (optional header) or a JSON object mapping item id to
// an array of labels.
AttributeTable load_attributes(const std::string& path);

// Prepared dataset directory: integer-pair CSVs plus raw-id -> dense-index
// JSON maps as written by the prepare command.
struct PreparedData {
  Split split;
  IndexedAttributes attrs;
};

void write_prepared(const std::string& dir, const Split& split, const IndexedAttributes& attrs);
PreparedData load_prepared(const std::string& dir);

}  // namespace a2gcn::data
