#include "a2gcn/data/loaders.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "a2gcn/errors.hpp"

namespace a2gcn::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return in;
}

std::string loc(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

class Indexer {
 public:
  int get(const std::string& raw, std::vector<std::string>& ids) {
    auto [it, inserted] = map_.try_emplace(raw, static_cast<int>(ids.size()));
    if (inserted) ids.push_back(raw);
    return it->second;
  }

 private:
  std::unordered_map<std::string, int> map_;
};

std::string json_string_field(const json& j, std::initializer_list<const char*> keys,
                              const std::string& where) {
  for (const char* k : keys) {
    auto it = j.find(k);
    if (it != j.end()) {
      if (it->is_string()) return it->get<std::string>();
      if (it->is_number_integer()) return std::to_string(it->get<long long>());
      throw DataError(where + ": field '" + k + "' is not a string");
    }
  }
  std::string names;
  for (const char* k : keys) names += std::string(names.empty() ? "" : "/") + k;
  throw DataError(where + ": missing field " + names);
}

}  // namespace

InteractionTable load_interactions(const std::string& path, InteractionFormat format) {
  std::ifstream in = open_or_throw(path);
  InteractionTable table;
  Indexer users, items;
  std::unordered_set<std::uint64_t> seen;
  auto add = [&](const std::string& user_raw, const std::string& item_raw) {
    const int u = users.get(user_raw, table.user_ids);
    const int v = items.get(item_raw, table.item_ids);
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
        static_cast<std::uint32_t>(v);
    if (seen.insert(key).second) table.records.push_back({u, v});
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (format == InteractionFormat::Csv) {
      auto fields = split_csv(line);
      if (line_no == 1 && !fields.empty()) {
        const std::string head = lower(fields[0]);
        if (head == "user" || head == "user_id" || head == "reviewerid") continue;
      }
      if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
        throw DataError(loc(path, line_no) + ": expected user,item[,rating,timestamp]");
      add(fields[0], fields[1]);
    } else {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw DataError(loc(path, line_no) + ": invalid JSON object");
      add(json_string_field(j, {"reviewerID", "user_id", "user"}, loc(path, line_no)),
          json_string_field(j, {"asin", "item_id", "item"}, loc(path, line_no)));
    }
  }
  if (table.records.empty()) throw DataError(path + ": no interaction records");
  return table;
}

InteractionTable load_interactions(const std::string& path) {
  const std::string ext = lower(fs::path(path).extension().string());
  const auto format = (ext == ".json" || ext == ".jsonl" || ext == ".ndjson")
                          ? InteractionFormat::JsonLines
                          : InteractionFormat::Csv;
  return load_interactions(path, format);
}

AttributeTable load_attributes(const std::string& path) {
  const std::string ext = lower(fs::path(path).extension().string());
  AttributeTable table;
  if (ext == ".json") {
    std::ifstream in = open_or_throw(path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw DataError(path + ": expected a JSON object of item -> [labels]");
    // nlohmann objects iterate in sorted key order, which keeps the
    // vocabulary deterministic.
    for (const auto& [item, labels] : j.items()) {
      if (!labels.is_array()) throw DataError(path + ": labels of '" + item + "' not an array");
      table.ensure_item(item);
      for (const auto& l : labels) {
        if (!l.is_string()) throw DataError(path + ": non-string label for '" + item + "'");
        table.add(item, l.get<std::string>());
      }
    }
  } else {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      auto fields = split_csv(line);
      if (line_no == 1 && lower(fields[0]) == "item") continue;
      if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
        throw DataError(loc(path, line_no) + ": expected item,label");
      table.add(fields[0], fields[1]);
    }
  }
  return table;
}

namespace {

void write_pairs_csv(const fs::path& path, const std::vector<Interaction>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path.string());
  for (const auto& r : records) out << r.user << "," << r.item << "\n";
}

std::vector<Interaction> read_pairs_csv(const fs::path& path, int n_users, int n_items) {
  std::ifstream in = open_or_throw(path.string());
  std::vector<Interaction> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 2) throw DataError(loc(path.string(), line_no) + ": expected u,v");
    int u = 0, v = 0;
    try {
      u = std::stoi(fields[0]);
      v = std::stoi(fields[1]);
    } catch (const std::exception&) {
      throw DataError(loc(path.string(), line_no) + ": expected integer pair");
    }
    if (u < 0 || u >= n_users || v < 0 || v >= n_items)
      throw DataError(loc(path.string(), line_no) + ": index out of range");
    records.push_back({u, v});
  }
  return records;
}

void write_id_map(const fs::path& path, const std::vector<std::string>& ids) {
  json j = json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) j[ids[i]] = i;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<std::string> read_id_map(const fs::path& path) {
  std::ifstream in = open_or_throw(path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError(path.string() + ": invalid id map");
  std::vector<std::string> ids(j.size());
  for (const auto& [raw, idx] : j.items()) {
    if (!idx.is_number_unsigned() || idx.get<std::size_t>() >= ids.size())
      throw DataError(path.string() + ": bad index for id '" + raw + "'");
    ids[idx.get<std::size_t>()] = raw;
  }
  return ids;
}

}  // namespace

void write_prepared(const std::string& dir, const Split& split, const IndexedAttributes& attrs) {
  fs::create_directories(dir);
  const fs::path base(dir);
  write_pairs_csv(base / "train.csv", split.train.records);
  write_pairs_csv(base / "validation.csv", split.validation.records);
  write_pairs_csv(base / "test.csv", split.test.records);
  write_id_map(base / "user_map.json", split.train.user_ids);
  write_id_map(base / "item_map.json", split.train.item_ids);
  write_id_map(base / "attr_map.json", attrs.labels);
  {
    std::ofstream out(base / "attributes.csv");
    if (!out) throw DataError("cannot write file: " + (base / "attributes.csv").string());
    for (std::size_t v = 0; v < attrs.item_attrs.size(); ++v)
      for (int a : attrs.item_attrs[v]) out << v << "," << a << "\n";
  }
  {
    json meta;
    meta["n_users"] = split.train.n_users();
    meta["n_items"] = split.train.n_items();
    meta["n_attrs"] = attrs.n_attrs();
    meta["n_train"] = split.train.records.size();
    meta["n_validation"] = split.validation.records.size();
    meta["n_test"] = split.test.records.size();
    meta["n_associations"] = attrs.total_associations();
    meta["seed"] = split.seed;
    std::ofstream out(base / "meta.json");
    if (!out) throw DataError("cannot write file: " + (base / "meta.json").string());
    out << meta.dump(2) << "\n";
  }
}

PreparedData load_prepared(const std::string& dir) {
  const fs::path base(dir);
  if (!fs::exists(base / "meta.json"))
    throw DataError(dir + ": not a prepared dataset directory (missing meta.json)");
  std::ifstream meta_in = open_or_throw((base / "meta.json").string());
  json meta = json::parse(meta_in, nullptr, false);
  if (meta.is_discarded()) throw DataError(dir + ": invalid meta.json");

  PreparedData out;
  out.split.seed = meta.value("seed", std::uint64_t{0});
  auto user_ids = read_id_map(base / "user_map.json");
  auto item_ids = read_id_map(base / "item_map.json");
  out.attrs.labels = read_id_map(base / "attr_map.json");
  const int n_users = static_cast<int>(user_ids.size());
  const int n_items = static_cast<int>(item_ids.size());
  for (InteractionTable* t :
       {&out.split.train, &out.split.validation, &out.split.test}) {
    t->user_ids = user_ids;
    t->item_ids = item_ids;
  }
  out.split.train.records = read_pairs_csv(base / "train.csv", n_users, n_items);
  out.split.validation.records = read_pairs_csv(base / "validation.csv", n_users, n_items);
  out.split.test.records = read_pairs_csv(base / "test.csv", n_users, n_items);

  out.attrs.item_attrs.resize(static_cast<std::size_t>(n_items));
  std::ifstream in = open_or_throw((base / "attributes.csv").string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 2)
      throw DataError(loc((base / "attributes.csv").string(), line_no) + ": expected v,a");
    const int v = std::stoi(fields[0]);
    const int a = std::stoi(fields[1]);
    if (v < 0 || v >= n_items || a < 0 || a >= out.attrs.n_attrs())
      throw DataError(loc((base / "attributes.csv").string(), line_no) + ": index out of range");
    out.attrs.item_attrs[static_cast<std::size_t>(v)].push_back(a);
  }
  for (auto& set : out.attrs.item_attrs) std::sort(set.begin(), set.end());
  return out;
}

}  // namespace a2gcn::data
