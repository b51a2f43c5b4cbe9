// Copyright 2026 The paceggm Authors
// SPDX-License-Identifier: Apache-2.0

#include "pace/measurement_store.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace pace {

namespace {

// Union-find with path halving.
int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

MeasurementStore::MeasurementStore(int dim, bool keep_raw_log)
    : dim_(dim), keep_raw_log_(keep_raw_log) {
  if (dim < 1) throw std::invalid_argument("MeasurementStore: dim must be >= 1");
}

void MeasurementStore::record(int j, int k, double z, double sigma2) {
  if (j < 0 || j >= dim_ || k < 0 || k >= dim_) {
    throw std::invalid_argument("MeasurementStore::record: index out of range");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument(
        "MeasurementStore::record: sigma2 must be positive and finite");
  }
  const PairKey key = canonical_pair(j, k);
  PairEstimate& e = entries_[{key.j, key.k}];
  const double precision = 1.0 / sigma2;
  e.y = (e.lambda * e.y + precision * z) / (e.lambda + precision);
  e.lambda += precision;
  if (keep_raw_log_) {
    raw_log_.push_back({key.j, key.k, z, sigma2});
  }
}

bool MeasurementStore::measured(int j, int k) const {
  const PairKey key = canonical_pair(j, k);
  return entries_.contains({key.j, key.k});
}

PairEstimate MeasurementStore::at(int j, int k) const {
  const PairKey key = canonical_pair(j, k);
  auto it = entries_.find({key.j, key.k});
  return it == entries_.end() ? PairEstimate{} : it->second;
}

std::vector<PairKey> MeasurementStore::support() const {
  std::vector<PairKey> out;
  out.reserve(entries_.size());
  for (const auto& [key, e] : entries_) {
    out.push_back({key.first, key.second});
  }
  return out;
}

int MeasurementStore::diagonal_count() const {
  int n = 0;
  for (const auto& [key, e] : entries_) n += (key.first == key.second);
  return n;
}

int MeasurementStore::offdiagonal_count() const {
  return static_cast<int>(entries_.size()) - diagonal_count();
}

std::vector<std::vector<int>> MeasurementStore::connected_components() const {
  std::vector<int> parent(dim_);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& [key, e] : entries_) {
    if (key.first == key.second) continue;
    const int a = find_root(parent, key.first);
    const int b = find_root(parent, key.second);
    if (a != b) parent[a] = b;
  }
  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < dim_; ++v) {
    groups[find_root(parent, v)].push_back(v);
  }
  std::vector<std::vector<int>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) {
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::string MeasurementStore::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [key, e] : entries_) {
    pairs.push_back({{"j", key.first},
                     {"k", key.second},
                     {"y", e.y},
                     {"lambda", e.lambda}});
  }
  nlohmann::json doc{{"d", dim_}, {"pairs", pairs}};
  return doc.dump();
}

}  // namespace pace
