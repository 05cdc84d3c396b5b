#include "clickgraph/weighting.hpp"

#include <algorithm>
#include <cctype>

namespace clickgraph {

std::string_view model_name(WeightModel model) {
  switch (model) {
    case WeightModel::kUF:
      return "uf";
    case WeightModel::kUFIQF:
      return "uf-iqf";
    case WeightModel::kUFWIQF:
      return "ufw-iqf";
    case WeightModel::kUFWIUF:
      return "ufw-iuf";
  }
  return "?";
}

std::optional<WeightModel> parse_model(std::string_view name) {
  std::string key(name);
  for (auto& c : key) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  for (auto m : kAllModels) {
    if (model_name(m) == key) return m;
  }
  return std::nullopt;
}

std::string valid_model_names() {
  std::string out;
  for (auto m : kAllModels) {
    if (!out.empty()) out += ", ";
    out += model_name(m);
  }
  return out;
}

std::optional<GlobalWeightKind> global_weight_kind(WeightModel model) {
  switch (model) {
    case WeightModel::kUF:
      return std::nullopt;
    case WeightModel::kUFIQF:
    case WeightModel::kUFWIQF:
      return GlobalWeightKind::kIQF;
    case WeightModel::kUFWIUF:
      return GlobalWeightKind::kIUF;
  }
  return std::nullopt;
}

const WeightedGraph<double>& WeightCache::get(WeightModel model) {
  std::lock_guard lock(mutex_);
  auto& slot = cache_[model];
  if (!slot) slot = std::make_unique<WeightedGraph<double>>(weigh_edges<double>(*base_, model, options_, threads_));
  return *slot;
}

}  // namespace clickgraph
