#include "clickgraph/similarity.hpp"

#include <cctype>

namespace clickgraph {

namespace {
constexpr std::array<SimilarityMethod, 4> kAllMethods = {SimilarityMethod::kCosine, SimilarityMethod::kJaccard,
                                                         SimilarityMethod::kJaccardBinary, SimilarityMethod::kPpr};
}

std::string_view method_name(SimilarityMethod method) {
  switch (method) {
    case SimilarityMethod::kCosine:
      return "cosine";
    case SimilarityMethod::kJaccard:
      return "jaccard";
    case SimilarityMethod::kJaccardBinary:
      return "jaccard-binary";
    case SimilarityMethod::kPpr:
      return "ppr";
  }
  return "?";
}

std::optional<SimilarityMethod> parse_method(std::string_view name) {
  std::string key(name);
  for (auto& c : key) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  for (auto m : kAllMethods) {
    if (method_name(m) == key) return m;
  }
  return std::nullopt;
}

std::string valid_method_names() {
  std::string out;
  for (auto m : kAllMethods) {
    if (!out.empty()) out += ", ";
    out += method_name(m);
  }
  return out;
}

}  // namespace clickgraph
