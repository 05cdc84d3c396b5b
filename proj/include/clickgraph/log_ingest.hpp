#pragma once

#include <bitset>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace clickgraph {

/// Query normalization and rare-query filtering settings.
struct CleaningConfig {
  std::unordered_set<std::string> stopwords;
  std::uint32_t min_user_clicks_per_query = 4;
  std::bitset<256> punctuation = ascii_punctuation();

  /// Default English stop-word list, threshold 4, ASCII punctuation.
  static CleaningConfig defaults();
  /// Same as defaults() but with no stop words, for deterministic fixtures.
  static CleaningConfig without_stopwords();

  static std::bitset<256> ascii_punctuation();

  /// Throws InvalidArgument when min_user_clicks_per_query is zero.
  void validate() const;
};

const std::vector<std::string>& default_stopwords();

/// One word per line; blank lines and lines starting with '#' are ignored.
/// Words are normalized the same way query tokens are.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

struct ClickRecord {
  std::string user_id;
  std::string query;
  std::string url;

  friend bool operator==(const ClickRecord&, const ClickRecord&) = default;
};

struct IngestStats {
  std::uint64_t total_lines = 0;
  std::uint64_t header_lines = 0;
  std::uint64_t malformed_lines = 0;
  std::uint64_t no_click_lines = 0;
  std::uint64_t empty_query_lines = 0;
  std::uint64_t latin1_lines = 0;
  // Every yielded record is one raw click (the c_ij basis).
  std::uint64_t records = 0;

  IngestStats& operator+=(const IngestStats& other);
  friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

/// Lowercase, turn punctuation into spaces, split on whitespace, drop stop
/// words, and rejoin with single spaces. Idempotent.
std::string normalize_query(std::string_view raw, const CleaningConfig& config);

/// URLs are lowercased and trimmed, otherwise kept verbatim.
std::string normalize_url(std::string_view raw);

using RecordSink = std::function<void(ClickRecord&&)>;

/// Streams a tab-separated AOL-format log (UserID, Query, QueryTime,
/// ItemRank, ClickURL). Malformed and no-click lines are counted and skipped.
/// A header on the first line is detected and skipped.
IngestStats parse_log(std::istream& in, const CleaningConfig& config, const RecordSink& sink);

/// Same as parse_log, reading a plain or gzip-compressed file. Throws IoError
/// with the decompressed byte offset on read failure.
IngestStats parse_log_file(const std::filesystem::path& path, const CleaningConfig& config,
                           const RecordSink& sink);

/// Applies the parsing rules to a single line (without its newline) and
/// updates `stats`. `first_line` enables header detection.
void parse_log_line(std::string_view line, bool first_line, const CleaningConfig& config,
                    IngestStats& stats, const RecordSink& sink);

struct EdgeTriple {
  std::string query;
  std::string url;
  std::uint32_t uf = 0;

  friend bool operator==(const EdgeTriple&, const EdgeTriple&) = default;
  friend auto operator<=>(const EdgeTriple&, const EdgeTriple&) = default;
};

/// Counts distinct users per (query, url). Strings are interned so that a
/// million-record stream stays compact.
class UserFrequencyAccumulator {
 public:
  void add(const ClickRecord& record);
  /// Triples sorted by (query, url).
  std::vector<EdgeTriple> finish() const;
  std::size_t distinct_combinations() const { return seen_.size(); }

 private:
  struct Key {
    std::uint32_t user, query, url;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct PairHash {
    std::size_t operator()(std::uint64_t k) const noexcept;
  };

  std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& table,
                       std::vector<const std::string*>* names, const std::string& s);

  std::unordered_map<std::string, std::uint32_t> users_;
  std::unordered_map<std::string, std::uint32_t> queries_;
  std::unordered_map<std::string, std::uint32_t> urls_;
  std::vector<const std::string*> query_names_;
  std::vector<const std::string*> url_names_;
  std::unordered_set<Key, KeyHash> seen_;
  std::unordered_map<std::uint64_t, std::uint32_t, PairHash> uf_;
};

std::vector<EdgeTriple> dedupe_user_frequency(std::span<const ClickRecord> records);

/// Keeps the queries whose summed uf reaches the threshold. Input order is
/// preserved.
std::vector<EdgeTriple> filter_rare_queries(std::span<const EdgeTriple> triples,
                                            const CleaningConfig& config);

}  // namespace clickgraph
