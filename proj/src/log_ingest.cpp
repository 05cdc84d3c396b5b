#include "clickgraph/log_ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "clickgraph/error.hpp"

namespace clickgraph {

namespace {

constexpr std::size_t kFieldCount = 5;

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::string latin1_to_utf8(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  for (unsigned char c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::bitset<256> CleaningConfig::ascii_punctuation() {
  std::bitset<256> set;
  for (int c = 0; c < 128; ++c) {
    if (std::ispunct(c)) set.set(static_cast<std::size_t>(c));
  }
  return set;
}

CleaningConfig CleaningConfig::defaults() {
  CleaningConfig config;
  const auto& words = default_stopwords();
  config.stopwords.insert(words.begin(), words.end());
  return config;
}

CleaningConfig CleaningConfig::without_stopwords() { return CleaningConfig{}; }

void CleaningConfig::validate() const {
  if (min_user_clicks_per_query < 1) {
    throw InvalidArgument("min_user_clicks_per_query must be >= 1");
  }
}

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      "a",    "about", "an",   "and",  "are",  "as",   "at",    "be",   "but",   "by",
      "for",  "from",  "how",  "i",    "in",   "is",   "it",    "of",   "on",    "or",
      "that", "the",   "this", "to",   "was",  "what", "when",  "where", "which", "who",
      "will", "with",  "you",  "your", "can",  "do",   "does",  "my",   "we",    "s"};
  return words;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stop-word file " + path.string());
  CleaningConfig plain;
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::string word = normalize_query(view, plain);
    // Entries that split into several tokens could never match a single
    // query token, so they are ignored.
    if (!word.empty() && word.find(' ') == std::string::npos) words.insert(std::move(word));
  }
  if (in.bad()) throw IoError("read failure in stop-word file " + path.string());
  return words;
}

IngestStats& IngestStats::operator+=(const IngestStats& other) {
  total_lines += other.total_lines;
  header_lines += other.header_lines;
  malformed_lines += other.malformed_lines;
  no_click_lines += other.no_click_lines;
  empty_query_lines += other.empty_query_lines;
  latin1_lines += other.latin1_lines;
  records += other.records;
  return *this;
}

std::string normalize_query(std::string_view raw, const CleaningConfig& config) {
  std::string out;
  out.reserve(raw.size());
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (!config.stopwords.contains(token)) {
      if (!out.empty()) out.push_back(' ');
      out += token;
    }
    token.clear();
  };
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (config.punctuation.test(c) || is_space(c)) {
      flush();
    } else {
      token.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

std::string normalize_url(std::string_view raw) {
  std::string_view view = trim(raw);
  std::string out(view);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

void parse_log_line(std::string_view line, bool first_line, const CleaningConfig& config,
                    IngestStats& stats, const RecordSink& sink) {
  ++stats.total_lines;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  std::array<std::string_view, kFieldCount> fields;
  std::size_t count = 0;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    std::string_view field = line.substr(start, tab == std::string_view::npos ? line.size() - start : tab - start);
    if (count < kFieldCount) fields[count] = field;
    ++count;
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (count != kFieldCount) {
    ++stats.malformed_lines;
    return;
  }

  const std::string_view rank = trim(fields[3]);
  if (!rank.empty() && !all_digits(rank)) {
    if (first_line) {
      ++stats.header_lines;
    } else {
      ++stats.malformed_lines;
    }
    return;
  }
  const std::string_view user = trim(fields[0]);
  if (user.empty()) {
    ++stats.malformed_lines;
    return;
  }

  std::string url = normalize_url(fields[4]);
  if (url.empty()) {
    ++stats.no_click_lines;
    return;
  }

  std::string query;
  if (valid_utf8(fields[1])) {
    query = normalize_query(fields[1], config);
  } else {
    ++stats.latin1_lines;
    query = normalize_query(latin1_to_utf8(fields[1]), config);
    if (!valid_utf8(url)) url = latin1_to_utf8(url);
  }
  if (query.empty()) {
    ++stats.empty_query_lines;
    return;
  }

  ++stats.records;
  sink(ClickRecord{std::string(user), std::move(query), std::move(url)});
}

IngestStats parse_log(std::istream& in, const CleaningConfig& config, const RecordSink& sink) {
  config.validate();
  IngestStats stats;
  std::string line;
  std::uint64_t offset = 0;
  bool first = true;
  while (std::getline(in, line)) {
    parse_log_line(line, first, config, stats, sink);
    first = false;
    offset += line.size() + 1;
  }
  if (in.bad()) throw IoError("read failure in log stream", offset);
  return stats;
}

IngestStats parse_log_file(const std::filesystem::path& path, const CleaningConfig& config,
                           const RecordSink& sink) {
  config.validate();
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw IoError("cannot open log file " + path.string(), 0);
  struct Closer {
    gzFile f;
    ~Closer() { gzclose(f); }
  } closer{file};
  gzbuffer(file, 1 << 17);

  IngestStats stats;
  std::vector<char> buffer(1 << 16);
  std::string pending;
  std::uint64_t offset = 0;
  bool first = true;
  for (;;) {
    int n = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()));
    if (n < 0) {
      int code = 0;
      const char* msg = gzerror(file, &code);
      throw IoError("read failure in " + path.string() + ": " + (msg ? msg : "unknown"), offset);
    }
    if (n == 0) break;
    offset += static_cast<std::uint64_t>(n);
    std::string_view chunk(buffer.data(), static_cast<std::size_t>(n));
    std::size_t pos = 0;
    for (;;) {
      std::size_t nl = chunk.find('\n', pos);
      if (nl == std::string_view::npos) {
        pending.append(chunk.substr(pos));
        break;
      }
      if (pending.empty()) {
        parse_log_line(chunk.substr(pos, nl - pos), first, config, stats, sink);
      } else {
        pending.append(chunk.substr(pos, nl - pos));
        parse_log_line(pending, first, config, stats, sink);
        pending.clear();
      }
      first = false;
      pos = nl + 1;
    }
  }
  if (!pending.empty()) parse_log_line(pending, first, config, stats, sink);
  return stats;
}

std::size_t UserFrequencyAccumulator::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = mix64((static_cast<std::uint64_t>(k.user) << 32) | k.query);
  return static_cast<std::size_t>(mix64(h ^ k.url));
}

std::size_t UserFrequencyAccumulator::PairHash::operator()(std::uint64_t k) const noexcept {
  return static_cast<std::size_t>(mix64(k));
}

std::uint32_t UserFrequencyAccumulator::intern(std::unordered_map<std::string, std::uint32_t>& table,
                                               std::vector<const std::string*>* names,
                                               const std::string& s) {
  auto [it, inserted] = table.try_emplace(s, static_cast<std::uint32_t>(table.size()));
  if (inserted && names != nullptr) names->push_back(&it->first);
  return it->second;
}

void UserFrequencyAccumulator::add(const ClickRecord& record) {
  Key key{intern(users_, nullptr, record.user_id), intern(queries_, &query_names_, record.query),
          intern(urls_, &url_names_, record.url)};
  if (seen_.insert(key).second) {
    ++uf_[(static_cast<std::uint64_t>(key.query) << 32) | key.url];
  }
}

std::vector<EdgeTriple> UserFrequencyAccumulator::finish() const {
  std::vector<EdgeTriple> triples;
  triples.reserve(uf_.size());
  for (const auto& [pair, count] : uf_) {
    triples.push_back(EdgeTriple{*query_names_[pair >> 32], *url_names_[pair & 0xffffffffULL], count});
  }
  std::sort(triples.begin(), triples.end());
  return triples;
}

std::vector<EdgeTriple> dedupe_user_frequency(std::span<const ClickRecord> records) {
  UserFrequencyAccumulator acc;
  for (const auto& r : records) acc.add(r);
  return acc.finish();
}

std::vector<EdgeTriple> filter_rare_queries(std::span<const EdgeTriple> triples,
                                            const CleaningConfig& config) {
  config.validate();
  std::unordered_map<std::string_view, std::uint64_t> totals;
  for (const auto& t : triples) totals[t.query] += t.uf;
  std::vector<EdgeTriple> kept;
  kept.reserve(triples.size());
  for (const auto& t : triples) {
    if (totals[t.query] >= config.min_user_clicks_per_query) kept.push_back(t);
  }
  return kept;
}

}  // namespace clickgraph
