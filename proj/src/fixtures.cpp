#include "clickgraph/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <tuple>

namespace clickgraph::fixtures {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    for (;;) {
      std::uint64_t x = engine_();
      if (x < limit) return x % bound;
    }
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

constexpr std::array<const char*, 40> kSyllables = {
    "ba", "be", "bi", "bo", "bu", "ka", "ke", "ki", "ko", "ku", "la", "le", "li", "lo", "lu", "ma", "me", "mi", "mo", "mu",
    "na", "ne", "ni", "no", "nu", "ra", "re", "ri", "ro", "ru", "ta", "te", "ti", "to", "tu", "za", "ze", "zi", "zo", "zu"};

std::string make_word(Rng& rng) {
  std::string w;
  const auto syllables = 2 + rng.below(2);
  for (std::uint64_t s = 0; s < syllables; ++s) w += kSyllables[rng.below(kSyllables.size())];
  return w;
}

std::string random_case(Rng& rng, const std::string& s) {
  std::string out = s;
  for (auto& c : out) {
    if (rng.below(5) == 0) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string decorate_query(Rng& rng, const std::string& canonical) {
  static constexpr std::array<const char*, 6> kSeparators = {" ", "  ", " - ", ", ", ". ", "/"};
  std::string out;
  if (rng.below(10) == 0) out += "\"";
  std::size_t start = 0;
  bool first = true;
  for (;;) {
    auto space = canonical.find(' ', start);
    std::string token = canonical.substr(start, space == std::string::npos ? std::string::npos : space - start);
    if (!first) out += kSeparators[rng.below(kSeparators.size())];
    out += random_case(rng, token);
    first = false;
    if (space == std::string::npos) break;
    start = space + 1;
  }
  if (rng.below(8) == 0) out += "?";
  if (rng.below(12) == 0) out = " " + out + " ";
  return out;
}

std::string timestamp(Rng& rng) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "2006-03-%02d %02d:%02d:%02d", static_cast<int>(1 + rng.below(31)),
                static_cast<int>(rng.below(24)), static_cast<int>(rng.below(60)), static_cast<int>(rng.below(60)));
  return buf;
}

}  // namespace

std::vector<EdgeTriple> example_triples() {
  return {{"q1", "d1", 20}, {"q2", "d1", 10}, {"q2", "d2", 10}, {"q3", "d1", 10},
          {"q3", "d3", 2},  {"q4", "d1", 5},  {"q4", "d3", 10}};
}

std::string sample_log() {
  return "AnonID\tQuery\tQueryTime\tItemRank\tClickURL\n"
         "217\tlottery\t2006-03-27 16:34:59\t1\tcalottery.com\n"
         "217\task.com\t2006-03-31 14:31:10\t1\task.com\n"
         "1326\tkonig wheels\t2006-04-18 13:29:52\t2\tkonigwheels.com\n";
}

SyntheticLogTruth generate_synthetic_log(std::ostream& out, const SyntheticLogSpec& spec) {
  Rng rng(spec.seed);

  std::set<std::string> words;
  while (words.size() < std::max<std::uint32_t>(64, spec.queries / 8)) words.insert(make_word(rng));
  const std::vector<std::string> vocab(words.begin(), words.end());

  std::set<std::string> query_set;
  while (query_set.size() < spec.queries) {
    std::string q;
    const auto tokens = 1 + rng.below(4);
    for (std::uint64_t t = 0; t < tokens; ++t) {
      if (t) q += ' ';
      q += vocab[rng.below(vocab.size())];
    }
    query_set.insert(std::move(q));
  }
  std::vector<std::string> queries(query_set.begin(), query_set.end());
  // Shuffle so that popularity is unrelated to lexical order.
  for (std::size_t i = queries.size(); i > 1; --i) std::swap(queries[i - 1], queries[rng.below(i)]);

  std::vector<std::string> urls(spec.urls);
  for (std::uint32_t d = 0; d < spec.urls; ++d) {
    urls[d] = "www." + vocab[d % vocab.size()] + std::to_string(d) + ".com";
  }
  std::vector<std::vector<std::uint32_t>> home(spec.queries);
  for (auto& h : home) {
    const auto n = 1 + rng.below(3);
    for (std::uint64_t k = 0; k < n; ++k) h.push_back(static_cast<std::uint32_t>(rng.below(spec.urls)));
  }

  SyntheticLogTruth truth;
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> seen;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> uf;

  std::uint64_t line = 0;
  if (spec.header && spec.lines > 0) {
    out << "AnonID\tQuery\tQueryTime\tItemRank\tClickURL\n";
    ++truth.stats.header_lines;
    ++line;
  }
  for (; line < spec.lines; ++line) {
    ++truth.stats.total_lines;
    const auto user = static_cast<std::uint32_t>(std::pow(rng.unit(), 2.0) * spec.users);
    const auto q = static_cast<std::uint32_t>(std::pow(rng.unit(), 3.0) * spec.queries);
    const double r = rng.unit();
    const std::string uid = std::to_string(100000 + user);

    if (r < spec.malformed_fraction) {
      ++truth.stats.malformed_lines;
      if (rng.below(2) == 0) {
        out << uid << '\t' << queries[q] << '\t' << timestamp(rng) << '\n';
      } else {
        out << uid << '\t' << queries[q] << '\t' << timestamp(rng) << "\t1\tx.com\textra\n";
      }
      continue;
    }
    if (r < spec.malformed_fraction + spec.no_click_fraction) {
      ++truth.stats.no_click_lines;
      out << uid << '\t' << decorate_query(rng, queries[q]) << '\t' << timestamp(rng) << "\t\t\n";
      continue;
    }
    const auto& h = home[q];
    const auto d = rng.below(10) == 0 ? static_cast<std::uint32_t>(rng.below(spec.urls))
                                      : h[rng.below(h.size())];
    const std::string rank = std::to_string(1 + rng.below(10));
    if (r < spec.malformed_fraction + spec.no_click_fraction + spec.empty_query_fraction) {
      ++truth.stats.empty_query_lines;
      out << uid << "\t?! ...\t" << timestamp(rng) << '\t' << rank << '\t' << urls[d] << '\n';
      continue;
    }
    ++truth.stats.records;
    out << uid << '\t' << decorate_query(rng, queries[q]) << '\t' << timestamp(rng) << '\t' << rank << '\t'
        << random_case(rng, urls[d]) << '\n';
    if (seen.emplace(user, q, d).second) ++uf[{q, d}];
  }
  truth.stats.total_lines += truth.stats.header_lines;

  truth.distinct_combinations = seen.size();
  truth.deduped_edges = uf.size();
  std::map<std::uint32_t, std::uint64_t> per_query;
  for (const auto& [edge, count] : uf) {
    truth.deduped_total_uf += count;
    per_query[edge.first] += count;
  }
  std::set<std::uint32_t> kept_urls;
  for (const auto& [edge, count] : uf) {
    if (per_query[edge.first] < spec.min_user_clicks_per_query) continue;
    ++truth.filtered_edges;
    truth.filtered_total_uf += count;
    kept_urls.insert(edge.second);
  }
  for (const auto& [query, total] : per_query) {
    if (total >= spec.min_user_clicks_per_query) ++truth.filtered_queries;
  }
  truth.filtered_urls = kept_urls.size();
  return truth;
}

MiniCorpus mini_corpus() {
  MiniCorpus corpus;
  corpus.edges = {
      {"haiti", "www.haiti.com", 10},
      {"haiti", "www.wikipedia.org", 4},
      {"haiti", "www.cia.gov", 3},
      {"haiti news", "www.haiti.com", 3},
      {"haiti news", "www.haitinews.net", 6},
      {"metropole haiti news", "www.haitinews.net", 2},
      {"metropole haiti news", "www.metropolehaiti.com", 5},
      {"haiti history", "www.haiti.com", 2},
      {"haiti history", "www.haitihistory.org", 4},
      {"haiti history", "www.wikipedia.org", 2},
      {"port au prince", "www.haiti.com", 2},
      {"port au prince", "www.haitinews.net", 2},
      {"port au prince", "www.wikipedia.org", 1},
      {"haiti earthquake", "www.haitinews.net", 4},
      {"haiti earthquake", "www.redcross.org", 5},
      {"cia world factbook", "www.cia.gov", 12},
      {"cia world factbook", "www.wikipedia.org", 2},
      {"madagascar country", "www.cia.gov", 3},
      {"madagascar country", "www.wikipedia.org", 3},
      {"djibouti", "www.cia.gov", 4},
      {"djibouti", "www.wikipedia.org", 2},
      {"wikipedia", "www.wikipedia.org", 30},
      {"satire", "www.wikipedia.org", 3},
      {"satire", "www.theonion.com", 8},
      {"shiny cowbird", "www.wikipedia.org", 2},
      {"shiny cowbird", "www.birds.cornell.edu", 3},
      {"shiny cowbird", "www.floridabirds.org", 2},
      {"yellow breasted bird florida", "www.floridabirds.org", 5},
      {"yellow breasted bird florida", "www.birds.cornell.edu", 1},
      {"yellow finches map", "www.floridabirds.org", 2},
      {"yellow finches map", "www.birdmaps.com", 4},
      {"red throated bird", "www.birds.cornell.edu", 4},
      {"red throated bird", "www.birdmaps.com", 1},
      {"graylag geese breeder", "www.birds.cornell.edu", 1},
      {"graylag geese breeder", "www.geesebreeders.com", 5},
      {"bird watching", "www.birds.cornell.edu", 6},
      {"bird watching", "www.audubon.org", 6},
      {"weather", "www.weather.com", 25},
      {"weather", "weather.noaa.gov", 8},
      {"weather forecast", "www.weather.com", 9},
      {"noaa weather radar", "weather.noaa.gov", 7},
      {"noaa weather radar", "www.weather.com", 2},
  };
  corpus.catalog_tsv =
      "haiti\tRegional > Caribbean > Haiti > Guides-and-Directories\n"
      "haiti news\tRegional > Caribbean > Haiti > News-and-Media\n"
      "metropole haiti news\tRegional > Caribbean > Haiti > News-and-Media > Newspapers\n"
      "haiti history\tSociety > History > By-Region > Caribbean > Haiti\n"
      "port au prince\tRegional > Caribbean > Haiti > Localities > Port-au-Prince\n"
      "haiti earthquake\tSociety > Issues > Disasters | Regional > Caribbean > Haiti > News-and-Media\n"
      "cia world factbook\tReference > Almanacs > World-Factbook\n"
      "madagascar country\tRegional > Africa > Madagascar\n"
      "djibouti\tRegional > Africa > Djibouti\n"
      "wikipedia\tReference > Encyclopedias\n"
      "satire\tArts > Humor > Satire\n"
      "shiny cowbird\tScience > Biology > Animals > Birds > Passeriformes\n"
      "yellow breasted bird florida\tScience > Biology > Animals > Birds > Regional > Florida\n"
      "yellow finches map\tScience > Biology > Animals > Birds > Passeriformes > Finches\n"
      "red throated bird\tScience > Biology > Animals > Birds\n"
      "graylag geese breeder\tRecreation > Pets > Birds > Waterfowl | Science > Biology > Animals > Birds > Anseriformes\n"
      "bird watching\tRecreation > Birding\n"
      "weather\tNews > Weather\n"
      "weather forecast\tNews > Weather > Forecasts\n"
      "noaa weather radar\tScience > Earth-Sciences > Atmospheric-Sciences > Meteorology | News > Weather > Radar\n";
  return corpus;
}

std::vector<Point> power_law_points(double amplitude, double exponent, int max_x) {
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(std::max(0, max_x)));
  for (int x = 1; x <= max_x; ++x) points.push_back({double(x), amplitude * std::pow(double(x), -exponent)});
  return points;
}

}  // namespace clickgraph::fixtures
