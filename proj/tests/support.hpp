#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "egolex/lexing.hpp"
#include "egolex/nullmodel.hpp"
#include "egolex/timeutil.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return EGOLEX_DATA_DIR; }

// Fresh directory under the system temp dir, unique per name.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("egolex_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string tweet_json(const std::string& id, const std::string& user, const std::string& when,
                              const std::string& text = "hello world", const std::string& lang = "en",
                              bool retweet = false, double cap = -1.0) {
  std::string s = fmt::format(R"({{"tweet_id":"{}","user_id":"{}","created_at":"{}","text":"{}","lang":"{}","is_retweet":{})",
                              id, user, when, text, lang, retweet ? "true" : "false");
  if (cap >= 0.0) s += fmt::format(R"(,"cap":{})", cap);
  return s + "}\n";
}

// Deterministic generator for property tests.
struct Gen {
  egolex::nullmodel::Rng rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform() { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng.below(n)); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  }
};

inline egolex::lex::WordCounts word_counts(const std::string& user,
                                           const std::vector<std::pair<std::string, std::int64_t>>& counts,
                                           double t_years = 1.0) {
  egolex::lex::WordCounts wc;
  wc.user_id = user;
  wc.window_years = t_years;
  int tweet = 0;
  for (const auto& [lemma, n] : counts) {
    wc.counts[lemma] = n;
    for (std::int64_t i = 0; i < n; ++i) wc.occurrences.push_back({lemma, fmt::format("{}-t{}", user, tweet++)});
  }
  return wc;
}

// Occurrence-weighted mixture of word distributions over the original ring,
// written out longhand: sum o(w) P_w(c) / sum o(w).
inline egolex::topics::SemanticProfile weighted_ring_profile(const egolex::egonet::EgoNetwork& ego, std::size_t ring,
                                                             const egolex::nullmodel::WordDists& dists) {
  std::map<egolex::topics::TopicId, double> acc;
  double weight = 0.0;
  for (const auto& w : ego.ring(ring)) {
    auto it = dists.find(w.lemma);
    if (it == dists.end()) continue;
    const auto o = static_cast<double>(w.count);
    weight += o;
    for (const auto& [c, p] : it->second.dist) acc[c] += o * p;
  }
  egolex::topics::SemanticProfile prof;
  for (const auto& [c, m] : acc) {
    if (m > 0.0) prof.shares[c] = m / weight;
  }
  return prof;
}

}  // namespace testing
