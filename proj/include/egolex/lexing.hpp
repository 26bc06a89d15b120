#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "egolex/corpus.hpp"
#include "egolex/parallel.hpp"

namespace egolex::lex {

using StopwordSet = std::unordered_set<std::string>;
using LemmaTable = std::unordered_map<std::string, std::string>;

struct Lexicon {
  StopwordSet stopwords;
  LemmaTable lemmas;
};

/// One token per line, lowercased on load.
StopwordSet load_stopwords(const std::filesystem::path& path);
/// `surface<TAB>lemma` per line; blank lines and lines starting with '#' are skipped.
LemmaTable load_lemma_table(const std::filesystem::path& path);
Lexicon load_lexicon(const std::filesystem::path& stopwords, const std::filesystem::path& lemmas);

/// Whitespace split; drops mentions, hashtags, URLs and pure emoji/symbol
/// tokens; strips leading/trailing non-alphanumerics; lowercases.
std::vector<std::string> tokenize(std::string_view text);

/// Removes stopwords and maps survivors through the lemma table (identity
/// when absent). A token whose lemma is itself a stopword is removed too.
std::vector<std::string> normalize(const std::vector<std::string>& tokens, const StopwordSet& stopwords,
                                   const LemmaTable& lemmas);

std::vector<std::string> lemmatize_text(std::string_view text, const Lexicon& lex);

struct WordOccurrence {
  std::string lemma;
  std::string tweet_id;
};

struct WordCounts {
  std::string user_id;
  std::vector<WordOccurrence> occurrences;  // tweet order, then token order
  std::map<std::string, std::int64_t> counts;
  double window_years = 1.0;

  bool empty() const { return counts.empty(); }
  std::int64_t total_occurrences() const;
  /// n / T for one lemma.
  double frequency(const std::string& lemma) const;
};

/// Aggregates lemma occurrences over an ego's tweets and removes hapaxes.
/// An ego left with no lemma yields an empty WordCounts.
WordCounts count_words(const corpus::Ego& ego, const Lexicon& lex, double t_years);

/// count_words for every ego, in dataset order.
std::vector<WordCounts> count_all(const corpus::Dataset& ds, const Lexicon& lex, double t_years,
                                  Exec exec = Exec::parallel);

/// Lemma list of every tweet in the dataset (no hapax removal), keyed by tweet id.
std::unordered_map<std::string, std::vector<std::string>> tweet_lemmas(const corpus::Dataset& ds,
                                                                       const Lexicon& lex);

}  // namespace egolex::lex
