#include "egolex/lexing.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "egolex/error.hpp"
#include "egolex/unicode.hpp"

namespace egolex::lex {
namespace {

bool starts_with_url(std::string_view tok) {
  auto lower_prefix = [&](std::string_view p) {
    if (tok.size() < p.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      char c = tok[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
      if (c != p[i]) return false;
    }
    return true;
  };
  return lower_prefix("http://") || lower_prefix("https://") || lower_prefix("www.");
}

std::string strip_line(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
    line.pop_back();
  }
  std::size_t start = 0;
  while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
  return line.substr(start);
}

}  // namespace

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open stopwords '{}'", path.string()));
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_line(std::move(line));
    if (line.empty()) continue;
    auto cps = unicode::decode(line);
    for (auto& cp : cps) cp = unicode::to_lower(cp);
    out.insert(unicode::encode(cps));
  }
  return out;
}

LemmaTable load_lemma_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open lemma table '{}'", path.string()));
  LemmaTable out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw DataError(fmt::format("{}:{}: expected 'surface<TAB>lemma'", path.string(), line_no));
    }
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

Lexicon load_lexicon(const std::filesystem::path& stopwords, const std::filesystem::path& lemmas) {
  return Lexicon{load_stopwords(stopwords), load_lemma_table(lemmas)};
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  const std::u32string cps = unicode::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && unicode::is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !unicode::is_space(cps[j])) ++j;
    if (j > i) {
      std::u32string_view tok(cps.data() + i, j - i);
      const bool social = tok.front() == U'@' || tok.front() == U'#';
      const bool all_symbols = std::all_of(tok.begin(), tok.end(), unicode::is_emoji_or_symbol);
      const bool url = !social && starts_with_url(unicode::encode(tok.substr(0, 8)));
      if (!social && !all_symbols && !url) {
        std::size_t b = 0;
        std::size_t e = tok.size();
        while (b < e && !unicode::is_alnum(tok[b])) ++b;
        while (e > b && !unicode::is_alnum(tok[e - 1])) --e;
        if (e > b) {
          std::u32string word(tok.substr(b, e - b));
          for (auto& cp : word) cp = unicode::to_lower(cp);
          out.push_back(unicode::encode(word));
        }
      }
    }
    i = j;
  }
  return out;
}

std::vector<std::string> normalize(const std::vector<std::string>& tokens, const StopwordSet& stopwords,
                                   const LemmaTable& lemmas) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (stopwords.contains(tok)) continue;
    auto it = lemmas.find(tok);
    const std::string& lemma = it == lemmas.end() ? tok : it->second;
    if (lemma.empty() || stopwords.contains(lemma)) continue;
    out.push_back(lemma);
  }
  return out;
}

std::vector<std::string> lemmatize_text(std::string_view text, const Lexicon& lex) {
  return normalize(tokenize(text), lex.stopwords, lex.lemmas);
}

std::int64_t WordCounts::total_occurrences() const {
  std::int64_t n = 0;
  for (const auto& [_, c] : counts) n += c;
  return n;
}

double WordCounts::frequency(const std::string& lemma) const {
  auto it = counts.find(lemma);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / window_years;
}

WordCounts count_words(const corpus::Ego& ego, const Lexicon& lex, double t_years) {
  WordCounts wc;
  wc.user_id = ego.user_id;
  wc.window_years = t_years;
  std::vector<WordOccurrence> all;
  for (const auto& tweet : ego.tweets) {
    for (auto& lemma : lemmatize_text(tweet.text, lex)) {
      ++wc.counts[lemma];
      all.push_back({std::move(lemma), tweet.tweet_id});
    }
  }
  std::erase_if(wc.counts, [](const auto& kv) { return kv.second < 2; });
  wc.occurrences.reserve(all.size());
  for (auto& occ : all) {
    if (wc.counts.contains(occ.lemma)) wc.occurrences.push_back(std::move(occ));
  }
  return wc;
}

std::vector<WordCounts> count_all(const corpus::Dataset& ds, const Lexicon& lex, double t_years,
                                  Exec exec) {
  std::vector<WordCounts> out(ds.egos.size());
  const auto n = static_cast<std::ptrdiff_t>(ds.egos.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = count_words(ds.egos[i], lex, t_years);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = count_words(ds.egos[i], lex, t_years);
  }
  return out;
}

std::unordered_map<std::string, std::vector<std::string>> tweet_lemmas(const corpus::Dataset& ds,
                                                                       const Lexicon& lex) {
  std::unordered_map<std::string, std::vector<std::string>> out;
  for (const auto& ego : ds.egos) {
    for (const auto& t : ego.tweets) out[t.tweet_id] = lemmatize_text(t.text, lex);
  }
  return out;
}

}  // namespace egolex::lex
