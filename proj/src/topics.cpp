#include "egolex/topics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "egolex/error.hpp"
#include "egolex/tfidf.hpp"

namespace egolex::topics {
namespace {

using nlohmann::json;

const TopicVector kEmpty;

TopicId parse_topic_key(const std::string& key, std::size_t line_no) {
  TopicId id = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), id);
  if (ec != std::errc() || ptr != key.data() + key.size()) {
    throw DataError(fmt::format("line {}: topic key '{}' is not an integer", line_no, key));
  }
  return id;
}

void check_known(TopicId id, const std::optional<std::set<TopicId>>& universe, std::size_t line_no) {
  if (universe && !universe->contains(id)) {
    throw DataError(fmt::format("line {}: unknown topic id {}", line_no, id));
  }
}

TopicAssignment parse_record(const std::string& line, std::size_t line_no, Mode mode,
                             const std::optional<std::set<TopicId>>& universe) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("line {}: invalid JSON ({})", line_no, e.what()));
  }
  if (!obj.is_object() || !obj.contains("tweet_id") || !obj["tweet_id"].is_string()) {
    throw DataError(fmt::format("line {}: missing string 'tweet_id'", line_no));
  }
  TopicAssignment a;
  a.tweet_id = obj["tweet_id"].get<std::string>();
  a.mode = mode;
  const char* value_key = mode == Mode::hard ? "topic" : "probs";
  for (const auto& [key, _] : obj.items()) {
    if (key != "tweet_id" && key != value_key) {
      throw DataError(fmt::format("line {}: unexpected key '{}' for {} mode", line_no, key, to_string(mode)));
    }
  }
  if (mode == Mode::hard) {
    if (!obj.contains("topic") || !obj["topic"].is_number_integer()) {
      throw DataError(fmt::format("line {}: 'topic' must be an integer", line_no));
    }
    a.hard_label = obj["topic"].get<TopicId>();
    if (a.hard_label < kOutlier) {
      throw DataError(fmt::format("line {}: unknown topic id {}", line_no, a.hard_label));
    }
    if (a.hard_label != kOutlier) {
      check_known(a.hard_label, universe, line_no);
      a.probs = {{a.hard_label, 1.0}};
    }
    return a;
  }
  if (!obj.contains("probs") || !obj["probs"].is_object()) {
    throw DataError(fmt::format("line {}: 'probs' must be an object", line_no));
  }
  double sum = 0.0;
  for (const auto& [key, value] : obj["probs"].items()) {
    const TopicId id = parse_topic_key(key, line_no);
    if (id < 0) throw DataError(fmt::format("line {}: unknown topic id {}", line_no, id));
    check_known(id, universe, line_no);
    if (!value.is_number()) throw DataError(fmt::format("line {}: probability must be a number", line_no));
    const double p = value.get<double>();
    if (!std::isfinite(p) || p < 0.0) {
      throw DataError(fmt::format("line {}: probability {} is negative or not finite", line_no, p));
    }
    sum += p;
    if (p > 0.0) a.probs.emplace_back(id, p);
  }
  if (sum > 1.0 + kMassTolerance) {
    throw DataError(fmt::format("line {}: probabilities sum to {} > 1", line_no, sum));
  }
  std::sort(a.probs.begin(), a.probs.end());
  return a;
}

Assignments parse_stream(std::istream& in, Mode mode, const std::optional<std::set<TopicId>>& universe) {
  Assignments out(mode);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto rec = parse_record(line, line_no, mode, universe);
    try {
      out.add(std::move(rec));
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace

Mode parse_mode(const std::string& s) {
  if (s == "hard") return Mode::hard;
  if (s == "soft") return Mode::soft;
  throw DataError(fmt::format("mode must be 'hard' or 'soft', got '{}'", s));
}

const char* to_string(Mode m) { return m == Mode::hard ? "hard" : "soft"; }

double TopicAssignment::mass() const {
  double s = 0.0;
  for (const auto& [_, p] : probs) s += p;
  return s;
}

void Assignments::add(TopicAssignment a) {
  if (a.mode != mode_) throw DataError("assignment mode mismatch");
  const std::string id = a.tweet_id;
  if (!records_.emplace(id, std::move(a)).second) {
    throw DataError(fmt::format("duplicate tweet_id '{}'", id));
  }
}

const TopicAssignment* Assignments::find(const std::string& tweet_id) const {
  auto it = records_.find(tweet_id);
  return it == records_.end() ? nullptr : &it->second;
}

const TopicVector& Assignments::distribution(const std::string& tweet_id) const {
  const auto* a = find(tweet_id);
  return a ? a->probs : kEmpty;
}

TopicId Assignments::label(const std::string& tweet_id) const {
  const auto* a = find(tweet_id);
  return a ? a->hard_label : kOutlier;
}

std::set<TopicId> Assignments::topic_ids() const {
  std::set<TopicId> ids;
  for (const auto& [_, a] : records_) {
    for (const auto& [c, p] : a.probs) ids.insert(c);
  }
  return ids;
}

std::vector<const TopicAssignment*> Assignments::sorted() const {
  std::vector<const TopicAssignment*> out;
  out.reserve(records_.size());
  for (const auto& [_, a] : records_) out.push_back(&a);
  std::sort(out.begin(), out.end(),
            [](const TopicAssignment* x, const TopicAssignment* y) { return x->tweet_id < y->tweet_id; });
  return out;
}

Assignments load_topic_assignments(const std::filesystem::path& path, Mode mode,
                                   const std::optional<std::set<TopicId>>& universe) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open assignments '{}'", path.string()));
  try {
    return parse_stream(in, mode, universe);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

Assignments parse_topic_assignments(const std::string& jsonl, Mode mode,
                                    const std::optional<std::set<TopicId>>& universe) {
  std::istringstream in(jsonl);
  return parse_stream(in, mode, universe);
}

void write_topic_assignments(const std::filesystem::path& path, const Assignments& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  for (const auto* rec : a.sorted()) {
    json obj = {{"tweet_id", rec->tweet_id}};
    if (a.mode() == Mode::hard) {
      obj["topic"] = rec->hard_label;
    } else {
      json probs = json::object();
      for (const auto& [c, p] : rec->probs) probs[std::to_string(c)] = p;
      obj["probs"] = std::move(probs);
    }
    out << obj.dump() << '\n';
  }
}

Assignments harden(const Assignments& soft) {
  Assignments out(Mode::hard);
  for (const auto* rec : soft.sorted()) {
    TopicAssignment h;
    h.tweet_id = rec->tweet_id;
    h.mode = Mode::hard;
    double best = 0.0;
    for (const auto& [c, p] : rec->probs) {
      if (p > best) {
        best = p;
        h.hard_label = c;
      }
    }
    if (h.hard_label != kOutlier) h.probs = {{h.hard_label, 1.0}};
    out.add(std::move(h));
  }
  return out;
}

std::map<TopicId, std::vector<std::pair<std::string, double>>> TopicModel::top_terms(std::size_t k) const {
  std::vector<std::string> vocab;
  for (const auto& [_, doc] : documents) {
    for (const auto& [lemma, __] : doc) vocab.push_back(lemma);
  }
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  auto term_of = [&](const std::string& w) {
    return static_cast<tfidf::TermId>(std::lower_bound(vocab.begin(), vocab.end(), w) - vocab.begin());
  };
  std::vector<TopicId> ids;
  std::vector<tfidf::TermCounts> docs;
  for (const auto& [id, doc] : documents) {
    ids.push_back(id);
    tfidf::TermCounts tc;
    for (const auto& [lemma, n] : doc) tc.emplace_back(term_of(lemma), n);
    docs.push_back(std::move(tc));
  }
  const auto weights = tfidf::raw_weights(docs);
  std::map<TopicId, std::vector<std::pair<std::string, double>>> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::pair<std::string, double>> terms;
    for (const auto& [term, w] : weights[i]) terms.emplace_back(vocab[term], w);
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (terms.size() > k) terms.resize(k);
    out[ids[i]] = std::move(terms);
  }
  return out;
}

MergeResult merge_topics(const Assignments& hard, const TweetLemmas& docs, std::size_t target,
                         const Assignments* soft, Exec exec) {
  if (target < 1) throw DataError("target topic count must be >= 1");
  if (hard.mode() != Mode::hard) throw DataError("merge_topics needs hard assignments");

  std::set<TopicId> universe = hard.topic_ids();
  if (soft) {
    const auto s = soft->topic_ids();
    universe.insert(s.begin(), s.end());
  }

  // Deterministic vocabulary: sorted distinct lemmas of hard-assigned tweets.
  const auto records = hard.sorted();
  std::vector<std::string> vocab;
  for (const auto* rec : records) {
    if (rec->hard_label == kOutlier) continue;
    if (auto it = docs.find(rec->tweet_id); it != docs.end()) {
      vocab.insert(vocab.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  auto term_of = [&](const std::string& w) {
    return static_cast<tfidf::TermId>(std::lower_bound(vocab.begin(), vocab.end(), w) - vocab.begin());
  };

  struct Topic {
    TopicId id;
    std::size_t size = 0;
    std::map<tfidf::TermId, std::int64_t> terms;
  };
  std::vector<Topic> current;
  for (TopicId id : universe) current.push_back({id, 0, {}});
  auto index_of = [&](TopicId id) {
    return static_cast<std::size_t>(
        std::lower_bound(current.begin(), current.end(), id,
                         [](const Topic& t, TopicId v) { return t.id < v; }) -
        current.begin());
  };
  for (const auto* rec : records) {
    if (rec->hard_label == kOutlier) continue;
    Topic& t = current[index_of(rec->hard_label)];
    ++t.size;
    if (auto it = docs.find(rec->tweet_id); it != docs.end()) {
      for (const auto& w : it->second) ++t.terms[term_of(w)];
    }
  }
  auto vectors = [&]() {
    std::vector<tfidf::TermCounts> tc;
    tc.reserve(current.size());
    for (const auto& t : current) tc.emplace_back(t.terms.begin(), t.terms.end());
    return tfidf::vectorize(tc);
  };

  MergeResult res;
  auto vecs = vectors();
  res.model.initial_mean_similarity = tfidf::mean_pairwise_similarity(vecs, exec);
  while (current.size() > target && current.size() > 1) {
    std::size_t s = 0;
    for (std::size_t i = 1; i < current.size(); ++i) {
      if (current[i].size < current[s].size) s = i;
    }
    const auto sims = tfidf::similarities_to(vecs, s, exec);
    std::size_t best = s == 0 ? 1 : 0;
    for (std::size_t j = 0; j < current.size(); ++j) {
      if (j != s && sims[j] > sims[best]) best = j;
    }
    MergeStep step;
    step.from = current[s].id;
    step.into = current[best].id;
    step.similarity = sims[best];
    current[best].size += current[s].size;
    for (const auto& [term, n] : current[s].terms) current[best].terms[term] += n;
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(s));
    vecs = vectors();
    step.mean_pairwise_similarity = tfidf::mean_pairwise_similarity(vecs, exec);
    step.topics_after = current.size();
    res.model.trace.push_back(step);
  }

  for (const auto& t : current) {
    res.model.topic_ids.push_back(t.id);
    res.model.hard_sizes[t.id] = t.size;
    auto& doc = res.model.documents[t.id];
    for (const auto& [term, n] : t.terms) doc[vocab[term]] = n;
  }
  res.hard = apply_merge_trace(hard, res.model.trace);
  if (soft) res.soft = apply_merge_trace(*soft, res.model.trace);
  return res;
}

Assignments apply_merge_trace(const Assignments& a, std::span<const MergeStep> trace) {
  std::map<TopicId, TopicId> parent;
  for (const auto& step : trace) parent[step.from] = step.into;
  auto final_of = [&](TopicId c) {
    for (auto it = parent.find(c); it != parent.end(); it = parent.find(c)) c = it->second;
    return c;
  };
  Assignments out(a.mode());
  for (const auto* rec : a.sorted()) {
    TopicAssignment r;
    r.tweet_id = rec->tweet_id;
    r.mode = rec->mode;
    r.hard_label = rec->hard_label == kOutlier ? kOutlier : final_of(rec->hard_label);
    std::map<TopicId, double> merged;
    for (const auto& [c, p] : rec->probs) merged[final_of(c)] += p;
    r.probs.assign(merged.begin(), merged.end());
    out.add(std::move(r));
  }
  return out;
}

void write_topic_model_json(const std::filesystem::path& path, const TopicModel& model, std::size_t top_k) {
  json trace = json::array();
  for (const auto& s : model.trace) {
    trace.push_back({{"from", s.from},
                     {"into", s.into},
                     {"similarity", s.similarity},
                     {"mean_pairwise_similarity", s.mean_pairwise_similarity},
                     {"topics_after", s.topics_after}});
  }
  json top = json::object();
  for (const auto& [id, terms] : model.top_terms(top_k)) {
    json words = json::array();
    for (const auto& [w, _] : terms) words.push_back(w);
    top[std::to_string(id)] = std::move(words);
  }
  json sizes = json::object();
  for (const auto& [id, n] : model.hard_sizes) sizes[std::to_string(id)] = n;
  const json obj = {{"topic_ids", model.topic_ids},
                    {"hard_sizes", std::move(sizes)},
                    {"initial_mean_similarity", model.initial_mean_similarity},
                    {"similarity_average", "all topic pairs"},
                    {"merge_trace", std::move(trace)},
                    {"top_terms", std::move(top)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << obj.dump(2) << '\n';
}

}  // namespace egolex::topics
