#include "egolex/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "egolex/error.hpp"
#include "egolex/nullmodel.hpp"

namespace egolex::synth {
namespace {

using nullmodel::Rng;

double uniform(Rng& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::string lemma_name(std::size_t band, std::size_t j) { return fmt::format("b{}w{:05}", band, j); }

struct Slot {
  std::string lemma;
  std::size_t topic;
};

}  // namespace

std::vector<Band> default_bands() {
  // ln 2 keeps the outermost band at exactly two occurrences after rounding.
  const double base = std::log(2.0);
  const std::size_t sizes[] = {300, 90, 30, 10, 4, 2};
  std::vector<Band> out;
  for (std::size_t i = 0; i < 6; ++i) out.push_back({base + 1.0 * static_cast<double>(i), sizes[i]});
  return out;
}

void validate_bands(std::span<const Band> bands, double bandwidth, double jitter) {
  if (bands.empty()) throw DataError("no bands");
  if (!(bandwidth > 0.0)) throw DataError("bandwidth must be positive");
  std::vector<double> means;
  for (const auto& b : bands) {
    if (b.size == 0) throw DataError("empty band");
    if (std::round(std::exp(b.log_mean - jitter)) < 2.0) {
      throw DataError(fmt::format("band at {} yields hapaxes", b.log_mean));
    }
    means.push_back(b.log_mean);
  }
  std::sort(means.begin(), means.end());
  for (std::size_t i = 1; i < means.size(); ++i) {
    if (means[i] - means[i - 1] < 3.0 * bandwidth) throw DataError("overlapping bands");
  }
}

Corpus generate(const Options& opts) {
  auto bands = opts.bands.empty() ? default_bands() : opts.bands;
  validate_bands(bands, opts.bandwidth, opts.jitter);
  if (opts.size_jitter < 0.0 || opts.size_jitter >= 1.0) throw DataError("size jitter must be in [0,1)");
  if (opts.n_topics == 0 || opts.words_per_tweet == 0) throw DataError("topics and tweet length must be positive");
  // Band index 0 is the most frequent.
  std::stable_sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.log_mean > b.log_mean; });

  Rng global(nullmodel::stream_key(opts.seed, "synth-vocabulary"));
  std::vector<std::vector<std::size_t>> home(bands.size());
  for (std::size_t b = 0; b < bands.size(); ++b) {
    home[b].resize(bands[b].size * std::max<std::size_t>(opts.pool_factor, 1));
    for (auto& t : home[b]) t = global.below(opts.n_topics);
  }

  Corpus out;
  const double year_s = kDaysPerYear * kSecondsPerDay;
  for (std::size_t e = 0; e < opts.n_egos; ++e) {
    const std::string user = fmt::format("u{:05}", e);
    Rng rng(nullmodel::stream_key(opts.seed, user));
    std::vector<std::vector<std::string>> rings(bands.size());
    std::vector<std::vector<Slot>> by_topic(opts.n_topics);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      std::vector<std::size_t> pool(home[b].size());
      for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = j;
      shuffle(pool, rng);
      const double scale = 1.0 + opts.size_jitter * (2.0 * uniform(rng) - 1.0);
      const auto size = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(static_cast<double>(bands[b].size) * scale)), 1, pool.size());
      for (std::size_t k = 0; k < size; ++k) {
        const std::size_t j = pool[k];
        const double x = bands[b].log_mean + opts.jitter * (2.0 * uniform(rng) - 1.0);
        const auto count = static_cast<std::int64_t>(std::round(std::exp(x)));
        const std::string lemma = lemma_name(b, j);
        rings[b].push_back(lemma);
        for (std::int64_t c = 0; c < count; ++c) by_topic[home[b][j]].push_back({lemma, home[b][j]});
      }
      std::sort(rings[b].begin(), rings[b].end());
    }

    struct Draft {
      std::string text;
      topics::TopicId label;
    };
    std::vector<Draft> drafts;
    for (std::size_t t = 0; t < opts.n_topics; ++t) {
      auto& occ = by_topic[t];
      shuffle(occ, rng);
      for (std::size_t i = 0; i < occ.size(); i += opts.words_per_tweet) {
        std::string text;
        for (std::size_t k = i; k < std::min(occ.size(), i + opts.words_per_tweet); ++k) {
          if (!text.empty()) text += ' ';
          text += occ[k].lemma;
        }
        const bool outlier = uniform(rng) < opts.outlier_fraction;
        drafts.push_back({std::move(text), outlier ? topics::kOutlier : static_cast<topics::TopicId>(t)});
      }
    }
    shuffle(drafts, rng);

    std::vector<std::int64_t> offsets(drafts.size());
    for (auto& o : offsets) o = 60 + static_cast<std::int64_t>(uniform(rng) * 0.98 * year_s);
    std::sort(offsets.begin(), offsets.end(), std::greater<>());
    const double cap = 0.4 * uniform(rng);

    corpus::Tweet anchor;
    anchor.tweet_id = user + "t00000";
    anchor.user_id = user;
    anchor.created_at = opts.reference_time - std::chrono::seconds(static_cast<std::int64_t>(1.2 * year_s));
    anchor.text = "the and of";
    anchor.lang = "en";
    anchor.cap = cap;
    out.tweets.push_back(anchor);
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      corpus::Tweet tw;
      tw.tweet_id = fmt::format("{}t{:05}", user, i + 1);
      tw.user_id = user;
      tw.created_at = opts.reference_time - std::chrono::seconds(offsets[i]);
      tw.text = std::move(drafts[i].text);
      tw.lang = "en";
      tw.cap = cap;
      out.assignments.add({tw.tweet_id, topics::Mode::hard, drafts[i].label,
                           drafts[i].label == topics::kOutlier
                               ? topics::TopicVector{}
                               : topics::TopicVector{{drafts[i].label, 1.0}}});
      out.tweets.push_back(std::move(tw));
    }
    out.truth.emplace_back(user, std::move(rings));
  }
  return out;
}

void write_tweets_jsonl(const std::filesystem::path& path, std::span<const corpus::Tweet> tweets) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write {}", path.string()));
  for (const auto& t : tweets) {
    nlohmann::ordered_json j;
    j["tweet_id"] = t.tweet_id;
    j["user_id"] = t.user_id;
    j["created_at"] = format_iso8601(t.created_at);
    j["text"] = t.text;
    j["lang"] = t.lang;
    j["is_retweet"] = t.is_retweet;
    if (t.cap) j["cap"] = *t.cap;
    f << j.dump() << '\n';
  }
}

void write_truth_jsonl(const std::filesystem::path& path, const Corpus& c) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write {}", path.string()));
  for (const auto& [user, rings] : c.truth) {
    nlohmann::ordered_json j;
    j["user_id"] = user;
    j["rings"] = rings;
    f << j.dump() << '\n';
  }
}

void write_corpus(const std::filesystem::path& dir, const Corpus& c) {
  std::filesystem::create_directories(dir);
  write_tweets_jsonl(dir / "tweets.jsonl", c.tweets);
  topics::write_topic_assignments(dir / "assignments.jsonl", c.assignments);
  write_truth_jsonl(dir / "truth.jsonl", c);
}

}  // namespace egolex::synth
