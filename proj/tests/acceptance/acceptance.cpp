// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "egolex/error.hpp"
#include "egolex/nullmodel.hpp"
#include "egolex/parallel.hpp"
#include "egolex/report.hpp"
#include "egolex/semmetrics.hpp"
#include "egolex/structmetrics.hpp"
#include "egolex/synth.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace egolex;

namespace {

int failures = 0;

void verdict(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %-22s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

const std::string kReference = "2023-01-01T00:00:00Z";

report::RunConfig base_config(const std::filesystem::path& corpus, const std::filesystem::path& out) {
  report::RunConfig c;
  c.tweets = corpus / "tweets.jsonl";
  c.assignments = corpus / "assignments.jsonl";
  c.stopwords = testing::data_dir() / "stopwords.txt";
  c.lemmas = testing::data_dir() / "lemmas.tsv";
  c.reference_time = kReference;
  c.target_topics = 8;
  c.seed = 42;
  c.replicates = 2;
  c.out = out;
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void planted_recovery() {
  const auto dir = testing::scratch("acc_planted");
  synth::Options o;
  o.n_egos = 500;
  o.seed = 42;
  const auto corpus = synth::generate(o);
  synth::write_corpus(dir, corpus);

  auto run = [&](std::optional<double> bandwidth, std::size_t& tau6, std::size_t& wrong, std::size_t& total) {
    auto cfg = base_config(dir, dir / "out");
    cfg.bandwidth = bandwidth;
    report::Pipeline p(cfg, Exec::serial);
    const auto& egos = p.egonets();
    std::map<std::string, const egonet::EgoNetwork*> by_user;
    for (const auto& e : egos) by_user[e.user_id()] = &e;
    tau6 = wrong = total = 0;
    for (const auto& [user, rings] : corpus.truth) {
      auto it = by_user.find(user);
      const auto* ego = it == by_user.end() ? nullptr : it->second;
      if (ego && ego->tau() == rings.size()) ++tau6;
      for (std::size_t r = 0; r < rings.size(); ++r) {
        for (const auto& lemma : rings[r]) {
          ++total;
          const auto got = ego ? ego->ring_of(lemma) : std::nullopt;
          if (!got || *got != r) ++wrong;
        }
      }
    }
  };

  std::size_t tau6 = 0, wrong = 0, total = 0;
  const auto t0 = std::chrono::steady_clock::now();
  run(o.bandwidth, tau6, wrong, total);
  const double secs = seconds_since(t0);
  const double frac = static_cast<double>(tau6) / static_cast<double>(corpus.truth.size());
  const double mis = static_cast<double>(wrong) / static_cast<double>(total);
  verdict("planted-recovery", frac >= 0.95 && mis <= 0.01 && secs < 60.0,
          fmt::format("tau=6 for {:.1f}% of {} egos (>=95%), misassigned {:.3f}% of {} lemmas (<=1%), {:.1f}s (<60s), h=0.3",
                      100 * frac, corpus.truth.size(), 100 * mis, total, secs));

  // Not a criterion: the same corpus with the per-ego quantile bandwidth.
  run(std::nullopt, tau6, wrong, total);
  std::printf("INFO  %-22s quantile bandwidth: tau=6 for %.1f%% of egos, misassigned %.3f%%\n", "estimator-sensitivity",
              100.0 * static_cast<double>(tau6) / static_cast<double>(corpus.truth.size()),
              100.0 * static_cast<double>(wrong) / static_cast<double>(total));
}

void jenks_oracle() {
  testing::Gen g(2024);
  int agree = 0, n = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = 3 + g.index(98);
    topics::SemanticProfile p;
    double total = 0;
    for (std::size_t c = 0; c < k; ++c) {
      double w = g.uniform(0.001, 1.0);
      if (g.uniform() < 0.2) w *= 20;
      p.shares[static_cast<topics::TopicId>(c)] = w;
      total += w;
    }
    std::vector<double> shares;
    for (auto& [_, s] : p.shares) shares.push_back(s /= total);
    ++n;
    const auto o = oracle::jenks_exhaustive(shares);
    try {
      const auto s = semantic::jenks_primary_split(p);
      double lowest = 1;
      for (auto c : s.primary) lowest = std::min(lowest, p.share(c));
      if (o.unique) {
        agree += lowest == o.threshold;
      } else {
        std::vector<double> lo, hi;
        for (double x : shares) (x >= lowest ? hi : lo).push_back(x);
        agree += std::abs(oracle::ssd(lo, 0, lo.size()) + oracle::ssd(hi, 0, hi.size()) - o.cost) <= 1e-12;
      }
    } catch (const MetricError&) {
      agree += std::isinf(o.cost);
    }
  }
  verdict("jenks-oracle", agree == n, fmt::format("{}/{} profiles match exhaustive search (100%)", agree, n));
}

void js_suite() {
  using topics::SemanticProfile;
  testing::Gen g(77);
  const double bound = 0.832555 + 1e-9;
  bool self = true, sym = true, bounded = true;
  double worst_oracle = 0;
  for (int i = 0; i < 2000; ++i) {
    SemanticProfile p, q;
    for (auto* x : {&p, &q}) {
      double t = 0;
      for (int c = 0, k = 1 + static_cast<int>(g.index(40)); c < k; ++c) {
        if (g.uniform() < 0.7) t += (x->shares[c + static_cast<int>(g.index(10))] = g.uniform(0.01, 1));
      }
      if (x->shares.empty()) t = x->shares[0] = 1;
      for (auto& [_, s] : x->shares) s /= t;
    }
    const double d = semantic::js_distance(p, q);
    self = self && semantic::js_distance(p, p) == 0.0;
    sym = sym && d == semantic::js_distance(q, p);
    bounded = bounded && d >= 0 && d <= bound;
    std::map<int, double> pm(p.shares.begin(), p.shares.end()), qm(q.shares.begin(), q.shares.end());
    worst_oracle = std::max(worst_oracle, std::abs(d - oracle::js_direct(pm, qm)));
  }
  const double disjoint = semantic::js_distance(SemanticProfile{{{0, 1.0}}}, SemanticProfile{{{1, 1.0}}});
  const double half = semantic::js_distance(SemanticProfile{{{0, 1.0}}}, SemanticProfile{{{0, 0.5}, {1, 0.5}}});
  const double half_oracle = oracle::js_direct({{0, 1.0}}, {{0, 0.5}, {1, 0.5}});
  const bool ok = self && sym && bounded && std::abs(disjoint - 0.832555) <= 1e-6 && std::abs(half - 0.464501) <= 1e-6 &&
                  std::abs(half - half_oracle) <= 1e-12 && worst_oracle <= 1e-12;
  verdict("js-suite", ok,
          fmt::format("self=0 {}, symmetric {}, <=0.832555+1e-9 {}, disjoint {:.6f}, (1,0)|(.5,.5) {:.6f} (oracle {:.6f}), "
                      "max oracle diff {:.1e} over 2000 pairs",
                      self, sym, bounded, disjoint, half, half_oracle, worst_oracle));
}

void entropy_suite() {
  topics::SemanticProfile u;
  for (int c = 0; c < 100; ++c) u.shares[c] = 0.01;
  const double h = semantic::entropy(u);
  const double point = semantic::entropy(topics::SemanticProfile{{{7, 1.0}}});
  verdict("entropy", std::abs(h - 4.60517) <= 1e-6 && point == 0.0,
          fmt::format("uniform-100 {:.6f} (4.60517 +-1e-6), point mass {}", h, point));
}

void null_invariants() {
  testing::Gen g(5150);
  struct Toy {
    egonet::EgoNetwork ego;
    nullmodel::WordDists dists;
  };
  std::vector<Toy> toys;
  for (int e = 0; e < 20; ++e) {
    std::vector<std::vector<egonet::RingWord>> rings(static_cast<std::size_t>(g.integer(2, 6)));
    nullmodel::WordDists dists;
    std::int64_t count = 3000;
    int w = 0;
    for (auto& r : rings) {
      count = std::max<std::int64_t>(2, count / 3);
      for (std::int64_t k = g.integer(1, 10); k > 0; --k) {
        const auto lemma = fmt::format("u{}w{}", e, w++);
        r.push_back({lemma, count + g.integer(0, 5)});
        topics::WordTopicDistribution d{lemma, {}};
        double t = 0;
        for (int c = 0; c < 6; ++c) {
          if (g.uniform() < 0.5) t += (d.dist[c] = g.uniform(0.05, 1));
        }
        if (d.dist.empty()) t = d.dist[0] = 1;
        for (auto& [_, p] : d.dist) p /= t;
        dists.emplace(lemma, d);
      }
    }
    toys.push_back({egonet::EgoNetwork(fmt::format("u{:02}", e), rings), dists});
  }
  std::size_t draws = 0, broken = 0;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    for (const auto& t : toys) {
      const auto ne = nullmodel::shuffle_ego(t.ego, t.dists, 42, rep);
      ++draws;
      bool ok = ne.tau() == t.ego.tau();
      for (std::size_t r = 0; ok && r < t.ego.tau(); ++r) {
        ok = ne.rings[r].size() == t.ego.ring(r).size() && ne.occupancy(r) == t.ego.ring_occupancy()[r];
      }
      broken += !ok;
    }
  }
  std::size_t identity_ok = 0, rings = 0;
  for (const auto& t : toys) {
    std::vector<std::size_t> id(t.ego.unique_words());
    std::iota(id.begin(), id.end(), 0);
    const auto ne = nullmodel::shuffle_with_permutation(t.ego, t.dists, id);
    for (std::size_t r = 0; r < t.ego.tau(); ++r) {
      ++rings;
      identity_ok += nullmodel::null_ring_profile(ne, r) == testing::weighted_ring_profile(t.ego, r, t.dists);
    }
  }
  verdict("null-invariants", broken == 0 && identity_ok == rings,
          fmt::format("{} draws, {} violations of ring size/occupancy; identity reproduces {}/{} ring profiles bit-exactly",
                      draws, broken, identity_ok, rings));
}

void regression_fixture() {
  const std::vector<double> a = {0.03, 0.09, 0.21, 0.37, 0.64};
  std::vector<egonet::EgoNetwork> egos;
  for (std::size_t top : {100, 300, 400, 700, 900, 1200, 2000}) {
    std::vector<std::vector<egonet::RingWord>> rings;
    std::size_t prev = 0;
    std::int64_t count = 10000000;
    int w = 0;
    std::vector<std::size_t> sizes;
    for (double ai : a) sizes.push_back(static_cast<std::size_t>(std::llround(ai * static_cast<double>(top))));
    sizes.push_back(top);
    for (std::size_t s : sizes) {
      auto& ring = rings.emplace_back();
      for (std::size_t k = prev; k < s; ++k) ring.push_back({fmt::format("w{}", w++), count});
      count /= 3;
      prev = s;
    }
    egos.emplace_back(fmt::format("u{}", top), rings);
  }
  double worst = 0;
  bool last_exact = true;
  for (bool intercept : {true, false}) {
    const auto c = structural::layer_regression(egos, 6, intercept);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(c[i] - a[i]));
    last_exact = last_exact && c.back() == 1.0;
  }
  verdict("regression-fixture", worst <= 1e-9 && last_exact,
          fmt::format("max slope error {:.1e} (<=1e-9), |L_tau| on itself exactly 1.00: {}", worst, last_exact));
}

// Writes a soft assignments file derived from the hard one: one-hot when
// `one_hot`, otherwise 60-100% of the mass spread over up to three topics.
void write_soft(const std::filesystem::path& hard, const std::filesystem::path& out, bool one_hot,
                std::size_t n_topics) {
  const auto a = topics::load_topic_assignments(hard, topics::Mode::hard);
  testing::Gen g(99);
  topics::Assignments s(topics::Mode::soft);
  for (const auto* rec : a.sorted()) {
    topics::TopicVector v;
    if (one_hot) {
      if (rec->hard_label != topics::kOutlier) v.emplace_back(rec->hard_label, 1.0);
    } else {
      std::map<topics::TopicId, double> m;
      double left = g.uniform(0.6, 1.0);
      if (rec->hard_label != topics::kOutlier) {
        m[rec->hard_label] = left * 0.6;
        left *= 0.4;
      }
      for (int k = 0; k < 3; ++k) {
        const double p = left * g.uniform(0, 0.6);
        m[static_cast<topics::TopicId>(g.index(n_topics))] += p;
        left -= p;
      }
      v.assign(m.begin(), m.end());
    }
    s.add({rec->tweet_id, topics::Mode::soft, topics::kOutlier, v});
  }
  topics::write_topic_assignments(out, s);
}

void profile_contracts_and_separation(const std::filesystem::path& dir) {
  // hard, soft, one-hot soft
  double worst_sum = 0;
  std::size_t profiles = 0;
  std::vector<std::vector<std::optional<topics::SemanticProfile>>> by_mode[2];
  double worst_mass = 0;
  std::size_t merges = 0;
  std::size_t sep_cells = 0, sep_ok = 0;
  write_soft(dir / "assignments.jsonl", dir / "soft.jsonl", false, 12);
  write_soft(dir / "assignments.jsonl", dir / "onehot.jsonl", true, 12);
  const std::pair<const char*, topics::Mode> runs[] = {
      {"assignments.jsonl", topics::Mode::hard}, {"soft.jsonl", topics::Mode::soft}, {"onehot.jsonl", topics::Mode::soft}};
  for (int k = 0; k < 3; ++k) {
    auto cfg = base_config(dir, dir / "unused");
    cfg.assignments = dir / runs[k].first;
    cfg.mode = runs[k].second;
    report::Pipeline p(cfg, Exec::parallel);
    for (const auto& e : p.semantics()) {
      std::vector<std::optional<topics::SemanticProfile>> rs;
      for (int scope = semantic::kWholeEgo; scope < static_cast<int>(e.tau); ++scope) {
        const auto* prof = e.profile(scope);
        rs.emplace_back(prof ? std::optional(*prof) : std::nullopt);
        if (!prof) continue;
        ++profiles;
        worst_sum = std::max(worst_sum, std::abs(prof->total() - 1.0));
        if (e.split(scope)) {
          ++sep_cells;
          sep_ok += *semantic::ego_strength(e, semantic::Selector::top, scope, scope) >
                    *semantic::ego_strength(e, semantic::Selector::bottom, scope, scope);
        }
      }
      if (k != 1) by_mode[k == 0 ? 0 : 1].push_back(rs);
    }
    if (k == 1) {
      const auto original = topics::load_topic_assignments(cfg.assignments, topics::Mode::soft);
      const auto& m = p.topic_model();
      merges = m.model.trace.size();
      for (const auto* rec : original.sorted()) {
        double after = 0;
        for (const auto& [_, x] : m.soft->distribution(rec->tweet_id)) after += x;
        worst_mass = std::max(worst_mass, std::abs(after - rec->mass()));
      }
    }
  }
  double worst_hs = 0;
  bool same_shape = by_mode[0].size() == by_mode[1].size();
  for (std::size_t i = 0; same_shape && i < by_mode[0].size(); ++i) {
    same_shape = by_mode[0][i].size() == by_mode[1][i].size();
    for (std::size_t r = 0; same_shape && r < by_mode[0][i].size(); ++r) {
      const auto& h = by_mode[0][i][r];
      const auto& s = by_mode[1][i][r];
      same_shape = h.has_value() == s.has_value() && (!h || h->support() == s->support());
      if (!same_shape || !h) continue;
      for (const auto& [c, x] : h->shares) worst_hs = std::max(worst_hs, std::abs(x - s->share(c)));
    }
  }
  verdict("profile-contracts", worst_sum <= 1e-9 && same_shape && worst_hs <= 1e-12 && worst_mass <= 1e-9 && merges > 0,
          fmt::format("{} profiles sum to 1 within {:.1e}; hard vs one-hot soft max diff {:.1e}; "
                      "tweet mass drift {:.1e} over {} merges",
                      profiles, worst_sum, worst_hs, worst_mass, merges));
  verdict("separation", sep_cells > 0 && sep_ok == sep_cells,
          fmt::format("S_top > S_bottom in {}/{} ego scopes with a valid split", sep_ok, sep_cells));
}

void determinism(const std::filesystem::path& dir) {
  auto bundle = [](const std::filesystem::path& d) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(d)) {
      files[e.path().filename().string()] = testing::read_file(e.path());
    }
    return files;
  };
  const auto a = testing::scratch("acc_det_a");
  const auto b = testing::scratch("acc_det_b");
  report::Pipeline(base_config(dir, a), Exec::parallel).run_all();
  report::Pipeline(base_config(dir, b), Exec::serial).run_all();
  const auto fa = bundle(a), fb = bundle(b);
  std::size_t same = 0;
  for (const auto& [name, bytes] : fa) same += fb.count(name) && fb.at(name) == bytes;
  verdict("determinism", fa.size() == fb.size() && same == fa.size() && fa.size() > 1,
          fmt::format("{}/{} files byte-identical across two runs (parallel, serial)", same, fa.size()));
}

}  // namespace

int main() {
  apply_thread_env();
  auto guard = [](const char* name, auto&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      verdict(name, false, fmt::format("threw: {}", e.what()));
    }
  };
  guard("planted-recovery", planted_recovery);
  guard("jenks-oracle", jenks_oracle);
  guard("js-suite", js_suite);
  guard("entropy", entropy_suite);
  guard("null-invariants", null_invariants);
  guard("regression-fixture", regression_fixture);

  const auto fixture = testing::scratch("acc_fixture");
  guard("synth-fixture", [&] {
    synth::Options o;
    o.n_egos = 100;
    o.seed = 42;
    synth::write_corpus(fixture, synth::generate(o));
  });
  guard("profile-contracts", [&] { profile_contracts_and_separation(fixture); });
  guard("determinism", [&] { determinism(fixture); });

  std::printf("%s\n", failures ? fmt::format("{} criteria failed", failures).c_str() : "all criteria passed");
  return failures ? 1 : 0;
}
