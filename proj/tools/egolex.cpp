// egolex command line: each subcommand runs the pipeline up to its stage and
// writes that stage's outputs under --out.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "egolex/corpus.hpp"
#include "egolex/csv.hpp"
#include "egolex/egonet.hpp"
#include "egolex/error.hpp"
#include "egolex/parallel.hpp"
#include "egolex/report.hpp"
#include "egolex/synth.hpp"

namespace {

using egolex::report::RunConfig;

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> input, stopwords, lemmas, assignments, reference_time, out, mode, tau_filter, ttest;
  std::optional<double> t_years, cap_threshold, bandwidth_quantile, bandwidth;
  std::optional<std::size_t> target_topics, replicates;
  std::optional<std::uint64_t> seed;
  bool drop_fully_covered = false;
  bool no_intercept = false;
  bool serial = false;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "flat JSON config; flags override its keys");
    app->add_option("--input", input, "tweets JSONL");
    app->add_option("--reference-time", reference_time, "UTC timestamp, e.g. 2023-01-01T00:00:00Z");
    app->add_option("--t-years", t_years, "observation window in years");
    app->add_option("--cap-threshold", cap_threshold, "drop egos whose CAP exceeds this");
    app->add_flag("--drop-fully-covered", drop_fully_covered, "drop egos with fewer than 3200 raw records");
    app->add_option("--stopwords", stopwords);
    app->add_option("--lemmas", lemmas, "surface<TAB>lemma table");
    app->add_option("--bandwidth-quantile", bandwidth_quantile);
    app->add_option("--bandwidth", bandwidth, "fixed mean-shift bandwidth (skips estimation)");
    app->add_option("--assignments", assignments, "assignments.jsonl");
    app->add_option("--mode", mode, "hard | soft");
    app->add_option("--target-topics", target_topics);
    app->add_option("--tau", tau_filter, "modal | k");
    app->add_option("--seed", seed);
    app->add_option("--replicates", replicates, "null-model shuffles per ego");
    app->add_option("--ttest", ttest, "one_sample | both");
    app->add_flag("--no-intercept", no_intercept, "layer regression through the origin");
    app->add_flag("--serial", serial, "use the serial reference kernels");
    app->add_option("--out", out, "output directory");
  }

  RunConfig build() const {
    RunConfig cfg = config ? RunConfig::load(*config) : RunConfig{};
    nlohmann::json j = nlohmann::json::object();
    if (input) j["tweets"] = *input;
    if (stopwords) j["stopwords"] = *stopwords;
    if (lemmas) j["lemmas"] = *lemmas;
    if (assignments) j["assignments"] = *assignments;
    if (reference_time) j["reference_time"] = *reference_time;
    if (out) j["out"] = *out;
    if (mode) j["mode"] = *mode;
    if (tau_filter) j["tau_filter"] = *tau_filter;
    if (ttest) j["ttest"] = *ttest;
    if (t_years) j["t_years"] = *t_years;
    if (cap_threshold) j["cap_threshold"] = *cap_threshold;
    if (bandwidth_quantile) j["bandwidth_quantile"] = *bandwidth_quantile;
    if (bandwidth) j["bandwidth"] = *bandwidth;
    if (target_topics) j["target_topics"] = *target_topics;
    if (replicates) j["replicates"] = *replicates;
    if (seed) j["seed"] = *seed;
    if (drop_fully_covered) j["drop_fully_covered"] = true;
    if (no_intercept) j["intercept"] = false;
    cfg.apply_json(j);
    return cfg;
  }

  egolex::Exec exec() const { return serial ? egolex::Exec::serial : egolex::Exec::parallel; }
};

}  // namespace

int main(int argc, char** argv) {
  egolex::apply_thread_env();
  CLI::App app{"egolex: ego networks of words"};
  app.require_subcommand(1);

  Overrides o;
  std::vector<std::pair<std::string, CLI::App*>> stages;
  const std::pair<const char*, const char*> stage_help[] = {
      {"preprocess", "filter timelines and count lemmas"},
      {"egonet", "build ego networks (egonets.jsonl)"},
      {"structural", "tau histogram, layer sizes and regression"},
      {"profiles", "merge topics and write ring profiles"},
      {"semantic", "topic counts, entropy, JS distances, pulling power"},
      {"nullmodel", "shuffled-ring baseline"},
      {"run", "every stage plus run_manifest.json"},
  };
  for (const auto& [name, help] : stage_help) {
    auto* sub = app.add_subcommand(name, help);
    o.add_to(sub);
    stages.emplace_back(name, sub);
  }
  std::optional<std::string> egonets_in;
  stages[2].second->add_option("--egonets", egonets_in, "read networks from egonets.jsonl instead of tweets");

  auto* sweep = app.add_subcommand("sweep", "surviving users and mean tweets per window length");
  o.add_to(sweep);
  std::vector<double> t_list = {0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  sweep->add_option("--t-list", t_list, "window lengths in years");

  auto* synth = app.add_subcommand("synth", "planted-band synthetic corpus");
  egolex::synth::Options so;
  std::string synth_out = "synth";
  synth->add_option("--egos", so.n_egos);
  synth->add_option("--seed", so.seed);
  synth->add_option("--topics", so.n_topics);
  synth->add_option("--outlier-fraction", so.outlier_fraction);
  synth->add_option("--out", synth_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      egolex::synth::write_corpus(synth_out, egolex::synth::generate(so));
      return 0;
    }
    RunConfig cfg = o.build();
    if (sweep->parsed()) {
      cfg.validate(std::vector<std::string_view>{"tweets"});
      auto ds = egolex::corpus::load_timelines(cfg.tweets, cfg.reference());
      ds = egolex::corpus::filter_by_cap(egolex::corpus::filter_inactive(ds), cfg.cap_threshold);
      if (cfg.drop_fully_covered) ds = egolex::corpus::filter_fully_covered(ds);
      const auto s = egolex::report::window_sweep(ds, t_list);
      std::filesystem::create_directories(cfg.out);
      egolex::csv::Writer w(cfg.out / "window_sweep.csv", {"t_years", "users", "mean_tweets", "pearson_r"});
      for (const auto& r : s.rows) {
        w.row({egolex::csv::field(r.t_years), egolex::csv::field(r.users), egolex::csv::field(r.mean_tweets),
               egolex::csv::field(s.pearson_r.value_or(std::numeric_limits<double>::quiet_NaN()))});
      }
      return 0;
    }
    egolex::report::Pipeline p(cfg, o.exec());
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "preprocess") {
      p.write_preprocess();
    } else if (cmd == "egonet") {
      p.write_egonets();
    } else if (cmd == "structural") {
      if (egonets_in) p.set_egonets(egolex::egonet::read_egonets_jsonl(*egonets_in));
      p.write_structural();
    } else if (cmd == "profiles") {
      p.write_topics();
      p.write_profiles();
    } else if (cmd == "semantic") {
      p.write_semantic();
    } else if (cmd == "nullmodel") {
      p.write_null();
    } else if (cmd == "run") {
      p.run_all();
      return 0;
    }
    p.write_manifest();
  } catch (const std::exception& e) {
    fmt::print(stderr, "egolex: {}\n", e.what());
    return 1;
  }
  return 0;
}
