#include "egolex/report.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <unordered_map>

#include <boost/version.hpp>
#include <fmt/format.h>

#include "egolex/csv.hpp"
#include "egolex/stats.hpp"
#include "egolex/structmetrics.hpp"

namespace egolex::report {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs f(i) for i in [0, n); the first exception is rethrown after the loop.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

struct MeanCi {
  double mean = kNaN;
  double ci95 = kNaN;
};

MeanCi mean_ci(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  return {stats::mean(xs), stats::ci95_halfwidth(xs)};
}

double mean_or_nan(const std::vector<double>& xs) { return xs.empty() ? kNaN : stats::mean(xs); }

std::vector<int> scopes_with_ego(std::size_t tau) {
  std::vector<int> s;
  for (int r = 0; r < static_cast<int>(tau); ++r) s.push_back(r);
  s.push_back(semantic::kWholeEgo);
  return s;
}

std::int64_t assigned_in(const semantic::EgoSemantics& e, int scope) {
  if (scope != semantic::kWholeEgo) return e.assigned.at(static_cast<std::size_t>(scope));
  std::int64_t s = 0;
  for (auto a : e.assigned) s += a;
  return s;
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw DataError(fmt::format("config field '{}' has the wrong type", key));
  }
}

}  // namespace

// --- RunConfig -------------------------------------------------------------

void RunConfig::apply_json(const json& j) {
  if (!j.is_object()) throw DataError("config must be a flat JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "tweets") {
      tweets = get_as<std::string>(v, key);
    } else if (key == "stopwords") {
      stopwords = get_as<std::string>(v, key);
    } else if (key == "lemmas") {
      lemmas = get_as<std::string>(v, key);
    } else if (key == "assignments") {
      assignments = get_as<std::string>(v, key);
    } else if (key == "reference_time") {
      reference_time = get_as<std::string>(v, key);
    } else if (key == "t_years") {
      t_years = get_as<double>(v, key);
    } else if (key == "cap_threshold") {
      cap_threshold = get_as<double>(v, key);
    } else if (key == "tau_filter") {
      tau_filter = v.is_number_integer() ? std::to_string(v.get<long long>()) : get_as<std::string>(v, key);
    } else if (key == "target_topics") {
      target_topics = get_as<std::size_t>(v, key);
    } else if (key == "mode") {
      mode = topics::parse_mode(get_as<std::string>(v, key));
    } else if (key == "bandwidth_quantile") {
      bandwidth_quantile = get_as<double>(v, key);
    } else if (key == "bandwidth") {
      bandwidth = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
    } else if (key == "seed") {
      seed = get_as<std::uint64_t>(v, key);
    } else if (key == "replicates") {
      replicates = get_as<std::size_t>(v, key);
    } else if (key == "ttest") {
      const auto s = get_as<std::string>(v, key);
      if (s == "one_sample") {
        ttest = semantic::TTestMode::one_sample;
      } else if (s == "both") {
        ttest = semantic::TTestMode::both;
      } else {
        throw DataError(fmt::format("config field 'ttest' must be 'one_sample' or 'both', got '{}'", s));
      }
    } else if (key == "intercept") {
      intercept = get_as<bool>(v, key);
    } else if (key == "drop_fully_covered") {
      drop_fully_covered = get_as<bool>(v, key);
    } else if (key == "out") {
      out = get_as<std::string>(v, key);
    } else {
      throw DataError(fmt::format("unknown config field '{}'", key));
    }
  }
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  RunConfig cfg;
  cfg.apply_json(j);
  // Relative input paths are taken relative to the config file.
  const fs::path base = path.parent_path();
  for (fs::path* p : {&cfg.tweets, &cfg.stopwords, &cfg.lemmas, &cfg.assignments, &cfg.out}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return cfg;
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["tweets"] = tweets.string();
  j["stopwords"] = stopwords.string();
  j["lemmas"] = lemmas.string();
  j["assignments"] = assignments.string();
  j["reference_time"] = reference_time;
  j["t_years"] = t_years;
  j["cap_threshold"] = cap_threshold;
  j["tau_filter"] = tau_filter;
  j["target_topics"] = target_topics;
  j["mode"] = topics::to_string(mode);
  j["bandwidth_quantile"] = bandwidth_quantile;
  j["bandwidth"] = bandwidth ? ordered_json(*bandwidth) : ordered_json(nullptr);
  j["seed"] = seed;
  j["replicates"] = replicates;
  j["ttest"] = ttest == semantic::TTestMode::both ? "both" : "one_sample";
  j["intercept"] = intercept;
  j["drop_fully_covered"] = drop_fully_covered;
  return j;
}

Timestamp RunConfig::reference() const {
  if (reference_time.empty()) throw DataError("config field 'reference_time' is required");
  try {
    return parse_iso8601(reference_time);
  } catch (const DataError& e) {
    throw DataError(fmt::format("config field 'reference_time': {}", e.what()));
  }
}

std::optional<std::size_t> RunConfig::explicit_tau() const {
  if (tau_filter == "modal") return std::nullopt;
  std::size_t pos = 0;
  long long k = 0;
  try {
    k = std::stoll(tau_filter, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tau_filter.size() || k < 1) {
    throw DataError(fmt::format("config field 'tau_filter' must be 'modal' or a positive integer, got '{}'",
                                tau_filter));
  }
  return static_cast<std::size_t>(k);
}

void RunConfig::validate(std::span<const std::string_view> path_fields) const {
  auto range = [](bool ok, const char* field, const char* what) {
    if (!ok) throw DataError(fmt::format("config field '{}' {}", field, what));
  };
  range(t_years > 0.0, "t_years", "must be positive");
  range(cap_threshold >= 0.0 && cap_threshold <= 1.0, "cap_threshold", "must be in [0,1]");
  range(target_topics >= 1, "target_topics", "must be >= 1");
  range(bandwidth_quantile > 0.0 && bandwidth_quantile <= 1.0, "bandwidth_quantile", "must be in (0,1]");
  range(!bandwidth || *bandwidth > 0.0, "bandwidth", "must be positive");
  range(replicates >= 1, "replicates", "must be >= 1");
  explicit_tau();
  reference();
  for (auto field : path_fields) {
    const fs::path* p = nullptr;
    if (field == "tweets") p = &tweets;
    if (field == "stopwords") p = &stopwords;
    if (field == "lemmas") p = &lemmas;
    if (field == "assignments") p = &assignments;
    if (!p) throw Error(fmt::format("unknown path field '{}'", field));
    if (p->empty()) throw DataError(fmt::format("config field '{}' is required", field));
    if (!fs::exists(*p)) {
      throw DataError(fmt::format("config field '{}': path '{}' does not exist", field, p->string()));
    }
  }
}

StageError::StageError(std::string stage, const std::string& what)
    : Error(fmt::format("stage '{}': {}", stage, what)), stage_(std::move(stage)) {}

// --- free functions --------------------------------------------------------

Sweep window_sweep(const corpus::Dataset& ds, std::span<const double> t_list) {
  Sweep s;
  std::vector<double> ts;
  std::vector<double> means;
  for (double t : t_list) {
    const auto w = corpus::apply_observation_window(ds, t);
    SweepRow row{t, w.egos.size(), 0.0};
    if (!w.egos.empty()) {
      row.mean_tweets = static_cast<double>(w.tweet_count()) / static_cast<double>(w.egos.size());
      ts.push_back(t);
      means.push_back(row.mean_tweets);
    }
    s.rows.push_back(row);
  }
  s.pearson_r = stats::pearson(ts, means);
  return s;
}

std::vector<double> topx_coverage_curve(std::span<const topics::SemanticProfile> profiles, std::size_t n_topics) {
  std::vector<double> curve(n_topics, 0.0);
  if (profiles.empty()) return std::vector<double>(n_topics, kNaN);
  for (const auto& p : profiles) {
    std::vector<double> shares;
    for (const auto& [_, s] : p.shares) shares.push_back(s);
    std::sort(shares.begin(), shares.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t x = 0; x < n_topics; ++x) {
      if (x < shares.size()) acc += shares[x];
      curve[x] += acc;
    }
  }
  for (auto& c : curve) c /= static_cast<double>(profiles.size());
  return curve;
}

std::string scope_label(int scope) {
  return scope == semantic::kWholeEgo ? std::string("ego") : fmt::format("r{}", scope + 1);
}

// --- Pipeline --------------------------------------------------------------

Pipeline::Pipeline(RunConfig cfg, Exec exec) : cfg_(std::move(cfg)), exec_(exec) {
  manifest_["version"] = kVersion;
  manifest_["config"] = cfg_.to_json();
  manifest_["libraries"] = {
      {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                    NLOHMANN_JSON_VERSION_PATCH)},
      {"fmt", fmt::format("{}", FMT_VERSION)},
      {"boost", BOOST_LIB_VERSION},
  };
  manifest_["stages"] = ordered_json::object();
  manifest_["outputs"] = ordered_json::object();
  manifest_["errors"] = ordered_json::array();
}

template <class F>
decltype(auto) Pipeline::stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

fs::path Pipeline::out(const std::string& name) {
  fs::create_directories(cfg_.out);
  return cfg_.out / name;
}

void Pipeline::record_output(const std::string& name, std::size_t rows) { manifest_["outputs"][name] = rows; }

const corpus::Dataset& Pipeline::dataset() {
  if (dataset_) return *dataset_;
  return stage("corpus", [&]() -> const corpus::Dataset& {
    const std::string_view fields[] = {"tweets"};
    cfg_.validate(fields);
    auto ds = corpus::load_timelines(cfg_.tweets, cfg_.reference());
    auto& m = manifest_["stages"]["corpus"];
    m["loaded_egos"] = ds.egos.size();
    m["loaded_tweets"] = ds.tweet_count();
    ds = corpus::filter_inactive(ds);
    m["after_inactive_filter"] = ds.egos.size();
    ds = corpus::filter_by_cap(ds, cfg_.cap_threshold);
    m["after_cap_filter"] = ds.egos.size();
    if (cfg_.drop_fully_covered) {
      ds = corpus::filter_fully_covered(ds);
      m["after_fully_covered_filter"] = ds.egos.size();
    }
    ds = corpus::apply_observation_window(ds, cfg_.t_years);
    m["after_window"] = ds.egos.size();
    m["windowed_tweets"] = ds.tweet_count();
    if (ds.egos.empty()) throw DataError("no ego survives the corpus filters");
    dataset_ = std::move(ds);
    return *dataset_;
  });
}

const std::vector<lex::WordCounts>& Pipeline::word_counts() {
  if (counts_) return *counts_;
  const auto& ds = dataset();
  return stage("lexing", [&]() -> const std::vector<lex::WordCounts>& {
    const std::string_view fields[] = {"stopwords", "lemmas"};
    cfg_.validate(fields);
    if (!lexicon_) lexicon_ = lex::load_lexicon(cfg_.stopwords, cfg_.lemmas);
    counts_ = lex::count_all(ds, *lexicon_, ds.window_years.value_or(cfg_.t_years), exec_);
    std::size_t empty = 0;
    for (const auto& wc : *counts_) empty += wc.empty() ? 1 : 0;
    auto& m = manifest_["stages"]["lexing"];
    m["egos"] = counts_->size();
    m["egos_without_words"] = empty;
    return *counts_;
  });
}

const std::vector<egonet::EgoNetwork>& Pipeline::egonets() {
  if (egonets_) return *egonets_;
  const auto& counts = word_counts();
  return stage("egonet", [&]() -> const std::vector<egonet::EgoNetwork>& {
    egonet::BuildOptions opts;
    opts.bandwidth = cfg_.bandwidth;
    opts.bandwidth_quantile = cfg_.bandwidth_quantile;
    egonets_ = egonet::build_all(counts, opts, exec_);
    manifest_["stages"]["egonet"]["egos"] = egonets_->size();
    if (egonets_->empty()) throw DataError("no ego network could be built");
    return *egonets_;
  });
}

void Pipeline::set_egonets(std::vector<egonet::EgoNetwork> egos) {
  manifest_["stages"]["egonet"]["egos"] = egos.size();
  manifest_["stages"]["egonet"]["source"] = "egonets.jsonl";
  egonets_ = std::move(egos);
}

std::size_t Pipeline::selected_tau() {
  if (tau_) return *tau_;
  const auto& egos = egonets();
  return stage("structmetrics", [&] {
    const auto hist = structural::tau_histogram(egos);
    const auto k = cfg_.explicit_tau();
    tau_ = k ? *k : structural::modal_tau(hist);
    auto& m = manifest_["stages"]["structmetrics"];
    m["tau_filter"] = cfg_.tau_filter;
    m["selected_tau"] = *tau_;
    m["egos_with_selected_tau"] = hist.count(*tau_) ? hist.at(*tau_) : 0;
    return *tau_;
  });
}

const topics::MergeResult& Pipeline::topic_model() {
  if (merge_) return *merge_;
  const auto& ds = dataset();
  word_counts();
  return stage("topics", [&]() -> const topics::MergeResult& {
    const std::string_view fields[] = {"assignments"};
    cfg_.validate(fields);
    const auto loaded = topics::load_topic_assignments(cfg_.assignments, cfg_.mode);
    const auto docs = lex::tweet_lemmas(ds, *lexicon_);
    if (cfg_.mode == topics::Mode::soft) {
      merge_ = topics::merge_topics(topics::harden(loaded), docs, cfg_.target_topics, &loaded, exec_);
    } else {
      merge_ = topics::merge_topics(loaded, docs, cfg_.target_topics, nullptr, exec_);
    }
    auto& m = manifest_["stages"]["topics"];
    m["mode"] = topics::to_string(cfg_.mode);
    m["assignment_records"] = loaded.size();
    m["topics_before_merge"] = loaded.topic_ids().size();
    m["topics_after_merge"] = merge_->model.topic_ids.size();
    m["merge_steps"] = merge_->model.trace.size();
    return *merge_;
  });
}

const topics::Assignments& Pipeline::profile_assignments() {
  const auto& m = topic_model();
  return cfg_.mode == topics::Mode::soft ? *m.soft : m.hard;
}

const std::vector<topics::EgoTopicTable>& Pipeline::topic_tables() {
  if (tables_) return *tables_;
  const auto& egos = egonets();
  const auto& counts = word_counts();
  const auto& assignments = profile_assignments();
  return stage("semmetrics", [&]() -> const std::vector<topics::EgoTopicTable>& {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < counts.size(); ++i) index.emplace(counts[i].user_id, i);
    std::vector<topics::EgoTopicTable> tables(egos.size());
    for_each_index(egos.size(), exec_, [&](std::size_t i) {
      auto it = index.find(egos[i].user_id());
      if (it == index.end()) throw DataError(fmt::format("no word counts for ego '{}'", egos[i].user_id()));
      tables[i] = topics::EgoTopicTable::build(counts[it->second], assignments);
    });
    tables_ = std::move(tables);
    return *tables_;
  });
}

const std::vector<semantic::EgoSemantics>& Pipeline::semantics() {
  if (semantics_) return *semantics_;
  const auto& egos = egonets();
  const auto& tables = topic_tables();
  return stage("semmetrics", [&]() -> const std::vector<semantic::EgoSemantics>& {
    std::vector<semantic::EgoSemantics> sem(egos.size());
    for_each_index(egos.size(), exec_, [&](std::size_t i) { sem[i] = semantic::analyze_ego(egos[i], tables[i]); });
    semantics_ = std::move(sem);
    return *semantics_;
  });
}

std::vector<const semantic::EgoSemantics*> Pipeline::selected() {
  const std::size_t tau = selected_tau();
  std::vector<const semantic::EgoSemantics*> out;
  for (const auto& e : semantics()) {
    if (e.tau == tau) out.push_back(&e);
  }
  return out;
}

void Pipeline::write_preprocess() {
  const auto& ds = dataset();
  const auto& counts = word_counts();
  stage("report", [&] {
    csv::Writer stages(out("preprocess_counts.csv"), {"stage", "egos"});
    for (const auto& [k, v] : manifest_["stages"]["corpus"].items()) stages.row({k, csv::field(v.get<std::size_t>())});
    stages.close();
    record_output("preprocess_counts.csv", stages.rows());
    csv::Writer words(out("word_counts.csv"), {"user_id", "lemma", "count"});
    for (const auto& wc : counts) {
      for (const auto& [lemma, n] : wc.counts) words.row({wc.user_id, lemma, csv::field(n)});
    }
    words.close();
    record_output("word_counts.csv", words.rows());
    manifest_["stages"]["corpus"]["egos_written"] = ds.egos.size();
  });
}

void Pipeline::write_egonets() {
  const auto& egos = egonets();
  stage("report", [&] {
    egonet::write_egonets_jsonl(out("egonets.jsonl"), egos);
    record_output("egonets.jsonl", egos.size());
  });
}

void Pipeline::write_structural() {
  const auto& egos = egonets();
  const std::size_t tau = selected_tau();
  stage("structmetrics", [&] {
    const auto hist = structural::tau_histogram(egos);
    csv::Writer th(out("tau_hist.csv"), {"tau", "n_egos", "fraction"});
    for (const auto& [t, n] : hist) {
      th.row({csv::field(t), csv::field(n), csv::field(static_cast<double>(n) / static_cast<double>(egos.size()))});
    }
    th.close();
    record_output("tau_hist.csv", th.rows());

    const auto sizes = structural::layer_stats(egos, tau);
    const auto ratios = structural::scaling_ratio_stats(egos, tau);
    const std::string ls_name = fmt::format("layer_stats_{}.csv", tau);
    csv::Writer ls(out(ls_name),
                   {"layer", "n_egos", "mean_size", "ci95", "scaling_ratio_mean", "scaling_ratio_ci95"});
    for (std::size_t i = 0; i < tau; ++i) {
      const double rm = i == 0 ? kNaN : ratios.mean[i - 1];
      const double rc = i == 0 ? kNaN : ratios.ci95[i - 1];
      ls.row({csv::field(i + 1), csv::field(sizes.n_egos), csv::field(sizes.mean[i]), csv::field(sizes.ci95[i]),
              csv::field(rm), csv::field(rc)});
    }
    ls.close();
    record_output(ls_name, ls.rows());

    const auto slopes = structural::layer_regression(egos, tau, cfg_.intercept);
    const std::string lr_name = fmt::format("layer_regression_{}.csv", tau);
    csv::Writer lr(out(lr_name), {"layer", "slope", "n_egos", "intercept"});
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      lr.row({csv::field(i + 1), csv::field(slopes[i]), csv::field(sizes.n_egos), cfg_.intercept ? "true" : "false"});
    }
    lr.close();
    record_output(lr_name, lr.rows());
  });
}

void Pipeline::write_topics() {
  const auto& m = topic_model();
  stage("report", [&] {
    topics::write_topic_model_json(out("topic_model.json"), m.model);
    record_output("topic_model.json", m.model.topic_ids.size());
    const auto& a = profile_assignments();
    topics::write_topic_assignments(out("assignments_merged.jsonl"), a);
    record_output("assignments_merged.jsonl", a.size());
  });
}

void Pipeline::write_profiles() {
  const auto& sem = semantics();
  stage("report", [&] {
    std::ofstream f(out("profiles.jsonl"), std::ios::binary);
    if (!f) throw Error("cannot write profiles.jsonl");
    auto encode = [](const std::optional<topics::SemanticProfile>& p) {
      if (!p) return ordered_json(nullptr);
      ordered_json j = ordered_json::object();
      for (const auto& [c, s] : p->shares) j[std::to_string(c)] = s;
      return j;
    };
    for (const auto& e : sem) {
      ordered_json j;
      j["user_id"] = e.user_id;
      j["tau"] = e.tau;
      j["rings"] = ordered_json::array();
      for (const auto& r : e.rings) j["rings"].push_back(encode(r));
      j["ego"] = encode(e.whole);
      f << j.dump() << '\n';
    }
    record_output("profiles.jsonl", sem.size());
  });
}

void Pipeline::write_semantic() {
  const std::size_t tau = selected_tau();
  const auto sel = selected();
  const auto& sem = semantics();
  const std::size_t n_topics = topic_model().model.topic_ids.size();
  stage("semmetrics", [&] {
    const auto scopes = scopes_with_ego(tau);

    csv::Writer tp(out("topics_per_ring.csv"),
                   {"tau", "scope", "n_egos", "excluded", "N_mean", "N_ci95", "N_norm_mean", "N_norm_ci95"});
    csv::Writer en(out("entropy.csv"), {"tau", "scope", "n_egos", "excluded", "H_mean", "H_ci95"});
    for (int s : scopes) {
      std::vector<double> n;
      std::vector<double> nn;
      std::vector<double> h;
      for (const auto* e : sel) {
        const auto* p = e->profile(s);
        const auto assigned = assigned_in(*e, s);
        if (!p || assigned <= 0) continue;
        const auto tc = semantic::topic_count(*p, static_cast<double>(assigned));
        n.push_back(static_cast<double>(tc.n));
        nn.push_back(tc.n_norm);
        h.push_back(semantic::entropy(*p));
      }
      const auto a = mean_ci(n);
      const auto b = mean_ci(nn);
      const auto c = mean_ci(h);
      const std::size_t excluded = sel.size() - n.size();
      tp.row({csv::field(tau), scope_label(s), csv::field(n.size()), csv::field(excluded), csv::field(a.mean),
              csv::field(a.ci95), csv::field(b.mean), csv::field(b.ci95)});
      en.row({csv::field(tau), scope_label(s), csv::field(h.size()), csv::field(excluded), csv::field(c.mean),
              csv::field(c.ci95)});
    }
    tp.close();
    en.close();
    record_output("topics_per_ring.csv", tp.rows());
    record_output("entropy.csv", en.rows());

    // Average ring-to-ring JS distance over egos whose rings all have a profile.
    semantic::Matrix js(tau, std::vector<double>(tau, 0.0));
    std::size_t js_egos = 0;
    for (const auto* e : sel) {
      std::vector<topics::SemanticProfile> rings;
      for (const auto& r : e->rings) {
        if (r) rings.push_back(*r);
      }
      if (rings.size() != tau) continue;
      const auto m = semantic::ring_distance_matrix(rings);
      for (std::size_t i = 0; i < tau; ++i) {
        for (std::size_t j = 0; j < tau; ++j) js[i][j] += m[i][j];
      }
      ++js_egos;
    }
    std::vector<std::string> header = {"ring"};
    for (std::size_t j = 0; j < tau; ++j) header.push_back(scope_label(static_cast<int>(j)));
    csv::Writer jw(out("js_matrix.csv"), header);
    for (std::size_t i = 0; i < tau; ++i) {
      std::vector<std::string> row = {scope_label(static_cast<int>(i))};
      for (std::size_t j = 0; j < tau; ++j) {
        row.push_back(csv::field(js_egos ? js[i][j] / static_cast<double>(js_egos) : kNaN));
      }
      jw.row(row);
    }
    jw.close();
    record_output("js_matrix.csv", jw.rows());
    manifest_["stages"]["semmetrics"]["js_matrix_egos"] = js_egos;
    manifest_["stages"]["semmetrics"]["js_matrix_excluded"] = sel.size() - js_egos;

    const auto tables = semantic::sigma_tables(sem, tau, cfg_.ttest);
    auto matrix = [&](const std::string& name, const std::vector<int>& xs, const std::vector<int>& ys, auto&& cell) {
      std::vector<std::string> hdr = {"x"};
      for (int y : ys) hdr.push_back(scope_label(y));
      csv::Writer w(out(name), hdr);
      for (int x : xs) {
        std::vector<std::string> row = {scope_label(x)};
        for (int y : ys) row.push_back(csv::field(cell(x, y)));
        w.row(row);
      }
      w.close();
      record_output(name, w.rows());
    };
    auto lookup = [](const auto& map, const auto& key) {
      auto it = map.find(key);
      if constexpr (std::is_same_v<std::decay_t<decltype(it->second)>, double>) {
        return it == map.end() ? kNaN : it->second;
      } else {
        return it == map.end() ? kNaN : it->second.value;
      }
    };
    std::vector<int> rings;
    for (int r = 0; r < static_cast<int>(tau); ++r) rings.push_back(r);
    matrix("pulling_power_S.csv", rings, rings, [&](int x, int y) {
      return x == y ? lookup(tables.S_top, semantic::ScopePair{y, y}) : lookup(tables.S_top_both, semantic::ScopePair{x, y});
    });
    matrix("pulling_power_S_bottom.csv", rings, rings, [&](int x, int y) {
      return x == y ? lookup(tables.S_bottom, y) : lookup(tables.S_top_bottom, semantic::ScopePair{x, y});
    });
    matrix("pulling_power_sigma.csv", rings, rings, [&](int x, int y) {
      return x == y ? kNaN : lookup(tables.sigma_top, semantic::ScopePair{x, y});
    });
    matrix("pulling_power_sigma_bottom.csv", rings, rings, [&](int x, int y) {
      return x == y ? kNaN : lookup(tables.sigma_bottom, semantic::ScopePair{x, y});
    });
    matrix("pulling_power_K.csv", scopes, scopes,
           [&](int x, int y) { return lookup(tables.K, semantic::ScopePair{x, y}); });

    csv::Writer cells(out("pulling_power_cells.csv"), {"table", "x", "y", "value", "n_egos", "excluded", "p_value"});
    auto agg_rows = [&](const std::string& name, const auto& map) {
      for (const auto& [key, a] : map) {
        const auto [x, y] = key;
        cells.row({name, scope_label(x), scope_label(y), csv::field(a.value), csv::field(a.n_egos),
                   csv::field(a.excluded), ""});
      }
    };
    agg_rows("K_top", tables.K);
    agg_rows("S_top", tables.S_top);
    for (const auto& [y, a] : tables.S_bottom) {
      cells.row({"S_bottom", scope_label(y), scope_label(y), csv::field(a.value), csv::field(a.n_egos),
                 csv::field(a.excluded), ""});
    }
    agg_rows("S_top_both", tables.S_top_both);
    agg_rows("S_top_bottom", tables.S_top_bottom);
    auto sigma_rows = [&](const std::string& name, const auto& map, const auto& cross) {
      for (const auto& [key, v] : map) {
        const auto [x, y] = key;
        const auto& a = cross.at(key);
        auto p = tables.p_values.find({name, x, y});
        cells.row({name, scope_label(x), scope_label(y), csv::field(v), csv::field(a.n_egos), csv::field(a.excluded),
                   p == tables.p_values.end() ? "" : csv::field(p->second)});
        if (auto w = tables.p_values.find({name + "_welch", x, y}); w != tables.p_values.end()) {
          cells.row({name + "_welch", scope_label(x), scope_label(y), csv::field(v), csv::field(a.n_egos),
                     csv::field(a.excluded), csv::field(w->second)});
        }
      }
    };
    sigma_rows("sigma_top", tables.sigma_top, tables.S_top_both);
    sigma_rows("sigma_bottom", tables.sigma_bottom, tables.S_top_bottom);
    cells.close();
    record_output("pulling_power_cells.csv", cells.rows());

    std::vector<topics::SemanticProfile> ring_profiles;
    csv::Writer dom(out("dominant_topics.csv"), {"user_id", "scope", "topic", "share"});
    csv::Writer splits(out("primary_splits.csv"),
                       {"user_id", "scope", "n_primary", "n_nonprimary", "break_value", "silhouette"});
    for (const auto* e : sel) {
      for (int s : scopes) {
        const auto* p = e->profile(s);
        if (!p) continue;
        if (s != semantic::kWholeEgo) ring_profiles.push_back(*p);
        auto best = p->shares.begin();
        for (auto it = p->shares.begin(); it != p->shares.end(); ++it) {
          if (it->second > best->second) best = it;
        }
        dom.row({e->user_id, scope_label(s), csv::field(best->first), csv::field(best->second)});
        if (const auto* sp = e->split(s)) {
          splits.row({e->user_id, scope_label(s), csv::field(sp->primary.size()), csv::field(sp->nonprimary.size()),
                      csv::field(sp->break_value), csv::field(sp->silhouette)});
        }
      }
    }
    dom.close();
    splits.close();
    record_output("dominant_topics.csv", dom.rows());
    record_output("primary_splits.csv", splits.rows());

    const auto curve = topx_coverage_curve(ring_profiles, n_topics);
    csv::Writer tx(out("topx_coverage.csv"), {"x", "coverage", "n_profiles", "mode"});
    for (std::size_t x = 0; x < curve.size(); ++x) {
      tx.row({csv::field(x + 1), csv::field(curve[x]), csv::field(ring_profiles.size()), topics::to_string(cfg_.mode)});
    }
    tx.close();
    record_output("topx_coverage.csv", tx.rows());

    auto& m = manifest_["stages"]["semmetrics"];
    m["egos_analyzed"] = sem.size();
    m["egos_with_selected_tau"] = sel.size();
  });
}

void Pipeline::write_null() {
  const std::size_t tau = selected_tau();
  const auto& egos = egonets();
  const auto& tables = topic_tables();
  const auto& sem = semantics();
  stage("nullmodel", [&] {
    std::vector<egonet::EgoNetwork> sel_egos;
    std::vector<topics::EgoTopicTable> sel_tables;
    std::vector<const semantic::EgoSemantics*> sel_sem;
    for (std::size_t i = 0; i < egos.size(); ++i) {
      if (egos[i].tau() != tau) continue;
      sel_egos.push_back(egos[i]);
      sel_tables.push_back(tables[i]);
      sel_sem.push_back(&sem[i]);
    }
    struct Acc {
      std::vector<double> real_nn, null_nn, real_h, null_h;
      std::size_t excluded = 0;
    };
    std::vector<Acc> acc(tau);
    csv::Writer per(out("null_metrics_egos.csv"),
                    {"user_id", "replicate", "ring", "real_N_norm", "null_N_norm", "real_H", "null_H"});
    for (std::size_t rep = 0; rep < cfg_.replicates; ++rep) {
      const auto nulls = nullmodel::shuffle_all(sel_egos, sel_tables, cfg_.seed, rep, exec_);
      for (std::size_t i = 0; i < nulls.size(); ++i) {
        const auto& e = *sel_sem[i];
        for (std::size_t r = 0; r < tau; ++r) {
          const auto* p = e.profile(static_cast<int>(r));
          const auto occ = nullmodel::weighted_occupancy(nulls[i], r);
          if (!p || e.assigned[r] <= 0 || occ <= 0) {
            ++acc[r].excluded;
            continue;
          }
          const auto np = nullmodel::null_ring_profile(nulls[i], r);
          const double real_nn = semantic::topic_count(*p, static_cast<double>(e.assigned[r])).n_norm;
          const double null_nn = semantic::topic_count(np, static_cast<double>(occ)).n_norm;
          const double real_h = semantic::entropy(*p);
          const double null_h = semantic::entropy(np);
          acc[r].real_nn.push_back(real_nn);
          acc[r].null_nn.push_back(null_nn);
          acc[r].real_h.push_back(real_h);
          acc[r].null_h.push_back(null_h);
          per.row({e.user_id, csv::field(rep), scope_label(static_cast<int>(r)), csv::field(real_nn),
                   csv::field(null_nn), csv::field(real_h), csv::field(null_h)});
        }
      }
    }
    per.close();
    record_output("null_metrics_egos.csv", per.rows());
    csv::Writer w(out("null_metrics.csv"), {"tau", "ring", "n_samples", "excluded", "replicates", "real_N_norm_mean",
                                            "null_N_norm_mean", "real_H_mean", "null_H_mean"});
    for (std::size_t r = 0; r < tau; ++r) {
      const auto& a = acc[r];
      w.row({csv::field(tau), scope_label(static_cast<int>(r)), csv::field(a.real_nn.size()), csv::field(a.excluded),
             csv::field(cfg_.replicates), csv::field(mean_or_nan(a.real_nn)), csv::field(mean_or_nan(a.null_nn)),
             csv::field(mean_or_nan(a.real_h)), csv::field(mean_or_nan(a.null_h))});
    }
    w.close();
    record_output("null_metrics.csv", w.rows());
    auto& m = manifest_["stages"]["nullmodel"];
    m["seed"] = cfg_.seed;
    m["replicates"] = cfg_.replicates;
    m["egos"] = sel_egos.size();
  });
}

void Pipeline::write_manifest() {
  stage("report", [&] {
    std::ofstream f(out("run_manifest.json"), std::ios::binary);
    if (!f) throw Error("cannot write run_manifest.json");
    f << manifest_.dump(2) << '\n';
  });
}

void Pipeline::run_all() {
  const std::string_view fields[] = {"tweets", "stopwords", "lemmas", "assignments"};
  stage("config", [&] { cfg_.validate(fields); });
  write_preprocess();
  write_egonets();
  write_structural();
  write_topics();
  write_profiles();
  write_semantic();
  write_null();
  write_manifest();
}

}  // namespace egolex::report
