#include "egolex/egonet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "egolex/error.hpp"

namespace egolex::egonet {

EgoNetwork::EgoNetwork(std::string user_id, std::vector<std::vector<RingWord>> rings, double bandwidth,
                       double window_years)
    : user_id_(std::move(user_id)),
      rings_(std::move(rings)),
      bandwidth_(bandwidth),
      window_years_(window_years) {
  std::size_t cumulative = 0;
  for (auto& ring : rings_) {
    std::sort(ring.begin(), ring.end(), [](const RingWord& a, const RingWord& b) {
      return a.count != b.count ? a.count > b.count : a.lemma < b.lemma;
    });
    cumulative += ring.size();
    layer_sizes_.push_back(cumulative);
    std::int64_t occ = 0;
    for (const auto& w : ring) occ += w.count;
    occupancy_.push_back(occ);
  }
}

std::vector<std::string> EgoNetwork::layer(std::size_t i) const {
  if (i >= rings_.size()) throw std::out_of_range("layer index");
  std::vector<std::string> out;
  for (std::size_t r = 0; r <= i; ++r) {
    for (const auto& w : rings_[r]) out.push_back(w.lemma);
  }
  return out;
}

std::optional<std::size_t> EgoNetwork::ring_of(const std::string& lemma) const {
  for (std::size_t r = 0; r < rings_.size(); ++r) {
    for (const auto& w : rings_[r]) {
      if (w.lemma == lemma) return r;
    }
  }
  return std::nullopt;
}

std::int64_t EgoNetwork::total_occurrences() const {
  std::int64_t n = 0;
  for (auto o : occupancy_) n += o;
  return n;
}

EgoNetwork build_ego_network(const lex::WordCounts& wc, const BuildOptions& opts, Exec exec) {
  if (wc.empty()) throw DataError(fmt::format("ego '{}' has no words", wc.user_id));
  if (!(wc.window_years > 0.0)) throw DataError("window must be positive");
  std::vector<double> log_freq;
  std::vector<const std::pair<const std::string, std::int64_t>*> entries;
  log_freq.reserve(wc.counts.size());
  // ln(n / T) = ln n - ln T. The common shift cannot change the clustering,
  // and leaving it out keeps ring membership bitwise independent of T.
  for (const auto& kv : wc.counts) {
    log_freq.push_back(std::log(static_cast<double>(kv.second)));
    entries.push_back(&kv);
  }
  const auto ms = meanshift::mean_shift_1d(log_freq, opts.bandwidth, opts.bandwidth_quantile, exec);
  std::vector<std::vector<RingWord>> rings(ms.modes.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    rings[static_cast<std::size_t>(ms.labels[i])].push_back({entries[i]->first, entries[i]->second});
  }
  return EgoNetwork(wc.user_id, std::move(rings), ms.bandwidth, wc.window_years);
}

std::vector<EgoNetwork> build_all(std::span<const lex::WordCounts> counts, const BuildOptions& opts,
                                  Exec exec) {
  std::vector<const lex::WordCounts*> nonempty;
  for (const auto& wc : counts) {
    if (!wc.empty()) nonempty.push_back(&wc);
  }
  std::vector<EgoNetwork> out(nonempty.size());
  const auto n = static_cast<std::ptrdiff_t>(nonempty.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = build_ego_network(*nonempty[i], opts, Exec::serial);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = build_ego_network(*nonempty[i], opts, Exec::serial);
  }
  return out;
}

std::vector<double> scaling_ratios(std::span<const std::size_t> layer_sizes) {
  std::vector<double> out;
  for (std::size_t i = 1; i < layer_sizes.size(); ++i) {
    out.push_back(static_cast<double>(layer_sizes[i]) / static_cast<double>(layer_sizes[i - 1]));
  }
  return out;
}

std::vector<double> scaling_ratios(const EgoNetwork& ego) { return scaling_ratios(ego.layer_sizes()); }

std::string to_json_line(const EgoNetwork& ego) {
  nlohmann::json rings = nlohmann::json::array();
  for (const auto& ring : ego.rings()) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& w : ring) r.push_back(nlohmann::json::array({w.lemma, w.count}));
    rings.push_back(std::move(r));
  }
  nlohmann::ordered_json obj;
  obj["user_id"] = ego.user_id();
  obj["tau"] = ego.tau();
  obj["rings"] = std::move(rings);
  return obj.dump();
}

EgoNetwork from_json_line(const std::string& line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
    obj.at("user_id").get<std::string>();
    obj.at("rings").at(0);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("egonet record: {}", e.what()));
  }
  const auto tau = obj.at("tau").get<std::size_t>();
  std::vector<std::vector<RingWord>> rings;
  for (const auto& r : obj.at("rings")) {
    std::vector<RingWord> ring;
    for (const auto& w : r) ring.push_back({w.at(0).get<std::string>(), w.at(1).get<std::int64_t>()});
    rings.push_back(std::move(ring));
  }
  if (rings.size() != tau) throw DataError("egonet record: tau does not match ring count");
  return EgoNetwork(obj.at("user_id").get<std::string>(), std::move(rings));
}

void write_egonets_jsonl(const std::filesystem::path& path, std::span<const EgoNetwork> egos) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  for (const auto& e : egos) out << to_json_line(e) << '\n';
}

std::vector<EgoNetwork> read_egonets_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::vector<EgoNetwork> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(from_json_line(line));
    } catch (const std::exception& e) {
      throw DataError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

}  // namespace egolex::egonet
