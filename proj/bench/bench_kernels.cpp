// Times the serial reference and OpenMP paths of the parallel kernels and
// checks that they agree bit for bit.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "egolex/egonet.hpp"
#include "egolex/lexing.hpp"
#include "egolex/meanshift.hpp"
#include "egolex/nullmodel.hpp"
#include "egolex/parallel.hpp"
#include "egolex/tfidf.hpp"

namespace {

template <class F>
double seconds(F&& f, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  fmt::print("{:<24} serial {:>9.4f}s  parallel {:>9.4f}s  speedup {:>5.2f}x  {}\n", name, serial, parallel,
             serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  egolex::apply_thread_env();
  fmt::print("threads: {}\n", egolex::thread_count());
  egolex::nullmodel::Rng rng(12345);
  auto uniform = [&] { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; };

  // Mean shift over many distinct values.
  std::vector<double> pts(20000);
  for (auto& p : pts) p = std::log(2.0 + std::floor(std::exp(8.0 * uniform())));
  const auto wp = egolex::meanshift::WeightedPoints::from(pts);
  std::vector<double> a(wp.values.size());
  std::vector<double> b(wp.values.size());
  const double h = egolex::meanshift::estimate_bandwidth(pts);
  const double ms_s = seconds([&] { egolex::meanshift::shift_seeds_serial(wp, wp.values, h, a); });
  const double ms_p = seconds([&] { egolex::meanshift::shift_seeds_parallel(wp, wp.values, h, b); });
  report("mean shift seeds", ms_s, ms_p, a == b);

  // Cosine matrix over random sparse documents.
  std::vector<egolex::tfidf::TermCounts> docs(600);
  for (auto& d : docs) {
    std::uint32_t term = 0;
    while (true) {
      term += 1 + static_cast<std::uint32_t>(rng.below(40));
      if (term > 20000) break;
      d.emplace_back(term, 1 + static_cast<std::int64_t>(rng.below(9)));
    }
  }
  const auto vecs = egolex::tfidf::vectorize(docs);
  std::vector<double> ms;
  std::vector<double> mp;
  const double sim_s = seconds([&] { ms = egolex::tfidf::similarity_matrix_serial(vecs); });
  const double sim_p = seconds([&] { mp = egolex::tfidf::similarity_matrix_parallel(vecs); });
  report("tf-idf cosine matrix", sim_s, sim_p, ms == mp);

  // Ego network construction over many egos.
  std::vector<egolex::lex::WordCounts> counts(400);
  for (std::size_t e = 0; e < counts.size(); ++e) {
    counts[e].user_id = fmt::format("u{:04}", e);
    for (int w = 0; w < 1500; ++w) {
      counts[e].counts[fmt::format("w{}", w)] = 2 + static_cast<std::int64_t>(std::exp(6.0 * uniform()));
    }
  }
  std::vector<egolex::egonet::EgoNetwork> es;
  std::vector<egolex::egonet::EgoNetwork> ep;
  const double eg_s = seconds([&] { es = egolex::egonet::build_all(counts, {}, egolex::Exec::serial); }, 1);
  const double eg_p = seconds([&] { ep = egolex::egonet::build_all(counts, {}, egolex::Exec::parallel); }, 1);
  bool same = es.size() == ep.size();
  for (std::size_t i = 0; same && i < es.size(); ++i) same = es[i].rings() == ep[i].rings();
  report("ego network build", eg_s, eg_p, same);
  return 0;
}
