#pragma once

// Shared helpers for the unit and acceptance suites: fixture graphs,
// independent oracles, temp dirs and small file utilities.

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hashjack/graph.hpp"
#include "hashjack/ingest.hpp"
#include "hashjack/polarity.hpp"
#include "hashjack/util.hpp"

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("hashjack_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- graph fixtures -------------------------------------------------------

// Build a graph directly from weighted directed edges.
inline hashjack::RetweetGraph make_graph(
    const std::vector<std::tuple<std::string, std::string, long long>>& edges,
    const std::string& tag = "t") {
  std::set<std::string> nodes;
  for (const auto& [s, t, w] : edges) {
    nodes.insert(s);
    nodes.insert(t);
  }
  hashjack::RetweetGraph g;
  g.hashtag = tag;
  g.accounts.assign(nodes.begin(), nodes.end());
  std::map<std::pair<int, int>, long long> agg;
  for (const auto& [s, t, w] : edges) agg[{*g.index_of(s), *g.index_of(t)}] += w;
  for (const auto& [key, w] : agg) g.edges.push_back({key.first, key.second, w});
  return g;
}

// Two disjoint triangles: {a0,a1,a2} and {b0,b1,b2}.
inline hashjack::RetweetGraph two_triangles() {
  return make_graph({{"a0", "a1", 1},
                     {"a1", "a2", 1},
                     {"a2", "a0", 1},
                     {"b0", "b1", 1},
                     {"b1", "b2", 1},
                     {"b2", "b0", 1}});
}

// k-cliques (unit weights) joined by single bridge edges in a chain.
inline hashjack::RetweetGraph cliques_with_bridges(const std::vector<int>& sizes) {
  std::vector<std::tuple<std::string, std::string, long long>> edges;
  auto name = [](int c, int i) { return "c" + std::to_string(c) + "_" + std::to_string(i); };
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (int i = 0; i < sizes[c]; ++i)
      for (int j = i + 1; j < sizes[c]; ++j)
        edges.emplace_back(name(static_cast<int>(c), i), name(static_cast<int>(c), j), 1);
    if (c > 0) edges.emplace_back(name(static_cast<int>(c - 1), 0), name(static_cast<int>(c), 0), 1);
  }
  return make_graph(edges);
}

// Seeded random digraph on n nodes; edge probability p, weights 1..3.
inline hashjack::RetweetGraph random_graph(int n, double p, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  auto unit = [&]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  std::vector<std::tuple<std::string, std::string, long long>> edges;
  auto name = [](int i) { return "n" + std::to_string(i); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (unit() < p) edges.emplace_back(name(i), name(j), 1 + static_cast<long long>(eng() % 3));
    }
  if (edges.empty()) edges.emplace_back(name(0), name(1 % std::max(n, 2)), 1);
  return make_graph(edges);
}

// ---- independent oracles ---------------------------------------------------

// Direct double-sum modularity: Q = (1/2m) sum_ij (A_ij - g k_i k_j / 2m)
// delta(c_i, c_j) over the symmetrized adjacency matrix. Kept deliberately
// separate from the production community-sum implementation.
inline double modularity_pairwise(const hashjack::RetweetGraph& g,
                                  const std::vector<int>& assign, double resolution = 1.0) {
  const int n = g.node_count();
  std::vector<std::vector<double>> adj(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (const auto& e : g.edges) {
    adj[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.dst)] +=
        static_cast<double>(e.weight);
    adj[static_cast<std::size_t>(e.dst)][static_cast<std::size_t>(e.src)] +=
        static_cast<double>(e.weight);
  }
  double two_m = 0.0;
  std::vector<double> k(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      k[static_cast<std::size_t>(i)] += adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      two_m += adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  if (two_m <= 0.0) return 0.0;
  double q = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (assign[static_cast<std::size_t>(i)] != assign[static_cast<std::size_t>(j)]) continue;
      q += adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
           resolution * k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(j)] / two_m;
    }
  return q / two_m;
}

// Inverse standard normal CDF by bisection on erfc; independent of the
// production rational-approximation path.
inline double normal_quantile_bisect(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2.0;
    double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    if (cdf < p) lo = mid;
    else hi = mid;
  }
  return (lo + hi) / 2.0;
}

inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, double> cont;
  std::map<int, double> row, col;
  for (std::size_t i = 0; i < n; ++i) {
    cont[{a[i], b[i]}] += 1;
    row[a[i]] += 1;
    col[b[i]] += 1;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_cont = 0, sum_row = 0, sum_col = 0;
  for (const auto& [k, v] : cont) sum_cont += choose2(v);
  for (const auto& [k, v] : row) sum_row += choose2(v);
  for (const auto& [k, v] : col) sum_col += choose2(v);
  double total = choose2(static_cast<double>(n));
  double expected = sum_row * sum_col / total;
  double max_index = (sum_row + sum_col) / 2.0;
  if (max_index == expected) return 1.0;
  return (sum_cont - expected) / (max_index - expected);
}

// ---- published audit sample ------------------------------------------------

// The 29-row hand-coded sample comparing cluster assignment with content
// sentiment, in print order; '?' marks undecided rows.
inline std::vector<std::pair<hashjack::ClusterLabel, hashjack::Sentiment>> audit_sample_rows() {
  using hashjack::ClusterLabel;
  using hashjack::Sentiment;
  static const std::vector<std::pair<char, char>> kRows = {
      {'P', '+'}, {'A', '-'}, {'A', '-'}, {'A', '-'}, {'P', '+'}, {'P', '+'}, {'P', '+'},
      {'A', '-'}, {'A', '-'}, {'P', '+'}, {'A', '-'}, {'A', '-'}, {'P', '?'}, {'P', '+'},
      {'P', '?'}, {'P', '+'}, {'P', '+'}, {'P', '+'}, {'P', '+'}, {'A', '-'}, {'A', '-'},
      {'P', '+'}, {'P', '?'}, {'P', '-'}, {'A', '?'}, {'A', '-'}, {'P', '?'}, {'A', '-'},
      {'A', '-'},
  };
  std::vector<std::pair<ClusterLabel, Sentiment>> rows;
  for (auto [cluster, sentiment] : kRows) {
    ClusterLabel l = cluster == 'P' ? ClusterLabel::Pro : ClusterLabel::Contra;
    Sentiment s = sentiment == '+'   ? Sentiment::Positive
                  : sentiment == '-' ? Sentiment::Negative
                                     : Sentiment::Unclear;
    rows.emplace_back(l, s);
  }
  return rows;
}

// ---- record helpers -----------------------------------------------------------

inline hashjack::TweetRecord retweet(const std::string& id, const std::string& author,
                                     const std::string& rt_author,
                                     const std::vector<std::string>& tags,
                                     std::int64_t ts = 1527465600) {
  hashjack::TweetRecord r;
  r.id = id;
  r.author = author;
  r.rt_author = rt_author;
  r.rt_id = "orig_" + id;
  r.tags = tags;
  std::sort(r.tags.begin(), r.tags.end());
  r.ts = ts;
  return r;
}

inline hashjack::TweetRecord original(const std::string& id, const std::string& author,
                                      const std::vector<std::string>& tags,
                                      std::int64_t ts = 1527465600) {
  hashjack::TweetRecord r;
  r.id = id;
  r.author = author;
  r.tags = tags;
  std::sort(r.tags.begin(), r.tags.end());
  r.ts = ts;
  return r;
}

}  // namespace testutil
