#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hashjack/ingest.hpp"

namespace hashjack {

// Weighted directed retweet network for one hashtag. Edge (a -> b, w)
// records that account a retweeted account b exactly w times within the
// slice. Node indices are positions in the lexicographically sorted
// account list, so identical node sets always index identically.
struct RetweetGraph {
  struct Edge {
    int src = 0;
    int dst = 0;
    std::int64_t weight = 0;
  };

  std::string hashtag;
  std::vector<std::string> accounts;  // sorted; index == node id
  std::vector<Edge> edges;            // sorted by (src, dst); no self-loops
  std::uint64_t self_retweets_dropped = 0;

  int node_count() const { return static_cast<int>(accounts.size()); }
  const std::string& account(int idx) const { return accounts[static_cast<std::size_t>(idx)]; }
  std::optional<int> index_of(const std::string& account) const;
  std::int64_t total_weight() const;

  // weighted in-degree per node
  std::vector<std::int64_t> in_weights() const;
  // number of distinct neighbors per node, direction ignored
  std::vector<int> undirected_degrees() const;
};

struct RankedAccounts {
  // (account, incoming retweet weight), non-increasing by weight,
  // ties lexicographic.
  std::vector<std::pair<std::string, std::int64_t>> entries;
};

RetweetGraph build_retweet_graph(const std::vector<TweetRecord>& records,
                                 const std::string& hashtag);

RankedAccounts top_retweeted(const RetweetGraph& graph, int k);

// Subgraph induced by the largest weakly connected component; among
// size ties, the component containing the lexicographically smallest
// account.
RetweetGraph largest_component(const RetweetGraph& graph);

// source,target,weight rows sorted by (source, target).
void write_edges_csv(const RetweetGraph& graph, const std::string& path);
RetweetGraph read_edges_csv(const std::string& path, const std::string& hashtag);

// Optional per-node attributes are attached when provided.
struct GraphmlNodeAttrs {
  const std::vector<std::pair<double, double>>* coords = nullptr;
  const std::vector<int>* community = nullptr;
  const std::vector<std::string>* polarity = nullptr;
};
void write_graphml(const RetweetGraph& graph, const std::string& path,
                   const GraphmlNodeAttrs& attrs = {});

}  // namespace hashjack
