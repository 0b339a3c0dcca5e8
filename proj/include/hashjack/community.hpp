#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hashjack/graph.hpp"

namespace hashjack {

// Node -> community assignment with canonical ids: communities are
// numbered by decreasing size, ties by smallest member account.
struct Partition {
  std::vector<int> assignment;       // by node index
  double modularity = 0.0;
  std::vector<int> community_sizes;  // by community id

  int community_count() const { return static_cast<int>(community_sizes.size()); }
  std::unordered_map<std::string, int> account_map(const RetweetGraph& graph) const;
};

struct LouvainParams {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  int max_passes = 100;
  double min_gain = 1e-9;
  // Greedy local moves are order-dependent; the algorithm is restarted
  // with this many derived visit orders and the best partition kept.
  int restarts = 8;
};

// One entry per accepted local move; delta is the exact change of Q at
// the original graph's scale, so initial Q + sum(deltas) = final Q.
struct LouvainAudit {
  std::vector<double> move_gains;
};

// Newman-Girvan modularity on the symmetrized weighted graph:
//   Q = sum_c ( w_c / m  -  resolution * (d_c / 2m)^2 )
// with m the total symmetrized weight, w_c the intra-community weight and
// d_c the community degree. Graphs without edges score 0 by convention.
double modularity(const RetweetGraph& graph, const std::vector<int>& assignment,
                  double resolution = 1.0);

// Account-keyed variant; throws AnalysisError naming any node missing
// from the assignment.
double modularity(const RetweetGraph& graph,
                  const std::unordered_map<std::string, int>& assignment,
                  double resolution = 1.0);

// Two-phase Louvain: seeded-shuffle local moves, then aggregation, until
// a pass gains no more than min_gain. Deterministic for a fixed
// (graph, params).
Partition louvain(const RetweetGraph& graph, const LouvainParams& params = {},
                  LouvainAudit* audit = nullptr);

// Exhaustive global maximum over all set partitions; the test oracle.
// Refuses graphs with more than 12 nodes.
Partition brute_force_partition(const RetweetGraph& graph, double resolution = 1.0);

// Canonicalize an arbitrary assignment (dense ids, size-then-account
// order) and fill in sizes and the recomputed modularity.
Partition canonicalize_partition(const RetweetGraph& graph, const std::vector<int>& assignment,
                                 double resolution = 1.0);

// account,community_id rows sorted by account.
void write_communities_csv(const RetweetGraph& graph, const Partition& partition,
                           const std::string& path);
Partition read_communities_csv(const RetweetGraph& graph, const std::string& path,
                               double resolution = 1.0);

}  // namespace hashjack
