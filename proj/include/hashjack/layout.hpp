#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hashjack/community.hpp"
#include "hashjack/graph.hpp"
#include "hashjack/polarity.hpp"

namespace hashjack {

struct LayoutParams {
  double scaling = 2.0;       // repulsion constant k_r
  double gravity = 1.0;
  bool linlog = false;
  int iterations = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1.0;     // global speed control
  // Repulsion path: exact O(n^2) unless forced, Barnes-Hut (theta 1.2)
  // when set or when the graph exceeds 10k nodes.
  std::optional<bool> barnes_hut;
  double theta = 1.2;
};

struct LayoutResult {
  std::vector<std::pair<double, double>> positions;  // by node index
  int iterations_run = 0;
  double final_total_swinging = 0.0;
};

// ForceAtlas2: weighted linear (or linlog) attraction along edges,
// degree-scaled repulsion k_r*(deg_u+1)*(deg_v+1)/d, constant-magnitude
// gravity toward the origin, adaptive speed from swinging vs traction.
// Deterministic for a fixed seed; initial positions are drawn on the unit
// disk scaled by sqrt(n). Runs `iterations` steps or stops early once
// total swinging falls below 1e-4 * n.
LayoutResult forceatlas2(const RetweetGraph& graph, const LayoutParams& params = {},
                         const std::vector<std::pair<double, double>>* initial = nullptr);

// account,x,y,community_id,polarity_label rows sorted by account.
// partition/polarity may be null; fields are then empty.
void write_layout_csv(const RetweetGraph& graph, const LayoutResult& layout,
                      const Partition* partition, const PolarityMap* polarity,
                      const std::string& path);

// Minimal static rendering of a layout, dots colored by community.
void write_layout_svg(const RetweetGraph& graph, const LayoutResult& layout,
                      const Partition* partition, const std::string& path);

}  // namespace hashjack
