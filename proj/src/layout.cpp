#include "hashjack/layout.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <sstream>

#include "hashjack/errors.hpp"
#include "hashjack/util.hpp"

namespace hashjack {

namespace {

constexpr double kMinDistance = 1e-4;
constexpr double kLocalSpeedK = 0.1;
constexpr double kMaxDisplacement = 10.0;
constexpr double kSpeedRaiseCap = 1.5;
constexpr std::size_t kAutoBarnesHutNodes = 10000;

struct Vec2 {
  double x = 0.0, y = 0.0;
};

// Quadtree over point masses for the Barnes-Hut repulsion path.
class QuadTree {
 public:
  QuadTree(const std::vector<Vec2>& pos, const std::vector<double>& mass) {
    double min_x = pos[0].x, max_x = pos[0].x, min_y = pos[0].y, max_y = pos[0].y;
    for (const auto& p : pos) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    double cx = (min_x + max_x) / 2.0, cy = (min_y + max_y) / 2.0;
    double half = std::max(max_x - min_x, max_y - min_y) / 2.0 + 1e-9;
    nodes_.push_back(Node{cx, cy, half});
    for (std::size_t i = 0; i < pos.size(); ++i) insert(0, pos[i], mass[i], 0);
    finalize(0);
  }

  // accumulated repulsion force on point p with mass m
  Vec2 repulsion(const Vec2& p, double m, double k_r, double theta) const {
    Vec2 f;
    accumulate(0, p, m, k_r, theta, f);
    return f;
  }

 private:
  struct Node {
    double cx, cy, half;
    double mass = 0.0;
    double mx = 0.0, my = 0.0;  // mass-weighted position sum, then center of mass
    int children = -1;          // index of first of 4 children, -1 = leaf
    int count = 0;
  };

  static constexpr int kMaxDepth = 48;

  void insert(int idx, const Vec2& p, double m, int depth) {
    Node& node = nodes_[static_cast<std::size_t>(idx)];
    node.mass += m;
    node.mx += m * p.x;
    node.my += m * p.y;
    node.count += 1;
    if (depth >= kMaxDepth) return;  // coincident points pile up in one cell
    if (node.count == 1) {
      first_point_[idx] = {p, m};
      return;
    }
    if (node.children == -1) {
      subdivide(idx);
      auto it = first_point_.find(idx);
      if (it != first_point_.end()) {
        auto [fp, fm] = it->second;
        first_point_.erase(it);
        descend(idx, fp, fm, depth);
      }
    }
    descend(idx, p, m, depth);
  }

  void descend(int idx, const Vec2& p, double m, int depth) {
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    int quadrant = (p.x >= node.cx ? 1 : 0) | (p.y >= node.cy ? 2 : 0);
    insert(node.children + quadrant, p, m, depth + 1);
  }

  void subdivide(int idx) {
    Node parent = nodes_[static_cast<std::size_t>(idx)];
    nodes_[static_cast<std::size_t>(idx)].children = static_cast<int>(nodes_.size());
    double h = parent.half / 2.0;
    for (int q = 0; q < 4; ++q) {
      double cx = parent.cx + ((q & 1) ? h : -h);
      double cy = parent.cy + ((q & 2) ? h : -h);
      nodes_.push_back(Node{cx, cy, h});
    }
  }

  void finalize(int idx) {
    Node& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.mass > 0.0) {
      node.mx /= node.mass;
      node.my /= node.mass;
    }
    if (node.children != -1)
      for (int q = 0; q < 4; ++q) finalize(node.children + q);
  }

  void accumulate(int idx, const Vec2& p, double m, double k_r, double theta, Vec2& f) const {
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.count == 0) return;
    double dx = p.x - node.mx;
    double dy = p.y - node.my;
    double dist = std::sqrt(dx * dx + dy * dy);
    bool is_leaf = node.children == -1;
    if (is_leaf || (2.0 * node.half) / std::max(dist, kMinDistance) < theta) {
      // the cell may contain p itself; its self-distance is ~0 and the
      // floor keeps the term finite, matching the exact path's guard
      if (dist < kMinDistance) {
        if (is_leaf && node.count == 1) return;  // p alone in its own cell
        dist = kMinDistance;
      }
      double force = k_r * m * node.mass / dist;
      f.x += force * dx / dist;
      f.y += force * dy / dist;
      return;
    }
    for (int q = 0; q < 4; ++q) accumulate(node.children + q, p, m, k_r, theta, f);
  }

  std::vector<Node> nodes_;
  std::map<int, std::pair<Vec2, double>> first_point_;
};

}  // namespace

LayoutResult forceatlas2(const RetweetGraph& graph, const LayoutParams& params,
                         const std::vector<std::pair<double, double>>* initial) {
  if (params.iterations < 1) throw ConfigError("layout iterations must be positive");
  if (params.scaling <= 0.0) throw ConfigError("layout scaling must be positive");
  if (params.gravity < 0.0) throw ConfigError("layout gravity must be non-negative");
  if (params.tolerance <= 0.0) throw ConfigError("layout tolerance must be positive");

  const std::size_t n = graph.accounts.size();
  LayoutResult result;
  if (n == 0) return result;
  if (initial && initial->size() != n)
    throw ConfigError("initial positions size does not match node count");

  std::vector<Vec2> pos(n);
  if (initial) {
    for (std::size_t i = 0; i < n; ++i) pos[i] = {(*initial)[i].first, (*initial)[i].second};
  } else {
    Rng rng(params.seed);
    const double radius = std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double angle = 2.0 * M_PI * rng.next_double();
      double r = radius * std::sqrt(rng.next_double());
      pos[i] = {r * std::cos(angle), r * std::sin(angle)};
    }
  }

  auto degrees = graph.undirected_degrees();
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = degrees[i] + 1.0;

  // symmetrized undirected edges for attraction
  std::map<std::pair<int, int>, double> sym;
  for (const auto& e : graph.edges) {
    auto key = e.src < e.dst ? std::make_pair(e.src, e.dst) : std::make_pair(e.dst, e.src);
    sym[key] += static_cast<double>(e.weight);
  }
  struct AttrEdge {
    int u, v;
    double w;
  };
  std::vector<AttrEdge> attr;
  attr.reserve(sym.size());
  for (const auto& [key, w] : sym) attr.push_back({key.first, key.second, w});

  const bool use_bh = params.barnes_hut.value_or(n > kAutoBarnesHutNodes);

  std::vector<Vec2> force(n), prev_force(n);
  double global_speed = 1.0;

  for (int iter = 0; iter < params.iterations; ++iter) {
    std::fill(force.begin(), force.end(), Vec2{});

    if (use_bh) {
      QuadTree tree(pos, mass);
      for (std::size_t i = 0; i < n; ++i) {
        Vec2 f = tree.repulsion(pos[i], mass[i], params.scaling, params.theta);
        force[i].x += f.x;
        force[i].y += f.y;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double dx = pos[i].x - pos[j].x;
          double dy = pos[i].y - pos[j].y;
          double dist = std::sqrt(dx * dx + dy * dy);
          if (dist < kMinDistance) dist = kMinDistance;
          double f = params.scaling * mass[i] * mass[j] / dist;
          double fx = f * dx / dist, fy = f * dy / dist;
          force[i].x += fx;
          force[i].y += fy;
          force[j].x -= fx;
          force[j].y -= fy;
        }
      }
    }

    if (params.gravity > 0.0) {
      // constant magnitude away from the origin, linearly damped inside
      // unit distance so the pull has a reachable fixed point
      for (std::size_t i = 0; i < n; ++i) {
        double dist = std::sqrt(pos[i].x * pos[i].x + pos[i].y * pos[i].y);
        if (dist > 1e-12) {
          double magnitude = params.gravity * mass[i] * std::min(1.0, dist);
          force[i].x -= magnitude * pos[i].x / dist;
          force[i].y -= magnitude * pos[i].y / dist;
        }
      }
    }

    for (const auto& e : attr) {
      auto u = static_cast<std::size_t>(e.u), v = static_cast<std::size_t>(e.v);
      double dx = pos[u].x - pos[v].x;
      double dy = pos[u].y - pos[v].y;
      double dist = std::sqrt(dx * dx + dy * dy);
      if (dist < kMinDistance) continue;
      double f = params.linlog ? e.w * std::log(1.0 + dist) / dist : e.w;
      force[u].x -= f * dx;
      force[u].y -= f * dy;
      force[v].x += f * dx;
      force[v].y += f * dy;
    }

    // adaptive speed: swinging penalizes oscillation, traction rewards
    // coherent motion
    double total_swinging = 0.0, weighted_swinging = 0.0, weighted_traction = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sx = force[i].x - prev_force[i].x, sy = force[i].y - prev_force[i].y;
      double tx = force[i].x + prev_force[i].x, ty = force[i].y + prev_force[i].y;
      double swing = std::sqrt(sx * sx + sy * sy);
      total_swinging += swing;
      weighted_swinging += mass[i] * swing;
      weighted_traction += mass[i] * 0.5 * std::sqrt(tx * tx + ty * ty);
    }
    if (weighted_swinging > 0.0) {
      double target = params.tolerance * weighted_traction / weighted_swinging;
      global_speed = std::min(target, kSpeedRaiseCap * global_speed);
    }

    for (std::size_t i = 0; i < n; ++i) {
      double sx = force[i].x - prev_force[i].x, sy = force[i].y - prev_force[i].y;
      double swing = std::sqrt(sx * sx + sy * sy);
      double speed = kLocalSpeedK * global_speed / (1.0 + global_speed * std::sqrt(swing));
      double fmag = std::sqrt(force[i].x * force[i].x + force[i].y * force[i].y);
      if (fmag * speed > kMaxDisplacement) speed = kMaxDisplacement / fmag;
      pos[i].x += force[i].x * speed;
      pos[i].y += force[i].y * speed;
      assert(std::isfinite(pos[i].x) && std::isfinite(pos[i].y));
    }
    prev_force = force;

    result.iterations_run = iter + 1;
    result.final_total_swinging = total_swinging;
    // a lone node keeps integrating down to its gravity fixed point
    if (n > 1 && total_swinging < 1e-4 * static_cast<double>(n)) break;
  }

  result.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.positions[i] = {pos[i].x, pos[i].y};
  return result;
}

void write_layout_csv(const RetweetGraph& graph, const LayoutResult& layout,
                      const Partition* partition, const PolarityMap* polarity,
                      const std::string& path) {
  std::ostringstream out;
  out << "account,x,y,community_id,polarity_label\n";
  for (int v = 0; v < graph.node_count(); ++v) {
    const auto sv = static_cast<std::size_t>(v);
    out << csv_escape(graph.account(v)) << ',' << format_double(layout.positions[sv].first)
        << ',' << format_double(layout.positions[sv].second) << ',';
    if (partition) out << partition->assignment[sv];
    out << ',';
    if (partition && polarity)
      out << to_string(polarity->label_of(partition->assignment[sv]));
    out << '\n';
  }
  write_file(path, out.str());
}

void write_layout_svg(const RetweetGraph& graph, const LayoutResult& layout,
                      const Partition* partition, const std::string& path) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& [x, y] : layout.positions) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double scale = 960.0 / span;
  const double pad = 20.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\">\n";
  for (const auto& e : graph.edges) {
    const auto& p = layout.positions[static_cast<std::size_t>(e.src)];
    const auto& q = layout.positions[static_cast<std::size_t>(e.dst)];
    out << "  <line x1=\"" << format_double(pad + (p.first - min_x) * scale) << "\" y1=\""
        << format_double(pad + (p.second - min_y) * scale) << "\" x2=\""
        << format_double(pad + (q.first - min_x) * scale) << "\" y2=\""
        << format_double(pad + (q.second - min_y) * scale)
        << "\" stroke=\"#cccccc\" stroke-width=\"0.3\"/>\n";
  }
  for (int v = 0; v < graph.node_count(); ++v) {
    const auto& p = layout.positions[static_cast<std::size_t>(v)];
    const char* color = "#333333";
    if (partition)
      color = kColors[static_cast<std::size_t>(partition->assignment[static_cast<std::size_t>(v)]) %
                      (sizeof(kColors) / sizeof(kColors[0]))];
    out << "  <circle cx=\"" << format_double(pad + (p.first - min_x) * scale) << "\" cy=\""
        << format_double(pad + (p.second - min_y) * scale) << "\" r=\"2.5\" fill=\"" << color
        << "\"/>\n";
  }
  out << "</svg>\n";
  write_file(path, out.str());
}

}  // namespace hashjack
