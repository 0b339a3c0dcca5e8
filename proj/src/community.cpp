#include "hashjack/community.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hashjack/errors.hpp"
#include "hashjack/util.hpp"

namespace hashjack {

namespace {

// Undirected weighted view used by all modularity math. Self-loop weight
// counts once in total_weight and twice in the node degree, so community
// aggregation preserves Q exactly.
struct SymGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> nbrs;  // u -> (v, w), v != u
  std::vector<double> self_loop;
  std::vector<double> degree;
  double total_weight = 0.0;  // m

  static SymGraph from(const RetweetGraph& g) {
    SymGraph s;
    s.n = g.node_count();
    s.nbrs.resize(static_cast<std::size_t>(s.n));
    s.self_loop.assign(static_cast<std::size_t>(s.n), 0.0);
    s.degree.assign(static_cast<std::size_t>(s.n), 0.0);
    std::map<std::pair<int, int>, double> sym;
    for (const auto& e : g.edges) {
      auto key = e.src < e.dst ? std::make_pair(e.src, e.dst) : std::make_pair(e.dst, e.src);
      sym[key] += static_cast<double>(e.weight);
    }
    for (const auto& [key, w] : sym) {
      s.nbrs[static_cast<std::size_t>(key.first)].emplace_back(key.second, w);
      s.nbrs[static_cast<std::size_t>(key.second)].emplace_back(key.first, w);
      s.degree[static_cast<std::size_t>(key.first)] += w;
      s.degree[static_cast<std::size_t>(key.second)] += w;
      s.total_weight += w;
    }
    return s;
  }

  double modularity_of(const std::vector<int>& assign, double resolution) const {
    if (total_weight <= 0.0) return 0.0;
    int n_comm = 0;
    for (int c : assign) n_comm = std::max(n_comm, c + 1);
    std::vector<double> w_in(static_cast<std::size_t>(n_comm), 0.0);
    std::vector<double> d_tot(static_cast<std::size_t>(n_comm), 0.0);
    for (int u = 0; u < n; ++u) {
      auto cu = static_cast<std::size_t>(assign[static_cast<std::size_t>(u)]);
      d_tot[cu] += degree[static_cast<std::size_t>(u)];
      w_in[cu] += self_loop[static_cast<std::size_t>(u)];
      for (const auto& [v, w] : nbrs[static_cast<std::size_t>(u)])
        if (v > u && assign[static_cast<std::size_t>(v)] == assign[static_cast<std::size_t>(u)])
          w_in[cu] += w;
    }
    const double m = total_weight;
    double q = 0.0;
    for (std::size_t c = 0; c < w_in.size(); ++c) {
      double frac = d_tot[c] / (2.0 * m);
      q += w_in[c] / m - resolution * frac * frac;
    }
    return q;
  }
};

void check_assignment(const RetweetGraph& graph, const std::vector<int>& assignment) {
  if (assignment.size() != graph.accounts.size())
    throw AnalysisError("assignment covers " + std::to_string(assignment.size()) +
                        " nodes, graph has " + std::to_string(graph.accounts.size()));
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] < 0)
      throw AnalysisError("node missing from assignment: " + graph.accounts[i]);
}

// One Louvain level: seeded-shuffle sweeps of greedy local moves on `sg`.
// Gains are tracked at original-graph scale via `audit`.
bool local_move_phase(const SymGraph& sg, std::vector<int>& comm, double resolution,
                      double min_gain, Rng& rng, LouvainAudit* audit) {
  const double m = sg.total_weight;
  const double two_m = 2.0 * m;
  std::vector<double> comm_tot(static_cast<std::size_t>(sg.n), 0.0);
  for (int u = 0; u < sg.n; ++u)
    comm_tot[static_cast<std::size_t>(comm[static_cast<std::size_t>(u)])] +=
        sg.degree[static_cast<std::size_t>(u)];

  std::vector<int> order(static_cast<std::size_t>(sg.n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> nbr_weight(static_cast<std::size_t>(sg.n), 0.0);
  std::vector<int> touched;

  bool any_move = false;
  bool moved_in_sweep = true;
  while (moved_in_sweep) {
    moved_in_sweep = false;
    rng.shuffle(order);
    for (int u : order) {
      const auto su = static_cast<std::size_t>(u);
      const int old_c = comm[su];
      const double k_u = sg.degree[su];

      touched.clear();
      for (const auto& [v, w] : sg.nbrs[su]) {
        int c = comm[static_cast<std::size_t>(v)];
        if (nbr_weight[static_cast<std::size_t>(c)] == 0.0 &&
            std::find(touched.begin(), touched.end(), c) == touched.end())
          touched.push_back(c);
        nbr_weight[static_cast<std::size_t>(c)] += w;
      }

      // gain of membership in c, relative to u isolated: k_{u,c} - r*tot_c*k_u/2m
      comm_tot[static_cast<std::size_t>(old_c)] -= k_u;
      const double stay_gain = nbr_weight[static_cast<std::size_t>(old_c)] -
                               resolution * comm_tot[static_cast<std::size_t>(old_c)] * k_u / two_m;

      int best_c = old_c;
      double best_gain = stay_gain;
      for (int c : touched) {
        if (c == old_c) continue;
        double gain = nbr_weight[static_cast<std::size_t>(c)] -
                      resolution * comm_tot[static_cast<std::size_t>(c)] * k_u / two_m;
        if (gain > best_gain || (gain == best_gain && c < best_c)) {
          best_gain = gain;
          best_c = c;
        }
      }

      const double delta_q = (best_gain - stay_gain) * 2.0 / two_m;
      if (best_c != old_c && delta_q >= min_gain && delta_q > 0.0) {
        comm[su] = best_c;
        comm_tot[static_cast<std::size_t>(best_c)] += k_u;
        moved_in_sweep = true;
        any_move = true;
        if (audit) audit->move_gains.push_back(delta_q);
      } else {
        comm_tot[static_cast<std::size_t>(old_c)] += k_u;
      }

      for (int c : touched) nbr_weight[static_cast<std::size_t>(c)] = 0.0;
    }
  }
  return any_move;
}

// Collapse communities into supernodes; intra weight becomes a self-loop.
SymGraph aggregate(const SymGraph& sg, const std::vector<int>& comm, std::vector<int>& relabel) {
  relabel.assign(static_cast<std::size_t>(sg.n), -1);
  int next = 0;
  for (int u = 0; u < sg.n; ++u) {
    int c = comm[static_cast<std::size_t>(u)];
    if (relabel[static_cast<std::size_t>(c)] == -1) relabel[static_cast<std::size_t>(c)] = next++;
  }

  SymGraph out;
  out.n = next;
  out.nbrs.resize(static_cast<std::size_t>(next));
  out.self_loop.assign(static_cast<std::size_t>(next), 0.0);
  out.degree.assign(static_cast<std::size_t>(next), 0.0);
  out.total_weight = sg.total_weight;

  std::map<std::pair<int, int>, double> agg;
  for (int u = 0; u < sg.n; ++u) {
    const auto su = static_cast<std::size_t>(u);
    int cu = relabel[static_cast<std::size_t>(comm[su])];
    out.self_loop[static_cast<std::size_t>(cu)] += sg.self_loop[su];
    for (const auto& [v, w] : sg.nbrs[su]) {
      if (v < u) continue;
      int cv = relabel[static_cast<std::size_t>(comm[static_cast<std::size_t>(v)])];
      if (cu == cv) out.self_loop[static_cast<std::size_t>(cu)] += w;
      else agg[cu < cv ? std::make_pair(cu, cv) : std::make_pair(cv, cu)] += w;
    }
  }
  for (const auto& [key, w] : agg) {
    out.nbrs[static_cast<std::size_t>(key.first)].emplace_back(key.second, w);
    out.nbrs[static_cast<std::size_t>(key.second)].emplace_back(key.first, w);
    out.degree[static_cast<std::size_t>(key.first)] += w;
    out.degree[static_cast<std::size_t>(key.second)] += w;
  }
  for (int c = 0; c < out.n; ++c)
    out.degree[static_cast<std::size_t>(c)] += 2.0 * out.self_loop[static_cast<std::size_t>(c)];
  return out;
}

}  // namespace

double modularity(const RetweetGraph& graph, const std::vector<int>& assignment,
                  double resolution) {
  check_assignment(graph, assignment);
  return SymGraph::from(graph).modularity_of(assignment, resolution);
}

double modularity(const RetweetGraph& graph,
                  const std::unordered_map<std::string, int>& assignment, double resolution) {
  std::vector<int> assign(graph.accounts.size(), -1);
  for (std::size_t i = 0; i < graph.accounts.size(); ++i) {
    auto it = assignment.find(graph.accounts[i]);
    if (it == assignment.end())
      throw AnalysisError("node missing from assignment: " + graph.accounts[i]);
    assign[i] = it->second;
  }
  return modularity(graph, assign, resolution);
}

Partition canonicalize_partition(const RetweetGraph& graph, const std::vector<int>& assignment,
                                 double resolution) {
  check_assignment(graph, assignment);
  int n_comm = 0;
  for (int c : assignment) n_comm = std::max(n_comm, c + 1);

  struct CommInfo {
    int old_id;
    int size = 0;
    int smallest_member = -1;  // node index; accounts sorted, so min index = min account
  };
  std::vector<CommInfo> infos(static_cast<std::size_t>(n_comm));
  for (int c = 0; c < n_comm; ++c) infos[static_cast<std::size_t>(c)].old_id = c;
  for (int v = 0; v < graph.node_count(); ++v) {
    auto& info = infos[static_cast<std::size_t>(assignment[static_cast<std::size_t>(v)])];
    ++info.size;
    if (info.smallest_member == -1) info.smallest_member = v;
  }
  infos.erase(std::remove_if(infos.begin(), infos.end(),
                             [](const CommInfo& i) { return i.size == 0; }),
              infos.end());
  std::sort(infos.begin(), infos.end(), [](const CommInfo& a, const CommInfo& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.smallest_member < b.smallest_member;
  });

  std::vector<int> relabel(static_cast<std::size_t>(n_comm), -1);
  for (std::size_t i = 0; i < infos.size(); ++i)
    relabel[static_cast<std::size_t>(infos[i].old_id)] = static_cast<int>(i);

  Partition p;
  p.assignment.resize(graph.accounts.size());
  for (std::size_t v = 0; v < graph.accounts.size(); ++v)
    p.assignment[v] = relabel[static_cast<std::size_t>(assignment[v])];
  p.community_sizes.resize(infos.size());
  for (std::size_t i = 0; i < infos.size(); ++i) p.community_sizes[i] = infos[i].size;
  p.modularity = modularity(graph, p.assignment, resolution);
  return p;
}

namespace {

Partition louvain_single(const RetweetGraph& graph, const LouvainParams& params,
                         std::uint64_t run_seed, LouvainAudit* audit) {
  Rng rng(run_seed);
  SymGraph level = SymGraph::from(graph);

  // node -> community at the original scale, composed across levels
  std::vector<int> global_assign(static_cast<std::size_t>(level.n));
  std::iota(global_assign.begin(), global_assign.end(), 0);

  double q_prev = level.modularity_of(global_assign, params.resolution);
  for (int pass = 0; pass < params.max_passes; ++pass) {
    std::vector<int> comm(static_cast<std::size_t>(level.n));
    std::iota(comm.begin(), comm.end(), 0);
    bool moved =
        local_move_phase(level, comm, params.resolution, params.min_gain, rng, audit);
    if (!moved) break;

    std::vector<int> relabel;
    SymGraph next = aggregate(level, comm, relabel);

    for (auto& c : global_assign)
      c = relabel[static_cast<std::size_t>(comm[static_cast<std::size_t>(c)])];

    std::vector<int> identity(static_cast<std::size_t>(next.n));
    std::iota(identity.begin(), identity.end(), 0);
    double q_now = next.modularity_of(identity, params.resolution);
    level = std::move(next);
    if (q_now - q_prev <= params.min_gain) {
      q_prev = q_now;
      break;
    }
    q_prev = q_now;
  }

  return canonicalize_partition(graph, global_assign, params.resolution);
}

}  // namespace

Partition louvain(const RetweetGraph& graph, const LouvainParams& params, LouvainAudit* audit) {
  if (params.resolution <= 0.0) throw ConfigError("louvain resolution must be positive");
  if (params.max_passes < 1) throw ConfigError("louvain max_passes must be positive");
  if (params.min_gain < 0.0) throw ConfigError("louvain min_gain must be non-negative");
  if (params.restarts < 1) throw ConfigError("louvain restarts must be positive");

  Partition empty;
  if (graph.node_count() == 0) return empty;

  Partition best;
  bool have_best = false;
  for (int run = 0; run < params.restarts; ++run) {
    LouvainAudit run_audit;
    std::uint64_t run_seed = derive_seed(params.seed, "louvain-restart",
                                         std::to_string(run));
    Partition p = louvain_single(graph, params, run_seed, audit ? &run_audit : nullptr);
    if (!have_best || p.modularity > best.modularity) {
      best = std::move(p);
      have_best = true;
      if (audit) *audit = std::move(run_audit);
    }
  }
  return best;
}

Partition brute_force_partition(const RetweetGraph& graph, double resolution) {
  const int n = graph.node_count();
  if (n > 12)
    throw AnalysisError("brute_force_partition refuses graphs with more than 12 nodes (got " +
                        std::to_string(n) + ")");
  Partition empty;
  if (n == 0) return empty;

  SymGraph sg = SymGraph::from(graph);

  // enumerate set partitions as restricted growth strings
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::vector<int> best = rgs;
  double best_q = sg.modularity_of(rgs, resolution);

  while (true) {
    // next restricted growth string
    int i = n - 1;
    for (; i > 0; --i) {
      int max_prefix = 0;
      for (int j = 0; j < i; ++j) max_prefix = std::max(max_prefix, rgs[static_cast<std::size_t>(j)]);
      if (rgs[static_cast<std::size_t>(i)] <= max_prefix) break;
    }
    if (i == 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) rgs[static_cast<std::size_t>(j)] = 0;

    double q = sg.modularity_of(rgs, resolution);
    if (q > best_q) {
      best_q = q;
      best = rgs;
    }
  }
  return canonicalize_partition(graph, best, resolution);
}

std::unordered_map<std::string, int> Partition::account_map(const RetweetGraph& graph) const {
  std::unordered_map<std::string, int> out;
  out.reserve(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i)
    out.emplace(graph.accounts[i], assignment[i]);
  return out;
}

void write_communities_csv(const RetweetGraph& graph, const Partition& partition,
                           const std::string& path) {
  std::ostringstream out;
  out << "account,community_id\n";
  for (int v = 0; v < graph.node_count(); ++v)
    out << csv_escape(graph.account(v)) << ',' << partition.assignment[static_cast<std::size_t>(v)]
        << '\n';
  write_file(path, out.str());
}

Partition read_communities_csv(const RetweetGraph& graph, const std::string& path,
                               double resolution) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open communities file: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "account,community_id")
    throw InputError("bad communities header in " + path);
  std::vector<int> assign(graph.accounts.size(), -1);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto parts = split(line, ',');
    if (parts.size() != 2)
      throw InputError(path + " line " + std::to_string(lineno) + ": expected 2 fields");
    auto idx = graph.index_of(parts[0]);
    if (!idx) continue;  // account not in this graph (e.g. giant-only rerun)
    assign[static_cast<std::size_t>(*idx)] = std::stoi(parts[1]);
  }
  return canonicalize_partition(graph, assign, resolution);
}

}  // namespace hashjack
