#include "hashjack/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hashjack/errors.hpp"
#include "hashjack/util.hpp"

namespace hashjack {

std::optional<int> RetweetGraph::index_of(const std::string& account) const {
  auto it = std::lower_bound(accounts.begin(), accounts.end(), account);
  if (it == accounts.end() || *it != account) return std::nullopt;
  return static_cast<int>(it - accounts.begin());
}

std::int64_t RetweetGraph::total_weight() const {
  std::int64_t w = 0;
  for (const auto& e : edges) w += e.weight;
  return w;
}

std::vector<std::int64_t> RetweetGraph::in_weights() const {
  std::vector<std::int64_t> in(accounts.size(), 0);
  for (const auto& e : edges) in[static_cast<std::size_t>(e.dst)] += e.weight;
  return in;
}

std::vector<int> RetweetGraph::undirected_degrees() const {
  std::vector<std::set<int>> nbrs(accounts.size());
  for (const auto& e : edges) {
    nbrs[static_cast<std::size_t>(e.src)].insert(e.dst);
    nbrs[static_cast<std::size_t>(e.dst)].insert(e.src);
  }
  std::vector<int> deg(accounts.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) deg[i] = static_cast<int>(nbrs[i].size());
  return deg;
}

RetweetGraph build_retweet_graph(const std::vector<TweetRecord>& records,
                                 const std::string& hashtag) {
  RetweetGraph g;
  g.hashtag = hashtag;

  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, std::int64_t> weights;
  for (const auto& r : records) {
    if (!r.is_retweet()) continue;
    if (r.author == *r.rt_author) {
      ++g.self_retweets_dropped;
      continue;
    }
    nodes.insert(r.author);
    nodes.insert(*r.rt_author);
    ++weights[{r.author, *r.rt_author}];
  }

  g.accounts.assign(nodes.begin(), nodes.end());
  g.edges.reserve(weights.size());
  for (const auto& [key, w] : weights) {
    RetweetGraph::Edge e;
    e.src = *g.index_of(key.first);
    e.dst = *g.index_of(key.second);
    e.weight = w;
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  return g;
}

RankedAccounts top_retweeted(const RetweetGraph& graph, int k) {
  if (k < 1) throw ConfigError("top_retweeted requires k >= 1");
  auto in = graph.in_weights();
  std::vector<int> order(graph.accounts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    auto ia = in[static_cast<std::size_t>(a)], ib = in[static_cast<std::size_t>(b)];
    if (ia != ib) return ia > ib;
    return graph.account(a) < graph.account(b);
  });
  RankedAccounts out;
  int limit = std::min<int>(k, graph.node_count());
  out.entries.reserve(static_cast<std::size_t>(limit));
  for (int i = 0; i < limit; ++i)
    out.entries.emplace_back(graph.account(order[static_cast<std::size_t>(i)]),
                             in[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  return out;
}

namespace {

RetweetGraph induced_subgraph(const RetweetGraph& graph, const std::vector<int>& keep) {
  RetweetGraph sub;
  sub.hashtag = graph.hashtag;
  sub.self_retweets_dropped = graph.self_retweets_dropped;
  sub.accounts.reserve(keep.size());
  for (int idx : keep) sub.accounts.push_back(graph.account(idx));
  std::sort(sub.accounts.begin(), sub.accounts.end());
  std::vector<int> remap(graph.accounts.size(), -1);
  for (int idx : keep) remap[static_cast<std::size_t>(idx)] = *sub.index_of(graph.account(idx));
  for (const auto& e : graph.edges) {
    int s = remap[static_cast<std::size_t>(e.src)];
    int d = remap[static_cast<std::size_t>(e.dst)];
    if (s >= 0 && d >= 0) sub.edges.push_back({s, d, e.weight});
  }
  std::sort(sub.edges.begin(), sub.edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  return sub;
}

}  // namespace

RetweetGraph largest_component(const RetweetGraph& graph) {
  if (graph.node_count() == 0) return graph;

  std::vector<std::vector<int>> adj(graph.accounts.size());
  for (const auto& e : graph.edges) {
    adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
    adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }

  std::vector<int> comp(graph.accounts.size(), -1);
  int n_comp = 0;
  std::vector<int> stack;
  for (int start = 0; start < graph.node_count(); ++start) {
    if (comp[static_cast<std::size_t>(start)] != -1) continue;
    stack.push_back(start);
    comp[static_cast<std::size_t>(start)] = n_comp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj[static_cast<std::size_t>(v)]) {
        if (comp[static_cast<std::size_t>(u)] == -1) {
          comp[static_cast<std::size_t>(u)] = n_comp;
          stack.push_back(u);
        }
      }
    }
    ++n_comp;
  }

  std::vector<int> sizes(static_cast<std::size_t>(n_comp), 0);
  for (int c : comp) ++sizes[static_cast<std::size_t>(c)];
  // accounts are sorted, so the first node of the best size is the
  // lexicographically smallest tie-break member
  int best = -1;
  for (int v = 0; v < graph.node_count(); ++v) {
    int c = comp[static_cast<std::size_t>(v)];
    if (best == -1 || sizes[static_cast<std::size_t>(c)] > sizes[static_cast<std::size_t>(best)])
      best = c;
  }

  std::vector<int> keep;
  for (int v = 0; v < graph.node_count(); ++v)
    if (comp[static_cast<std::size_t>(v)] == best) keep.push_back(v);
  return induced_subgraph(graph, keep);
}

void write_edges_csv(const RetweetGraph& graph, const std::string& path) {
  std::ostringstream out;
  out << "source,target,weight\n";
  for (const auto& e : graph.edges)
    out << csv_escape(graph.account(e.src)) << ',' << csv_escape(graph.account(e.dst)) << ','
        << e.weight << '\n';
  write_file(path, out.str());
}

RetweetGraph read_edges_csv(const std::string& path, const std::string& hashtag) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edges file: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "source,target,weight")
    throw InputError("bad edges header in " + path);

  std::set<std::string> nodes;
  std::vector<std::tuple<std::string, std::string, std::int64_t>> raw;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto parts = split(line, ',');
    if (parts.size() != 3)
      throw InputError(path + " line " + std::to_string(lineno) + ": expected 3 fields");
    std::int64_t w = 0;
    try {
      w = std::stoll(parts[2]);
    } catch (...) {
      throw InputError(path + " line " + std::to_string(lineno) + ": bad weight");
    }
    if (w < 1) throw InputError(path + " line " + std::to_string(lineno) + ": weight < 1");
    if (parts[0] == parts[1])
      throw InputError(path + " line " + std::to_string(lineno) + ": self-loop");
    nodes.insert(parts[0]);
    nodes.insert(parts[1]);
    raw.emplace_back(parts[0], parts[1], w);
  }

  RetweetGraph g;
  g.hashtag = hashtag;
  g.accounts.assign(nodes.begin(), nodes.end());
  for (const auto& [s, d, w] : raw)
    g.edges.push_back({*g.index_of(s), *g.index_of(d), w});
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  return g;
}

void write_graphml(const RetweetGraph& graph, const std::string& path,
                   const GraphmlNodeAttrs& attrs) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n";
  if (attrs.coords) {
    out << "  <key id=\"x\" for=\"node\" attr.name=\"x\" attr.type=\"double\"/>\n"
        << "  <key id=\"y\" for=\"node\" attr.name=\"y\" attr.type=\"double\"/>\n";
  }
  if (attrs.community)
    out << "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n";
  if (attrs.polarity)
    out << "  <key id=\"polarity\" for=\"node\" attr.name=\"polarity\" attr.type=\"string\"/>\n";
  out << "  <graph id=\"" << xml_escape(graph.hashtag) << "\" edgedefault=\"directed\">\n";
  for (int v = 0; v < graph.node_count(); ++v) {
    out << "    <node id=\"" << xml_escape(graph.account(v)) << "\"";
    if (!attrs.coords && !attrs.community && !attrs.polarity) {
      out << "/>\n";
      continue;
    }
    out << ">\n";
    if (attrs.coords) {
      out << "      <data key=\"x\">" << format_double((*attrs.coords)[static_cast<std::size_t>(v)].first)
          << "</data>\n";
      out << "      <data key=\"y\">" << format_double((*attrs.coords)[static_cast<std::size_t>(v)].second)
          << "</data>\n";
    }
    if (attrs.community)
      out << "      <data key=\"community\">" << (*attrs.community)[static_cast<std::size_t>(v)]
          << "</data>\n";
    if (attrs.polarity)
      out << "      <data key=\"polarity\">"
          << xml_escape((*attrs.polarity)[static_cast<std::size_t>(v)]) << "</data>\n";
    out << "    </node>\n";
  }
  for (const auto& e : graph.edges) {
    out << "    <edge source=\"" << xml_escape(graph.account(e.src)) << "\" target=\""
        << xml_escape(graph.account(e.dst)) << "\"><data key=\"weight\">" << e.weight
        << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  write_file(path, out.str());
}

}  // namespace hashjack
