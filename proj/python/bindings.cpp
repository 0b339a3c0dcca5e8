#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <set>
#include <sstream>

#include "hashjack/community.hpp"
#include "hashjack/errors.hpp"
#include "hashjack/time_util.hpp"
#include "hashjack/util.hpp"
#include "hashjack/graph.hpp"
#include "hashjack/ingest.hpp"
#include "hashjack/layout.hpp"
#include "hashjack/overlap.hpp"
#include "hashjack/pipeline.hpp"
#include "hashjack/polarity.hpp"
#include "hashjack/synth.hpp"

namespace py = pybind11;
using namespace hashjack;

namespace {

// (source, target, weight) triples -> RetweetGraph
RetweetGraph graph_from_edges(const std::string& hashtag,
                              const std::vector<std::tuple<std::string, std::string, long long>>& edges) {
  std::set<std::string> nodes;
  for (const auto& [s, t, w] : edges) {
    if (s == t) throw ConfigError("self-loop edge: " + s);
    if (w < 1) throw ConfigError("edge weight must be >= 1");
    nodes.insert(s);
    nodes.insert(t);
  }
  RetweetGraph g;
  g.hashtag = hashtag;
  g.accounts.assign(nodes.begin(), nodes.end());
  std::map<std::pair<int, int>, long long> agg;
  for (const auto& [s, t, w] : edges) agg[{*g.index_of(s), *g.index_of(t)}] += w;
  for (const auto& [key, w] : agg) g.edges.push_back({key.first, key.second, w});
  return g;
}

py::dict partition_to_dict(const RetweetGraph& g, const Partition& p) {
  py::dict assignment;
  for (int v = 0; v < g.node_count(); ++v)
    assignment[py::str(g.account(v))] = p.assignment[static_cast<std::size_t>(v)];
  py::dict out;
  out["assignment"] = assignment;
  out["modularity"] = p.modularity;
  out["community_sizes"] = p.community_sizes;
  return out;
}

Sentiment sentiment_from_string(const std::string& s) {
  if (s == "+" || s == "positive") return Sentiment::Positive;
  if (s == "-" || s == "negative") return Sentiment::Negative;
  if (s == "?" || s == "unclear") return Sentiment::Unclear;
  throw ConfigError("sentiment must be one of +, -, ?");
}

ClusterLabel label_from_string(const std::string& s) {
  if (s == "pro") return ClusterLabel::Pro;
  if (s == "contra") return ClusterLabel::Contra;
  throw ConfigError("cluster label must be pro or contra");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "retweet-network polarity and hashtag co-opting analysis";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<InputError>(m, "InputError");
  py::register_exception<AnalysisError>(m, "AnalysisError");

  m.def(
      "modularity",
      [](const std::vector<std::tuple<std::string, std::string, long long>>& edges,
         const std::unordered_map<std::string, int>& assignment, double resolution) {
        return modularity(graph_from_edges("", edges), assignment, resolution);
      },
      py::arg("edges"), py::arg("assignment"), py::arg("resolution") = 1.0,
      "Newman-Girvan modularity of an account->community assignment over "
      "(source, target, weight) edges.");

  m.def(
      "louvain",
      [](const std::vector<std::tuple<std::string, std::string, long long>>& edges,
         double resolution, std::uint64_t seed) {
        RetweetGraph g = graph_from_edges("", edges);
        LouvainParams params;
        params.resolution = resolution;
        params.seed = seed;
        return partition_to_dict(g, louvain(g, params));
      },
      py::arg("edges"), py::arg("resolution") = 1.0, py::arg("seed") = 0,
      "Louvain community detection; returns assignment, modularity and sizes.");

  m.def(
      "brute_force_partition",
      [](const std::vector<std::tuple<std::string, std::string, long long>>& edges,
         double resolution) {
        RetweetGraph g = graph_from_edges("", edges);
        return partition_to_dict(g, brute_force_partition(g, resolution));
      },
      py::arg("edges"), py::arg("resolution") = 1.0,
      "Exhaustive modularity maximum for graphs of at most 12 nodes.");

  m.def(
      "odds_2x2",
      [](double a, double b, double c, double d, double level) {
        OddsResult r = odds_2x2(a, b, c, d, level);
        py::dict out;
        out["odds_ratio"] = r.odds_ratio;
        out["ci_low"] = r.ci_low;
        out["ci_high"] = r.ci_high;
        out["corrected"] = r.corrected;
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("level") = 0.99,
      "Closed-form 2x2 odds ratio with a Wald interval.");

  m.def("z_quantile", &z_quantile, py::arg("level"),
        "Two-sided standard-normal critical value.");

  m.def(
      "sentiment_agreement",
      [](const std::vector<std::pair<std::string, std::string>>& rows) {
        std::vector<std::pair<ClusterLabel, Sentiment>> converted;
        converted.reserve(rows.size());
        for (const auto& [label, sentiment] : rows)
          converted.emplace_back(label_from_string(label), sentiment_from_string(sentiment));
        AgreementResult r = sentiment_agreement(converted);
        py::dict out;
        out["value"] = r.value;
        out["retained"] = r.retained;
        out["dropped_unclear"] = r.dropped_unclear;
        return out;
      },
      py::arg("rows"),
      "Phi agreement between cluster labels (pro/contra) and sentiments (+/-/?).");

  m.def(
      "forceatlas2",
      [](const std::vector<std::tuple<std::string, std::string, long long>>& edges,
         int iterations, std::uint64_t seed, double scaling, double gravity, bool linlog) {
        RetweetGraph g = graph_from_edges("", edges);
        LayoutParams params;
        params.iterations = iterations;
        params.seed = seed;
        params.scaling = scaling;
        params.gravity = gravity;
        params.linlog = linlog;
        LayoutResult r = forceatlas2(g, params);
        py::dict out;
        for (int v = 0; v < g.node_count(); ++v)
          out[py::str(g.account(v))] = r.positions[static_cast<std::size_t>(v)];
        return out;
      },
      py::arg("edges"), py::arg("iterations") = 1000, py::arg("seed") = 0,
      py::arg("scaling") = 2.0, py::arg("gravity") = 1.0, py::arg("linlog") = false,
      "ForceAtlas2 coordinates keyed by account.");

  m.def(
      "parse_corpus",
      [](const std::string& text) {
        std::istringstream stream(text);
        auto [records, report] = parse_corpus(stream);
        py::list recs;
        for (const auto& r : records) {
          py::dict d;
          d["id"] = r.id;
          d["author"] = r.author;
          if (r.rt_author) d["rt_author"] = *r.rt_author;
          if (r.rt_id) d["rt_id"] = *r.rt_id;
          d["tags"] = r.tags;
          d["ts"] = format_utc(r.ts);
          if (r.text) d["text"] = *r.text;
          recs.append(d);
        }
        py::dict rep;
        rep["records_ok"] = report.records_ok;
        rep["records_malformed"] = report.records_malformed;
        rep["duplicates_dropped"] = report.duplicates_dropped;
        rep["retweet_records"] = report.retweet_records;
        rep["original_records"] = report.original_records;
        return py::make_tuple(recs, rep);
      },
      py::arg("text"), "Parse line-delimited corpus text; returns (records, report).");

  m.def(
      "generate_corpus",
      [](const std::vector<std::string>& parties,
         const std::map<std::string, unsigned>& pro_users,
         const std::map<std::string, unsigned>& contra_users,
         const std::map<std::string, std::map<std::string, double>>& jack, unsigned hub_count,
         double retweets_per_user, double own_tag_rate, std::uint64_t seed) {
        SynthConfig config;
        config.parties = parties;
        for (const auto& [k, v] : pro_users) config.pro_users[k] = v;
        for (const auto& [k, v] : contra_users) config.contra_users[k] = v;
        for (const auto& [side_str, row] : jack) {
          auto parts = split(side_str, ':');
          if (parts.size() != 2) throw ConfigError("jack key must be 'pro:party' or 'contra:party'");
          SideKey side{parts[1], parts[0] == "pro" ? Polarity::Pro : Polarity::Contra};
          for (const auto& [target, rate] : row) config.hashjack[side][target] = rate;
        }
        config.hub_count = hub_count;
        config.retweets_per_user = retweets_per_user;
        config.own_tag_rate = own_tag_rate;
        config.seed = seed;
        SynthResult result = generate_corpus(config);
        std::ostringstream corpus;
        for (const auto& r : result.records) corpus << serialize_record(r) << '\n';
        py::dict truth;
        py::list planted;
        for (const auto& p : result.truth.planted) {
          py::dict row;
          row["pro_party"] = p.pro_party;
          row["contra_party"] = p.contra_party;
          row["implied_or"] = p.implied_or;
          planted.append(row);
        }
        truth["planted"] = planted;
        truth["accounts"] = result.truth.side_of.size();
        return py::make_tuple(corpus.str(), truth);
      },
      py::arg("parties"), py::arg("pro_users"), py::arg("contra_users"), py::arg("jack"),
      py::arg("hub_count") = 5, py::arg("retweets_per_user") = 25.0,
      py::arg("own_tag_rate") = 0.6, py::arg("seed") = 0,
      "Generate a synthetic corpus; returns (jsonl text, ground truth summary).");

  m.def(
      "run_pipeline",
      [](const std::vector<std::string>& inputs, const std::string& seed_file,
         const std::string& out_dir, const std::vector<std::string>& tags, std::uint64_t seed,
         double ci_level, bool skip_layout) {
        PipelineConfig config;
        config.inputs = inputs;
        config.seed_file = seed_file;
        config.out_dir = out_dir;
        if (!tags.empty()) config.tracked = std::set<std::string>(tags.begin(), tags.end());
        config.seed = seed;
        config.ci_level = ci_level;
        config.skip_layout = skip_layout;
        ReportBundle bundle = run_pipeline(config);
        py::dict out;
        out["out_dir"] = bundle.out_dir;
        out["files"] = bundle.files;
        out["bundle_checksum"] = bundle.bundle_checksum;
        out["warnings"] = bundle.warnings;
        return out;
      },
      py::arg("inputs"), py::arg("seed_file"), py::arg("out_dir"),
      py::arg("tags") = std::vector<std::string>{}, py::arg("seed") = 0,
      py::arg("ci_level") = 0.99, py::arg("skip_layout") = true,
      "Run the full pipeline on corpus files; returns the bundle summary.");

  m.attr("__version__") = kToolVersion;
}
