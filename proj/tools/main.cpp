// hashjack - batch toolkit for detecting strategic hashtag co-opting in
// retweet networks. Subcommands run individual stages on the files of an
// output workspace; `pipeline` runs everything from one config.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hashjack/community.hpp"
#include "hashjack/errors.hpp"
#include "hashjack/graph.hpp"
#include "hashjack/ingest.hpp"
#include "hashjack/layout.hpp"
#include "hashjack/overlap.hpp"
#include "hashjack/pipeline.hpp"
#include "hashjack/polarity.hpp"
#include "hashjack/synth.hpp"
#include "hashjack/time_util.hpp"
#include "hashjack/util.hpp"

namespace fs = std::filesystem;
using namespace hashjack;

namespace {

struct CommonIngestOpts {
  std::vector<std::string> inputs;
  std::string window_start, window_end;
  std::string tags;
  std::string alias_file;
};

void add_ingest_opts(CLI::App* cmd, CommonIngestOpts& opts, bool required_input = true) {
  auto* in = cmd->add_option("--input", opts.inputs, "input corpus file(s), JSON lines");
  if (required_input) in->required();
  cmd->add_option("--window-start", opts.window_start,
                  "observation window start, ISO-8601 with offset");
  cmd->add_option("--window-end", opts.window_end, "observation window end, ISO-8601 with offset");
  cmd->add_option("--tags", opts.tags, "comma-separated tracked hashtags");
  cmd->add_option("--alias-file", opts.alias_file, "hashtag alias CSV (alias,canonical)");
}

void apply_ingest_opts(const CommonIngestOpts& opts, PipelineConfig& config) {
  config.inputs = opts.inputs;
  if (!opts.window_start.empty()) config.window.start = parse_iso8601(opts.window_start);
  if (!opts.window_end.empty()) config.window.end = parse_iso8601(opts.window_end);
  if (!opts.tags.empty()) {
    config.tracked.clear();
    AliasTable aliases =
        opts.alias_file.empty() ? default_alias_table() : load_alias_file(opts.alias_file);
    for (const auto& t : split(opts.tags, ',')) {
      std::string norm = normalize_hashtag(t, aliases);
      if (!norm.empty()) config.tracked.insert(norm);
    }
  }
  config.alias_file = opts.alias_file;
}

std::vector<std::string> workspace_tags(const std::string& dir) {
  std::vector<std::string> tags;
  fs::path nets = fs::path(dir) / "networks";
  if (!fs::exists(nets)) throw InputError("no networks/ directory under " + dir);
  for (const auto& entry : fs::directory_iterator(nets))
    if (entry.is_directory()) tags.push_back(entry.path().filename().string());
  std::sort(tags.begin(), tags.end());
  return tags;
}

std::vector<std::string> slice_tags(const std::string& dir) {
  std::vector<std::string> tags;
  fs::path slices = fs::path(dir) / "slices";
  if (!fs::exists(slices)) throw InputError("no slices/ directory under " + dir);
  for (const auto& entry : fs::directory_iterator(slices))
    if (entry.path().extension() == ".jsonl") tags.push_back(entry.path().stem().string());
  std::sort(tags.begin(), tags.end());
  return tags;
}

int run_ingest(const CommonIngestOpts& opts, const std::string& out_dir) {
  PipelineConfig config;
  apply_ingest_opts(opts, config);
  for (const auto& path : config.inputs)
    if (!fs::exists(path)) throw InputError("input file not found: " + path);

  AliasTable aliases =
      config.alias_file.empty() ? default_alias_table() : load_alias_file(config.alias_file);
  auto [records, report] = parse_corpus_files(config.inputs, aliases);
  auto filtered = filter_window(records, config.window);
  report.outside_window = records.size() - filtered.size();
  auto slices = slice_by_hashtag(filtered, config.tracked);

  fs::create_directories(fs::path(out_dir) / "slices");
  for (const auto& [tag, slice] : slices) {
    std::ofstream out(fs::path(out_dir) / "slices" / (tag + ".jsonl"));
    for (const auto& r : slice) out << serialize_record(r) << '\n';
  }
  nlohmann::ordered_json pr;
  pr["records_ok"] = report.records_ok;
  pr["records_malformed"] = report.records_malformed;
  pr["duplicates_dropped"] = report.duplicates_dropped;
  pr["outside_window"] = report.outside_window;
  pr["retweet_records"] = report.retweet_records;
  pr["original_records"] = report.original_records;
  pr["in_window"] = filtered.size();
  write_file((fs::path(out_dir) / "parse_report.json").string(), pr.dump(2) + "\n");

  std::cout << "parsed " << report.records_ok << " records (" << report.records_malformed
            << " malformed, " << report.duplicates_dropped << " duplicates), " << filtered.size()
            << " in window, " << slices.size() << " slices\n";
  return 0;
}

int run_graph(const std::string& dir, bool giant_only) {
  for (const auto& tag : slice_tags(dir)) {
    std::ifstream in(fs::path(dir) / "slices" / (tag + ".jsonl"));
    auto [records, report] = parse_corpus(in);
    auto graph = build_retweet_graph(records, tag);
    if (giant_only) graph = largest_component(graph);
    fs::path net_dir = fs::path(dir) / "networks" / tag;
    fs::create_directories(net_dir);
    write_edges_csv(graph, (net_dir / "edges.csv").string());
    write_graphml(graph, (net_dir / "graph.graphml").string());
    std::cout << "#" << tag << ": " << graph.node_count() << " nodes, " << graph.edges.size()
              << " edges, total weight " << graph.total_weight() << ", "
              << graph.self_retweets_dropped << " self-retweets dropped\n";
  }
  return 0;
}

int run_communities(const std::string& dir, std::uint64_t seed, double resolution,
                    int max_passes, double min_gain) {
  PipelineConfig config;
  config.seed = seed;
  for (const auto& tag : workspace_tags(dir)) {
    fs::path net_dir = fs::path(dir) / "networks" / tag;
    auto graph = read_edges_csv((net_dir / "edges.csv").string(), tag);
    LouvainParams lp;
    lp.resolution = resolution;
    lp.max_passes = max_passes;
    lp.min_gain = min_gain;
    lp.seed = stage_seed(config, "louvain", tag);
    auto partition = louvain(graph, lp);
    write_communities_csv(graph, partition, (net_dir / "communities.csv").string());
    std::cout << "#" << tag << ": Q=" << format_double(partition.modularity) << " sizes=[";
    for (std::size_t i = 0; i < partition.community_sizes.size(); ++i)
      std::cout << (i ? "," : "") << partition.community_sizes[i];
    std::cout << "]\n";
  }
  return 0;
}

int run_label(const std::string& dir, const std::string& seed_file, int top_k) {
  auto seeds_by_tag = load_seed_file(seed_file);
  std::vector<PolarityMap> all_labels;
  for (const auto& tag : workspace_tags(dir)) {
    fs::path net_dir = fs::path(dir) / "networks" / tag;
    auto graph = read_edges_csv((net_dir / "edges.csv").string(), tag);
    if (graph.node_count() == 0) continue;
    auto partition = read_communities_csv(graph, (net_dir / "communities.csv").string());
    auto it = seeds_by_tag.find(tag);
    if (it == seeds_by_tag.end() || it->second.empty()) {
      std::cerr << "warning: #" << tag << ": no seeds configured, left unlabeled\n";
      continue;
    }
    auto polarity = label_clusters(graph, partition, it->second);
    for (const auto& missing : polarity.skipped_seeds)
      std::cerr << "warning: #" << tag << ": seed not in network: " << missing << '\n';
    if (polarity.labels.empty()) {
      std::cerr << "warning: #" << tag << ": no seed present in network, left unlabeled\n";
      continue;
    }
    write_top_accounts_csv(graph, partition, polarity, top_k,
                           (net_dir / "top_accounts.csv").string());
    all_labels.push_back(polarity);
    std::cout << "#" << tag << ": pro=" << polarity.community_with(ClusterLabel::Pro)
              << " contra=" << polarity.community_with(ClusterLabel::Contra)
              << " coverage=" << format_double(polarity.coverage) << '\n';
  }
  write_labels_csv(all_labels, (fs::path(dir) / "labels.csv").string());
  return 0;
}

int run_overlap(const std::string& dir, double level, const std::string& universe) {
  UniverseMode mode;
  if (universe == "global") mode = UniverseMode::Global;
  else if (universe == "pair") mode = UniverseMode::Pair;
  else throw ConfigError("--universe must be global or pair");

  auto label_maps = read_labels_csv((fs::path(dir) / "labels.csv").string());

  // rebuilt graphs/partitions must outlive the LabeledNetwork views
  std::vector<std::unique_ptr<RetweetGraph>> graphs;
  std::vector<std::unique_ptr<Partition>> partitions;
  std::vector<std::unique_ptr<PolarityMap>> polarities;
  std::vector<LabeledNetwork> labeled;
  for (const auto& tag : workspace_tags(dir)) {
    auto it = label_maps.find(tag);
    if (it == label_maps.end()) continue;
    fs::path net_dir = fs::path(dir) / "networks" / tag;
    graphs.push_back(std::make_unique<RetweetGraph>(
        read_edges_csv((net_dir / "edges.csv").string(), tag)));
    partitions.push_back(std::make_unique<Partition>(
        read_communities_csv(*graphs.back(), (net_dir / "communities.csv").string())));
    polarities.push_back(std::make_unique<PolarityMap>(it->second));
    labeled.push_back({graphs.back().get(), partitions.back().get(), polarities.back().get()});
  }
  if (labeled.size() < 2)
    throw AnalysisError("overlap needs at least 2 labeled networks, have " +
                        std::to_string(labeled.size()));

  MembershipTable table = membership_table(labeled);
  HashjackReport hj = hashjack_matrix(table, level, mode);
  annotate_contra_sizes(hj, labeled);

  write_membership_csv(table, (fs::path(dir) / "membership.csv").string());
  write_odds_matrix_csv(hj, (fs::path(dir) / "odds_matrix.csv").string());
  write_models_json(hj, (fs::path(dir) / "models.json").string());
  write_coefficients_csv(hj, (fs::path(dir) / "coefficients.csv").string());

  std::cout << "universe=" << table.universe_size() << " z=" << format_double(z_quantile(level))
            << " cells=" << hj.cells.size() << '\n';
  for (const auto& [key, cell] : hj.cells)
    std::cout << "pro_" << key.first << " -> contra_" << key.second << ": OR="
              << format_double(cell.odds.odds_ratio) << " ["
              << format_double(cell.odds.ci_low) << ", " << format_double(cell.odds.ci_high)
              << "]" << (cell.odds.corrected ? " (corrected)" : "") << '\n';
  return 0;
}

int run_layout(const std::string& dir, std::uint64_t seed, int iterations, double scaling,
               double gravity, bool linlog, double tolerance, int barnes_hut, bool svg) {
  PipelineConfig config;
  config.seed = seed;
  std::map<std::string, PolarityMap> label_maps;
  if (fs::exists(fs::path(dir) / "labels.csv"))
    label_maps = read_labels_csv((fs::path(dir) / "labels.csv").string());

  for (const auto& tag : workspace_tags(dir)) {
    fs::path net_dir = fs::path(dir) / "networks" / tag;
    auto graph = read_edges_csv((net_dir / "edges.csv").string(), tag);
    if (graph.node_count() == 0) continue;

    LayoutParams lp;
    lp.iterations = iterations;
    lp.scaling = scaling;
    lp.gravity = gravity;
    lp.linlog = linlog;
    lp.tolerance = tolerance;
    if (barnes_hut >= 0) lp.barnes_hut = barnes_hut > 0;
    lp.seed = stage_seed(config, "layout", tag);
    auto layout = forceatlas2(graph, lp);

    std::unique_ptr<Partition> partition;
    if (fs::exists(net_dir / "communities.csv"))
      partition = std::make_unique<Partition>(
          read_communities_csv(graph, (net_dir / "communities.csv").string()));
    const PolarityMap* pol =
        label_maps.count(tag) && partition ? &label_maps.at(tag) : nullptr;

    write_layout_csv(graph, layout, partition.get(), pol, (net_dir / "layout.csv").string());
    GraphmlNodeAttrs attrs;
    attrs.coords = &layout.positions;
    std::vector<std::string> pol_names;
    if (partition) {
      attrs.community = &partition->assignment;
      if (pol) {
        for (int c : partition->assignment) pol_names.push_back(to_string(pol->label_of(c)));
        attrs.polarity = &pol_names;
      }
    }
    write_graphml(graph, (net_dir / "layout.graphml").string(), attrs);
    if (svg) write_layout_svg(graph, layout, partition.get(), (net_dir / "layout.svg").string());

    std::cout << "#" << tag << ": " << layout.iterations_run
              << " iterations, final swinging " << format_double(layout.final_total_swinging)
              << '\n';
  }
  return 0;
}

std::map<std::string, std::uint32_t> parse_per_party(const std::vector<std::string>& specs,
                                                     const std::vector<std::string>& parties,
                                                     const std::string& flag) {
  std::map<std::string, std::uint32_t> out;
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) {
      // plain count applies to every party
      std::uint32_t n = static_cast<std::uint32_t>(std::stoul(spec));
      for (const auto& p : parties) out[p] = n;
    } else {
      out[spec.substr(0, eq)] = static_cast<std::uint32_t>(std::stoul(spec.substr(eq + 1)));
    }
  }
  for (const auto& [party, n] : out)
    if (std::find(parties.begin(), parties.end(), party) == parties.end())
      throw ConfigError(flag + ": unknown party " + party);
  return out;
}

int run_synth(const std::string& out_dir, const std::vector<std::string>& parties_arg,
              const std::vector<std::string>& pro_specs,
              const std::vector<std::string>& contra_specs,
              const std::vector<std::string>& jack_specs, std::uint32_t hub_count,
              double hub_exponent, double retweets_per_user, double own_tag_rate,
              const std::string& window_start, const std::string& window_end,
              std::uint64_t seed) {
  SynthConfig config;
  for (const auto& arg : parties_arg)
    for (const auto& p : split(arg, ','))
      if (!trim(p).empty()) config.parties.push_back(trim(p));
  config.pro_users = parse_per_party(pro_specs, config.parties, "--pro-users");
  config.contra_users = parse_per_party(contra_specs, config.parties, "--contra-users");
  config.hub_count = hub_count;
  config.hub_exponent = hub_exponent;
  config.retweets_per_user = retweets_per_user;
  config.own_tag_rate = own_tag_rate;
  if (!window_start.empty()) config.window.start = parse_iso8601(window_start);
  if (!window_end.empty()) config.window.end = parse_iso8601(window_end);
  config.seed = seed;

  // SIDE:PARTY:TARGET=RATE, e.g. pro:afd:csu=0.3
  for (const auto& spec : jack_specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--jack expects SIDE:PARTY:TARGET=RATE");
    auto parts = split(spec.substr(0, eq), ':');
    if (parts.size() != 3) throw ConfigError("--jack expects SIDE:PARTY:TARGET=RATE");
    SideKey side;
    if (parts[0] == "pro") side.polarity = Polarity::Pro;
    else if (parts[0] == "contra") side.polarity = Polarity::Contra;
    else throw ConfigError("--jack side must be pro or contra");
    side.party = parts[1];
    config.hashjack[side][parts[2]] = std::stod(spec.substr(eq + 1));
  }

  auto result = generate_corpus(config);
  fs::create_directories(out_dir);
  write_corpus_jsonl(result.records, (fs::path(out_dir) / "corpus.jsonl").string());
  write_ground_truth_csv(result.truth, (fs::path(out_dir) / "ground_truth.csv").string());
  write_planted_odds_csv(result.truth, (fs::path(out_dir) / "planted_odds.csv").string());
  write_seed_csv(result.truth, (fs::path(out_dir) / "seeds.csv").string());

  std::cout << "generated " << result.records.size() << " records, "
            << result.truth.side_of.size() << " accounts, " << result.truth.planted.size()
            << " planted odds cells\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hashjack: retweet-network polarity and hashtag co-opting analysis"};
  app.set_version_flag("--version", std::string("hashjack ") + kToolVersion +
                                        " (manifest schema " +
                                        std::to_string(kManifestSchemaVersion) + ")");
  app.require_subcommand(1);

  // ---- pipeline ----------------------------------------------------------
  auto* pipe_cmd = app.add_subcommand("pipeline", "run every stage from one config");
  pipe_cmd->set_config("--config", "", "flat key=value config file");
  CommonIngestOpts pipe_ingest;
  add_ingest_opts(pipe_cmd, pipe_ingest);
  std::string pipe_out, pipe_seed_file, pipe_annotations, pipe_universe = "global";
  std::uint64_t pipe_seed = 0;
  double pipe_resolution = 1.0, pipe_level = 0.99;
  int pipe_topk = 50, pipe_layout_iters = 1000;
  double pipe_scaling = 2.0, pipe_gravity = 1.0, pipe_tolerance = 1.0;
  bool pipe_linlog = false, pipe_giant = false, pipe_skip_layout = false, pipe_svg = false;
  int pipe_bh = -1;
  pipe_cmd->add_option("--out", pipe_out, "output directory")->required();
  pipe_cmd->add_option("--seeds", pipe_seed_file, "polarity seed CSV (hashtag,account,polarity)")
      ->required();
  pipe_cmd->add_option("--annotations", pipe_annotations, "sentiment CSV (tweet_id,sentiment)");
  pipe_cmd->add_option("--seed", pipe_seed, "root seed; every stage derives from it");
  pipe_cmd->add_option("--resolution", pipe_resolution, "modularity resolution");
  pipe_cmd->add_option("--level", pipe_level, "confidence level for odds intervals");
  pipe_cmd->add_option("--universe", pipe_universe, "odds universe: global or pair");
  pipe_cmd->add_option("--top-k", pipe_topk, "accounts per community in reports");
  pipe_cmd->add_flag("--giant-only", pipe_giant, "restrict analysis to the largest component");
  pipe_cmd->add_flag("--skip-layout", pipe_skip_layout, "skip the layout stage");
  pipe_cmd->add_flag("--svg", pipe_svg, "also render layout.svg per network");
  pipe_cmd->add_option("--layout-iterations", pipe_layout_iters, "layout iterations");
  pipe_cmd->add_option("--layout-scaling", pipe_scaling, "layout repulsion scaling");
  pipe_cmd->add_option("--layout-gravity", pipe_gravity, "layout gravity");
  pipe_cmd->add_flag("--layout-linlog", pipe_linlog, "linlog attraction");
  pipe_cmd->add_option("--layout-tolerance", pipe_tolerance, "layout speed tolerance");
  pipe_cmd->add_option("--layout-barnes-hut", pipe_bh,
                       "force Barnes-Hut repulsion (1) or exact (0); default auto");

  // ---- ingest ------------------------------------------------------------
  auto* ingest_cmd = app.add_subcommand("ingest", "parse, filter and slice a corpus");
  CommonIngestOpts ingest_opts;
  add_ingest_opts(ingest_cmd, ingest_opts);
  std::string ingest_out;
  ingest_cmd->add_option("--out", ingest_out, "workspace directory")->required();

  // ---- graph ---------------------------------------------------------------
  auto* graph_cmd = app.add_subcommand("graph", "build retweet networks from slices");
  std::string graph_dir;
  bool graph_giant = false;
  graph_cmd->add_option("--dir", graph_dir, "workspace directory (with slices/)")->required();
  graph_cmd->add_flag("--giant-only", graph_giant, "keep only the largest weak component");

  // ---- communities ---------------------------------------------------------
  auto* comm_cmd = app.add_subcommand("communities", "Louvain community detection per network");
  std::string comm_dir;
  std::uint64_t comm_seed = 0;
  double comm_resolution = 1.0, comm_min_gain = 1e-9;
  int comm_max_passes = 100;
  comm_cmd->add_option("--dir", comm_dir, "workspace directory (with networks/)")->required();
  comm_cmd->add_option("--seed", comm_seed, "root seed");
  comm_cmd->add_option("--resolution", comm_resolution, "modularity resolution");
  comm_cmd->add_option("--max-passes", comm_max_passes, "maximum aggregation passes");
  comm_cmd->add_option("--min-gain", comm_min_gain, "minimum accepted modularity gain");

  // ---- label -----------------------------------------------------------------
  auto* label_cmd = app.add_subcommand("label", "assign pro/contra polarity from seed lists");
  std::string label_dir, label_seeds;
  int label_topk = 50;
  label_cmd->add_option("--dir", label_dir, "workspace directory")->required();
  label_cmd->add_option("--seeds", label_seeds, "polarity seed CSV")->required();
  label_cmd->add_option("--top-k", label_topk, "accounts per community in the report");

  // ---- overlap -----------------------------------------------------------------
  auto* overlap_cmd = app.add_subcommand("overlap", "membership table, odds and models");
  std::string overlap_dir, overlap_universe = "global";
  double overlap_level = 0.99;
  overlap_cmd->add_option("--dir", overlap_dir, "workspace directory")->required();
  overlap_cmd->add_option("--level", overlap_level, "confidence level");
  overlap_cmd->add_option("--universe", overlap_universe, "global or pair");

  // ---- layout ------------------------------------------------------------------
  auto* layout_cmd = app.add_subcommand("layout", "ForceAtlas2 coordinates per network");
  std::string layout_dir;
  std::uint64_t layout_seed = 0;
  int layout_iters = 1000, layout_bh = -1;
  double layout_scaling = 2.0, layout_gravity = 1.0, layout_tolerance = 1.0;
  bool layout_linlog = false, layout_svg = false;
  layout_cmd->add_option("--dir", layout_dir, "workspace directory")->required();
  layout_cmd->add_option("--seed", layout_seed, "root seed");
  layout_cmd->add_option("--iterations", layout_iters, "iterations");
  layout_cmd->add_option("--scaling", layout_scaling, "repulsion scaling");
  layout_cmd->add_option("--gravity", layout_gravity, "gravity");
  layout_cmd->add_flag("--linlog", layout_linlog, "linlog attraction");
  layout_cmd->add_option("--tolerance", layout_tolerance, "speed tolerance");
  layout_cmd->add_option("--barnes-hut", layout_bh, "1 = Barnes-Hut, 0 = exact, default auto");
  layout_cmd->add_flag("--svg", layout_svg, "also render layout.svg");

  // ---- synth --------------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  std::string synth_out, synth_wstart, synth_wend;
  std::vector<std::string> synth_parties, synth_pro, synth_contra, synth_jack;
  std::uint32_t synth_hubs = 5;
  double synth_exp = 1.0, synth_rpu = 25.0, synth_own = 0.6;
  std::uint64_t synth_seed = 0;
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--parties", synth_parties, "comma-separated party tags")->required();
  synth_cmd->add_option("--pro-users", synth_pro, "count or party=count (repeatable)");
  synth_cmd->add_option("--contra-users", synth_contra, "count or party=count (repeatable)");
  synth_cmd->add_option("--jack", synth_jack, "SIDE:PARTY:TARGET=RATE (repeatable)");
  synth_cmd->add_option("--hub-count", synth_hubs, "hub accounts per cluster side");
  synth_cmd->add_option("--hub-exponent", synth_exp, "hub attractiveness exponent");
  synth_cmd->add_option("--retweets-per-user", synth_rpu, "Poisson mean retweets per user");
  synth_cmd->add_option("--own-tag-rate", synth_own, "per-retweet share staying home");
  synth_cmd->add_option("--window-start", synth_wstart, "window start (ISO-8601)");
  synth_cmd->add_option("--window-end", synth_wend, "window end (ISO-8601)");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(pipe_cmd)) {
      PipelineConfig config;
      apply_ingest_opts(pipe_ingest, config);
      config.seed = pipe_seed;
      config.resolution = pipe_resolution;
      config.ci_level = pipe_level;
      if (pipe_universe == "global") config.universe = UniverseMode::Global;
      else if (pipe_universe == "pair") config.universe = UniverseMode::Pair;
      else throw ConfigError("--universe must be global or pair");
      config.top_k = pipe_topk;
      config.giant_only = pipe_giant;
      config.skip_layout = pipe_skip_layout;
      config.write_svg = pipe_svg;
      config.layout_iterations = pipe_layout_iters;
      config.layout_scaling = pipe_scaling;
      config.layout_gravity = pipe_gravity;
      config.layout_linlog = pipe_linlog;
      config.layout_tolerance = pipe_tolerance;
      if (pipe_bh >= 0) config.layout_barnes_hut = pipe_bh > 0;
      config.seed_file = pipe_seed_file;
      config.annotation_file = pipe_annotations;
      config.out_dir = pipe_out;
      if (const char* env = std::getenv(kOutputDirEnvVar)) config.out_dir = env;

      ReportBundle bundle = run_pipeline(config);
      for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "bundle " << bundle.out_dir << ": " << bundle.files.size()
                << " files, checksum " << bundle.bundle_checksum << '\n';
      return 0;
    }
    if (app.got_subcommand(ingest_cmd)) return run_ingest(ingest_opts, ingest_out);
    if (app.got_subcommand(graph_cmd)) return run_graph(graph_dir, graph_giant);
    if (app.got_subcommand(comm_cmd))
      return run_communities(comm_dir, comm_seed, comm_resolution, comm_max_passes,
                             comm_min_gain);
    if (app.got_subcommand(label_cmd)) return run_label(label_dir, label_seeds, label_topk);
    if (app.got_subcommand(overlap_cmd))
      return run_overlap(overlap_dir, overlap_level, overlap_universe);
    if (app.got_subcommand(layout_cmd))
      return run_layout(layout_dir, layout_seed, layout_iters, layout_scaling, layout_gravity,
                        layout_linlog, layout_tolerance, layout_bh, layout_svg);
    if (app.got_subcommand(synth_cmd))
      return run_synth(synth_out, synth_parties, synth_pro, synth_contra, synth_jack, synth_hubs,
                       synth_exp, synth_rpu, synth_own, synth_wstart, synth_wend, synth_seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
