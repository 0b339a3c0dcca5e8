#include "hashjack/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hashjack/errors.hpp"
#include "hashjack/polarity.hpp"
#include "hashjack/time_util.hpp"
#include "hashjack/util.hpp"

namespace fs = std::filesystem;

namespace hashjack {

using ordered_json = nlohmann::ordered_json;

std::uint64_t stage_seed(const PipelineConfig& config, std::string_view stage,
                         std::string_view key) {
  return derive_seed(config.seed, stage, key);
}

namespace {

void validate_config(const PipelineConfig& config) {
  if (config.inputs.empty()) throw ConfigError("no input files given");
  if (config.tracked.empty()) throw ConfigError("tracked hashtag set is empty");
  if (config.window.start > config.window.end) throw ConfigError("window start after window end");
  if (config.seed_file.empty()) throw ConfigError("seed list file is required");
  if (config.out_dir.empty()) throw ConfigError("output directory is required");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0))
    throw ConfigError("ci level must lie strictly between 0 and 1");
  if (config.top_k < 1) throw ConfigError("top_k must be >= 1");

  // fail before any output is created
  for (const auto& path : config.inputs)
    if (!fs::exists(path)) throw InputError("input file not found: " + path);
  if (!fs::exists(config.seed_file))
    throw InputError("seed list file not found: " + config.seed_file);
  if (!config.alias_file.empty() && !fs::exists(config.alias_file))
    throw InputError("alias file not found: " + config.alias_file);
  if (!config.annotation_file.empty() && !fs::exists(config.annotation_file))
    throw InputError("annotation file not found: " + config.annotation_file);
}

struct TagResult {
  std::string tag;
  RetweetGraph graph;
  Partition partition;
  std::optional<PolarityMap> polarity;
};

class BundleWriter {
 public:
  explicit BundleWriter(std::string out_dir) : out_dir_(std::move(out_dir)) {}

  void write(const std::string& rel_path, std::string_view content) {
    fs::path full = fs::path(out_dir_) / rel_path;
    fs::create_directories(full.parent_path());
    write_file(full.string(), content);
    files_.push_back(rel_path);
  }

  // for writers that emit directly to a path
  template <typename Fn>
  void emit(const std::string& rel_path, Fn&& writer) {
    fs::path full = fs::path(out_dir_) / rel_path;
    fs::create_directories(full.parent_path());
    writer(full.string());
    files_.push_back(rel_path);
  }

  std::vector<std::string> sorted_files() const {
    auto files = files_;
    std::sort(files.begin(), files.end());
    return files;
  }

  const std::string& dir() const { return out_dir_; }

 private:
  std::string out_dir_;
  std::vector<std::string> files_;
};

std::string tag_dir(const std::string& tag) { return "networks/" + tag; }

}  // namespace

ReportBundle run_pipeline(const PipelineConfig& config) {
  validate_config(config);

  AliasTable aliases =
      config.alias_file.empty() ? default_alias_table() : load_alias_file(config.alias_file);
  auto seeds_by_tag = load_seed_file(config.seed_file);

  // ---- ingest ----------------------------------------------------------
  auto [records, report] = parse_corpus_files(config.inputs, aliases);
  auto filtered = filter_window(records, config.window);
  report.outside_window = records.size() - filtered.size();
  auto slices = slice_by_hashtag(filtered, config.tracked);

  ReportBundle bundle;
  std::vector<std::string>& warnings = bundle.warnings;

  fs::create_directories(config.out_dir);
  BundleWriter out(config.out_dir);

  {
    std::ostringstream ss;
    for (const auto& r : filtered) ss << serialize_record(r) << '\n';
    // slices separately, one file per tracked tag
    for (const auto& [tag, slice] : slices) {
      std::ostringstream s;
      for (const auto& r : slice) s << serialize_record(r) << '\n';
      out.write("slices/" + tag + ".jsonl", s.str());
    }
    ordered_json pr;
    pr["records_ok"] = report.records_ok;
    pr["records_malformed"] = report.records_malformed;
    pr["duplicates_dropped"] = report.duplicates_dropped;
    pr["outside_window"] = report.outside_window;
    pr["retweet_records"] = report.retweet_records;
    pr["original_records"] = report.original_records;
    pr["in_window"] = filtered.size();
    out.write("parse_report.json", pr.dump(2) + "\n");
  }

  // ---- graphs + communities (fan out per hashtag) ----------------------
  std::vector<std::string> tags;
  for (const auto& [tag, slice] : slices) tags.push_back(tag);

  std::vector<TagResult> results(tags.size());
  {
    std::vector<std::future<TagResult>> futures;
    futures.reserve(tags.size());
    for (const auto& tag : tags) {
      futures.push_back(std::async(std::launch::async, [&, tag]() {
        TagResult r;
        r.tag = tag;
        r.graph = build_retweet_graph(slices.at(tag), tag);
        if (config.giant_only) r.graph = largest_component(r.graph);
        LouvainParams lp;
        lp.resolution = config.resolution;
        lp.max_passes = config.louvain_max_passes;
        lp.min_gain = config.louvain_min_gain;
        lp.seed = stage_seed(config, "louvain", tag);
        r.partition = louvain(r.graph, lp);
        return r;
      }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  }

  for (const auto& r : results) {
    out.emit(tag_dir(r.tag) + "/edges.csv",
             [&](const std::string& p) { write_edges_csv(r.graph, p); });
    out.emit(tag_dir(r.tag) + "/graph.graphml",
             [&](const std::string& p) { write_graphml(r.graph, p); });
    out.emit(tag_dir(r.tag) + "/communities.csv",
             [&](const std::string& p) { write_communities_csv(r.graph, r.partition, p); });
  }

  // ---- polarity labels --------------------------------------------------
  for (auto& r : results) {
    if (r.graph.node_count() == 0) {
      warnings.push_back("#" + r.tag + ": empty retweet network, skipped");
      continue;
    }
    auto it = seeds_by_tag.find(r.tag);
    if (it == seeds_by_tag.end() || it->second.empty()) {
      warnings.push_back("#" + r.tag + ": no seed accounts configured, left unlabeled");
      continue;
    }
    r.polarity = label_clusters(r.graph, r.partition, it->second);
    for (const auto& missing : r.polarity->skipped_seeds)
      warnings.push_back("#" + r.tag + ": seed account not in network, skipped: " + missing);
    if (r.polarity->labels.empty()) {
      warnings.push_back("#" + r.tag + ": no seed account present in the network, left unlabeled");
      r.polarity.reset();
      continue;
    }
    out.emit(tag_dir(r.tag) + "/top_accounts.csv", [&](const std::string& p) {
      write_top_accounts_csv(r.graph, r.partition, *r.polarity, config.top_k, p);
    });
  }

  std::vector<PolarityMap> all_labels;
  for (const auto& r : results)
    if (r.polarity) all_labels.push_back(*r.polarity);
  out.emit("labels.csv", [&](const std::string& p) { write_labels_csv(all_labels, p); });

  // ---- overlap -----------------------------------------------------------
  std::vector<LabeledNetwork> labeled;
  for (const auto& r : results)
    if (r.polarity) labeled.push_back({&r.graph, &r.partition, &*r.polarity});
  if (labeled.size() < 2)
    throw AnalysisError("overlap needs at least 2 labeled networks, have " +
                        std::to_string(labeled.size()) +
                        " (are the seed accounts present in the corpus?)");

  MembershipTable table = membership_table(labeled);
  HashjackReport hj = hashjack_matrix(table, config.ci_level, config.universe);
  annotate_contra_sizes(hj, labeled);

  out.emit("membership.csv", [&](const std::string& p) { write_membership_csv(table, p); });
  out.emit("odds_matrix.csv", [&](const std::string& p) { write_odds_matrix_csv(hj, p); });
  out.emit("models.json", [&](const std::string& p) { write_models_json(hj, p); });
  out.emit("coefficients.csv", [&](const std::string& p) { write_coefficients_csv(hj, p); });
  for (const auto& [outcome, err] : hj.model_errors)
    warnings.push_back("model contra_" + outcome + " failed: " + err);

  // ---- layout (optional stage) -------------------------------------------
  if (!config.skip_layout) {
    for (const auto& r : results) {
      if (r.graph.node_count() == 0) continue;
      try {
        LayoutParams lp;
        lp.scaling = config.layout_scaling;
        lp.gravity = config.layout_gravity;
        lp.linlog = config.layout_linlog;
        lp.iterations = config.layout_iterations;
        lp.tolerance = config.layout_tolerance;
        lp.barnes_hut = config.layout_barnes_hut;
        lp.seed = stage_seed(config, "layout", r.tag);
        LayoutResult layout = forceatlas2(r.graph, lp);

        const PolarityMap* pol = r.polarity ? &*r.polarity : nullptr;
        out.emit(tag_dir(r.tag) + "/layout.csv", [&](const std::string& p) {
          write_layout_csv(r.graph, layout, &r.partition, pol, p);
        });
        GraphmlNodeAttrs attrs;
        attrs.coords = &layout.positions;
        attrs.community = &r.partition.assignment;
        std::vector<std::string> pol_names;
        if (pol) {
          pol_names.reserve(r.partition.assignment.size());
          for (int c : r.partition.assignment) pol_names.push_back(to_string(pol->label_of(c)));
          attrs.polarity = &pol_names;
        }
        out.emit(tag_dir(r.tag) + "/layout.graphml",
                 [&](const std::string& p) { write_graphml(r.graph, p, attrs); });
        if (config.write_svg)
          out.emit(tag_dir(r.tag) + "/layout.svg", [&](const std::string& p) {
            write_layout_svg(r.graph, layout, &r.partition, p);
          });
      } catch (const std::exception& e) {
        warnings.push_back("#" + r.tag + ": layout failed: " + std::string(e.what()));
      }
    }
  }

  // ---- sentiment agreement (optional stage) --------------------------------
  std::optional<AgreementResult> agreement;
  std::uint64_t annotations_total = 0, annotations_joined = 0;
  if (!config.annotation_file.empty()) {
    try {
      auto annotations = load_annotation_file(config.annotation_file);
      annotations_total = annotations.size();
      std::map<std::string, const TweetRecord*> by_id;
      for (const auto& rec : filtered) by_id[rec.id] = &rec;
      std::map<std::string, const TagResult*> by_tag;
      for (const auto& r : results)
        if (r.polarity) by_tag[r.tag] = &r;

      std::vector<std::pair<ClusterLabel, Sentiment>> rows;
      for (const auto& ann : annotations) {
        auto rec_it = by_id.find(ann.tweet_id);
        if (rec_it == by_id.end()) continue;
        // the author's cluster in the first labeled network the tweet touches
        for (const auto& tag : rec_it->second->tags) {
          auto tr_it = by_tag.find(tag);
          if (tr_it == by_tag.end()) continue;
          auto idx = tr_it->second->graph.index_of(rec_it->second->author);
          if (!idx) continue;
          ClusterLabel label = tr_it->second->polarity->label_of(
              tr_it->second->partition.assignment[static_cast<std::size_t>(*idx)]);
          if (label == ClusterLabel::Unlabeled) continue;
          rows.emplace_back(label, ann.sentiment);
          ++annotations_joined;
          break;
        }
      }
      agreement = sentiment_agreement(rows);
    } catch (const std::exception& e) {
      warnings.push_back("sentiment agreement skipped: " + std::string(e.what()));
    }
  }

  // ---- manifest ------------------------------------------------------------
  ordered_json manifest;
  manifest["schema_version"] = kManifestSchemaVersion;
  manifest["tool_version"] = kToolVersion;

  ordered_json cfg;
  {
    ordered_json inputs = ordered_json::array();
    for (const auto& path : config.inputs) {
      ordered_json f;
      f["path"] = path;
      f["fnv1a64"] = to_hex(fnv1a64_file(path));
      inputs.push_back(f);
    }
    cfg["inputs"] = inputs;
    cfg["tracked"] = config.tracked;
    cfg["window_start"] = format_utc(config.window.start);
    cfg["window_end"] = format_utc(config.window.end);
    cfg["seed"] = config.seed;
    cfg["resolution"] = config.resolution;
    cfg["louvain_max_passes"] = config.louvain_max_passes;
    cfg["louvain_min_gain"] = config.louvain_min_gain;
    cfg["ci_level"] = config.ci_level;
    cfg["z"] = z_quantile(config.ci_level);
    cfg["universe"] = config.universe == UniverseMode::Global ? "global" : "pair";
    cfg["top_k"] = config.top_k;
    cfg["giant_only"] = config.giant_only;
    cfg["skip_layout"] = config.skip_layout;
    if (!config.skip_layout) {
      cfg["layout_iterations"] = config.layout_iterations;
      cfg["layout_scaling"] = config.layout_scaling;
      cfg["layout_gravity"] = config.layout_gravity;
      cfg["layout_linlog"] = config.layout_linlog;
      cfg["layout_tolerance"] = config.layout_tolerance;
      if (config.layout_barnes_hut) cfg["layout_barnes_hut"] = *config.layout_barnes_hut;
    }
    cfg["seed_file"] = config.seed_file;
    cfg["seed_file_fnv1a64"] = to_hex(fnv1a64_file(config.seed_file));
    if (!config.alias_file.empty()) cfg["alias_file"] = config.alias_file;
    if (!config.annotation_file.empty()) cfg["annotation_file"] = config.annotation_file;
  }
  manifest["config"] = cfg;

  {
    ordered_json pr;
    pr["records_ok"] = report.records_ok;
    pr["records_malformed"] = report.records_malformed;
    pr["duplicates_dropped"] = report.duplicates_dropped;
    pr["outside_window"] = report.outside_window;
    pr["retweet_records"] = report.retweet_records;
    pr["original_records"] = report.original_records;
    pr["in_window"] = filtered.size();
    manifest["ingest"] = pr;
  }

  {
    ordered_json nets = ordered_json::object();
    for (const auto& r : results) {
      ordered_json n;
      n["nodes"] = r.graph.node_count();
      n["edges"] = r.graph.edges.size();
      n["total_weight"] = r.graph.total_weight();
      n["self_retweets_dropped"] = r.graph.self_retweets_dropped;
      n["modularity"] = r.partition.modularity;
      n["communities"] = r.partition.community_count();
      n["community_sizes"] = r.partition.community_sizes;
      auto degs = r.graph.undirected_degrees();
      n["isolated_nodes"] = std::count(degs.begin(), degs.end(), 0);
      if (r.polarity) {
        ordered_json lab;
        int pro = r.polarity->community_with(ClusterLabel::Pro);
        int contra = r.polarity->community_with(ClusterLabel::Contra);
        if (pro >= 0) lab["pro_community"] = pro;
        if (contra >= 0) lab["contra_community"] = contra;
        lab["coverage"] = r.polarity->coverage;
        n["labels"] = lab;
      }
      nets[r.tag] = n;
    }
    manifest["networks"] = nets;
  }

  {
    ordered_json ov;
    ov["universe_size"] = table.universe_size();
    ov["excluded_unlabeled"] = table.excluded_unlabeled;
    ov["parties"] = table.parties;
    ordered_json conv = ordered_json::object();
    for (const auto& [outcome, model] : hj.models) conv[outcome] = model.converged;
    ov["models_converged"] = conv;
    manifest["overlap"] = ov;
  }

  if (agreement) {
    ordered_json ag;
    ag["value"] = agreement->value;
    ag["retained"] = agreement->retained;
    ag["dropped_unclear"] = agreement->dropped_unclear;
    ag["annotations_total"] = annotations_total;
    ag["annotations_joined"] = annotations_joined;
    manifest["sentiment_agreement"] = ag;
  }

  manifest["warnings"] = warnings;

  {
    ordered_json files = ordered_json::array();
    std::string combined;
    for (const auto& rel : out.sorted_files()) {
      std::string hash = to_hex(fnv1a64_file((fs::path(out.dir()) / rel).string()));
      ordered_json f;
      f["path"] = rel;
      f["fnv1a64"] = hash;
      files.push_back(f);
      combined += rel;
      combined += ':';
      combined += hash;
      combined += '\n';
    }
    manifest["files"] = files;
    bundle.bundle_checksum = to_hex(fnv1a64(combined));
    manifest["bundle_checksum"] = bundle.bundle_checksum;
  }

  fs::path manifest_path = fs::path(config.out_dir) / "run_manifest.json";
  write_file(manifest_path.string(), manifest.dump(2) + "\n");

  bundle.out_dir = config.out_dir;
  bundle.files = out.sorted_files();
  bundle.files.push_back("run_manifest.json");
  bundle.manifest_path = manifest_path.string();
  return bundle;
}

}  // namespace hashjack
