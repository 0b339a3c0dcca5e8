#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hashjack/community.hpp"
#include "hashjack/ingest.hpp"
#include "hashjack/layout.hpp"
#include "hashjack/overlap.hpp"

namespace hashjack {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kOutputDirEnvVar = "HASHJACK_OUTPUT_DIR";

struct PipelineConfig {
  std::vector<std::string> inputs;
  std::set<std::string> tracked = default_tracked_tags();
  std::string alias_file;  // optional
  CorpusWindow window = default_window();
  std::uint64_t seed = 0;

  double resolution = 1.0;
  int louvain_max_passes = 100;
  double louvain_min_gain = 1e-9;

  int layout_iterations = 1000;
  double layout_scaling = 2.0;
  double layout_gravity = 1.0;
  bool layout_linlog = false;
  double layout_tolerance = 1.0;
  std::optional<bool> layout_barnes_hut;
  bool skip_layout = false;
  bool write_svg = false;

  double ci_level = 0.99;
  UniverseMode universe = UniverseMode::Global;
  int top_k = 50;
  bool giant_only = false;

  std::string seed_file;        // required
  std::string annotation_file;  // optional
  std::string out_dir;
};

struct ReportBundle {
  std::string out_dir;
  std::vector<std::string> files;  // relative to out_dir, sorted
  std::string manifest_path;
  std::string bundle_checksum;
  std::vector<std::string> warnings;
};

// ingest -> graphs -> communities -> labels -> overlap are all-or-nothing;
// layout and sentiment agreement downgrade failures to warnings. All
// emitted files are covered by the manifest checksum, and a rerun with
// identical inputs and seed reproduces them byte for byte.
ReportBundle run_pipeline(const PipelineConfig& config);

// Per-stage pseudo-random streams, split from the root seed by stage name
// and hashtag. Subcommands use the same derivation, so stage-by-stage runs
// compose to the pipeline's exact outputs.
std::uint64_t stage_seed(const PipelineConfig& config, std::string_view stage,
                         std::string_view key);

}  // namespace hashjack
