#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hashjack/ingest.hpp"
#include "hashjack/polarity.hpp"

namespace hashjack {

// One population side: the pro or contra camp of one party's discourse.
struct SideKey {
  std::string party;
  Polarity polarity = Polarity::Pro;

  auto operator<=>(const SideKey&) const = default;
};

std::string to_string(const SideKey& side);  // "pro:afd" / "contra:afd"

// Synthetic world: every side has hub accounts that get retweeted and a
// (possibly empty) native user population retweeting them under the
// party's tag. Cross-discourse participation is planted per user: a user
// drawn as a hashjacker of party Y retweets Y's contra-side hubs under
// tag Y, joining Y's contra cluster.
struct SynthConfig {
  std::vector<std::string> parties;
  std::map<std::string, std::uint32_t> pro_users;     // party -> native pro population
  std::map<std::string, std::uint32_t> contra_users;  // party -> native contra population
  std::uint32_t hub_count = 5;       // hubs per side
  double hub_exponent = 1.0;         // retweet target j drawn with prob ~ (j+1)^-exponent
  double retweets_per_user = 25.0;   // Poisson mean
  double own_tag_rate = 0.6;         // per-retweet share staying in the home discourse
  // (source side, target party) -> per-user probability of joining the
  // target party's contra discourse during the window. Rows may not
  // target the source's own party.
  std::map<SideKey, std::map<std::string, double>> hashjack;
  CorpusWindow window = default_window();
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct PlantedOdds {
  std::string pro_party;
  std::string contra_party;
  double p_source = 0.0;    // membership probability for pro-X users
  double p_baseline = 0.0;  // population-weighted rate over all other users
  double implied_or = 1.0;
};

struct GroundTruth {
  std::map<std::string, SideKey> side_of;          // account -> native side
  std::map<SideKey, std::vector<std::string>> hubs;
  std::vector<PlantedOdds> planted;
  std::map<std::string, std::vector<std::string>> jacked;  // account -> target parties
};

struct SynthResult {
  std::vector<TweetRecord> records;
  GroundTruth truth;
};

// Deterministic per config.seed; records come sorted by timestamp.
SynthResult generate_corpus(const SynthConfig& config);

// Hub accounts double as labeling seeds for the pipeline.
std::map<std::string, SeedList> seeds_from_truth(const GroundTruth& truth);

void write_corpus_jsonl(const std::vector<TweetRecord>& records, const std::string& path);
void write_ground_truth_csv(const GroundTruth& truth, const std::string& path);
void write_planted_odds_csv(const GroundTruth& truth, const std::string& path);
void write_seed_csv(const GroundTruth& truth, const std::string& path);

// Implied odds from config arithmetic alone (hub accounts excluded).
std::vector<PlantedOdds> implied_odds(const SynthConfig& config);

}  // namespace hashjack
