#pragma once

#include <map>
#include <string>
#include <vector>

#include "hashjack/community.hpp"
#include "hashjack/graph.hpp"

namespace hashjack {

enum class Polarity { Pro, Contra };

enum class ClusterLabel { Pro, Contra, Unlabeled };

std::string to_string(Polarity p);
std::string to_string(ClusterLabel l);

// Analyst-provided anchors for one hashtag's party.
using SeedList = std::map<std::string, Polarity>;

struct PolarityMap {
  std::string hashtag;
  std::map<int, ClusterLabel> labels;  // community id -> label
  double coverage = 0.0;               // fraction of nodes in labeled communities
  std::vector<std::string> skipped_seeds;  // seed accounts absent from the graph

  ClusterLabel label_of(int community) const;
  // community id carrying the given label, or -1
  int community_with(ClusterLabel label) const;
};

// The two largest communities each take the majority polarity of their
// seed members; everything else stays Unlabeled. Errors when a community's
// seeds tie or when Pro and Contra land on the same community.
PolarityMap label_clusters(const RetweetGraph& graph, const Partition& partition,
                           const SeedList& seeds);

// Per-community top-k accounts by weighted in-degree within the full
// graph; the machine-readable stand-in for manual content analysis.
std::vector<std::pair<int, RankedAccounts>> top_accounts_report(const RetweetGraph& graph,
                                                                const Partition& partition,
                                                                int k);

enum class Sentiment { Positive, Negative, Unclear };

struct SentimentAnnotation {
  std::string tweet_id;
  Sentiment sentiment = Sentiment::Unclear;
};

struct AgreementResult {
  double value = 0.0;  // phi coefficient of the 2x2 label/sentiment table
  int retained = 0;
  int dropped_unclear = 0;
};

// Pearson correlation of (Pro->1, Contra->0) against (+->1, -->0) after
// dropping rows with unclear sentiment. Throws AnalysisError when fewer
// than two decided rows remain or a column is constant.
AgreementResult sentiment_agreement(
    const std::vector<std::pair<ClusterLabel, Sentiment>>& rows);

// Seed file: CSV "hashtag,account,polarity" with polarity in {pro,contra}.
std::map<std::string, SeedList> load_seed_file(const std::string& path);

// Annotation file: CSV "tweet_id,sentiment" with sentiment in {+,-,?}.
std::vector<SentimentAnnotation> load_annotation_file(const std::string& path);

void write_labels_csv(const std::vector<PolarityMap>& maps, const std::string& path);
std::map<std::string, PolarityMap> read_labels_csv(const std::string& path);

void write_top_accounts_csv(const RetweetGraph& graph, const Partition& partition,
                            const PolarityMap& polarity, int k, const std::string& path);

}  // namespace hashjack
