#include "hashjack/polarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hashjack/errors.hpp"
#include "hashjack/util.hpp"

namespace hashjack {

std::string to_string(Polarity p) { return p == Polarity::Pro ? "pro" : "contra"; }

std::string to_string(ClusterLabel l) {
  switch (l) {
    case ClusterLabel::Pro: return "pro";
    case ClusterLabel::Contra: return "contra";
    default: return "unlabeled";
  }
}

ClusterLabel PolarityMap::label_of(int community) const {
  auto it = labels.find(community);
  return it == labels.end() ? ClusterLabel::Unlabeled : it->second;
}

int PolarityMap::community_with(ClusterLabel label) const {
  for (const auto& [c, l] : labels)
    if (l == label) return c;
  return -1;
}

PolarityMap label_clusters(const RetweetGraph& graph, const Partition& partition,
                           const SeedList& seeds) {
  PolarityMap out;
  out.hashtag = graph.hashtag;

  // canonical ids come size-ordered, so the two largest are 0 and 1
  const int n_labelable = std::min(2, partition.community_count());

  std::vector<int> pro_votes(static_cast<std::size_t>(partition.community_count()), 0);
  std::vector<int> contra_votes(static_cast<std::size_t>(partition.community_count()), 0);
  for (const auto& [account, polarity] : seeds) {
    auto idx = graph.index_of(account);
    if (!idx) {
      out.skipped_seeds.push_back(account);
      continue;
    }
    int c = partition.assignment[static_cast<std::size_t>(*idx)];
    if (polarity == Polarity::Pro) ++pro_votes[static_cast<std::size_t>(c)];
    else ++contra_votes[static_cast<std::size_t>(c)];
  }

  int pro_comm = -1, contra_comm = -1;
  for (int c = 0; c < n_labelable; ++c) {
    int pv = pro_votes[static_cast<std::size_t>(c)];
    int cv = contra_votes[static_cast<std::size_t>(c)];
    if (pv == 0 && cv == 0) continue;
    if (pv == cv)
      throw AnalysisError("community " + std::to_string(c) + " of #" + graph.hashtag +
                          " has evenly split seeds (" + std::to_string(pv) +
                          " pro vs " + std::to_string(cv) + " contra); add more seeds");
    if (pv > cv) {
      if (pro_comm != -1)
        throw AnalysisError("#" + graph.hashtag +
                            ": seed list labels two communities pro; inconsistent with structure");
      pro_comm = c;
    } else {
      if (contra_comm != -1)
        throw AnalysisError("#" + graph.hashtag +
                            ": seed list labels two communities contra; inconsistent with structure");
      contra_comm = c;
    }
  }
  if (pro_comm != -1 && pro_comm == contra_comm)
    throw AnalysisError("#" + graph.hashtag + ": pro and contra majority in the same community");

  if (pro_comm != -1) out.labels[pro_comm] = ClusterLabel::Pro;
  if (contra_comm != -1) out.labels[contra_comm] = ClusterLabel::Contra;

  std::size_t covered = 0;
  if (pro_comm != -1) covered += static_cast<std::size_t>(partition.community_sizes[static_cast<std::size_t>(pro_comm)]);
  if (contra_comm != -1)
    covered += static_cast<std::size_t>(partition.community_sizes[static_cast<std::size_t>(contra_comm)]);
  out.coverage = graph.node_count() == 0
                     ? 0.0
                     : static_cast<double>(covered) / static_cast<double>(graph.node_count());
  return out;
}

std::vector<std::pair<int, RankedAccounts>> top_accounts_report(const RetweetGraph& graph,
                                                                const Partition& partition,
                                                                int k) {
  if (k < 1) throw ConfigError("top_accounts_report requires k >= 1");
  auto in = graph.in_weights();

  std::vector<std::pair<int, RankedAccounts>> out;
  out.reserve(static_cast<std::size_t>(partition.community_count()));
  for (int c = 0; c < partition.community_count(); ++c) {
    std::vector<int> members;
    for (int v = 0; v < graph.node_count(); ++v)
      if (partition.assignment[static_cast<std::size_t>(v)] == c) members.push_back(v);
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      auto ia = in[static_cast<std::size_t>(a)], ib = in[static_cast<std::size_t>(b)];
      if (ia != ib) return ia > ib;
      return graph.account(a) < graph.account(b);
    });
    RankedAccounts ranked;
    int limit = std::min<int>(k, static_cast<int>(members.size()));
    for (int i = 0; i < limit; ++i)
      ranked.entries.emplace_back(graph.account(members[static_cast<std::size_t>(i)]),
                                  in[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])]);
    out.emplace_back(c, std::move(ranked));
  }
  return out;
}

AgreementResult sentiment_agreement(
    const std::vector<std::pair<ClusterLabel, Sentiment>>& rows) {
  AgreementResult res;
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (const auto& [label, sentiment] : rows) {
    if (sentiment == Sentiment::Unclear) {
      ++res.dropped_unclear;
      continue;
    }
    if (label == ClusterLabel::Unlabeled)
      throw AnalysisError("sentiment_agreement rows must carry a pro or contra label");
    double x = label == ClusterLabel::Pro ? 1.0 : 0.0;
    double y = sentiment == Sentiment::Positive ? 1.0 : 0.0;
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
    ++res.retained;
  }
  if (res.retained < 2)
    throw AnalysisError("sentiment_agreement needs at least 2 decided rows, got " +
                        std::to_string(res.retained));
  const double n = res.retained;
  double var_x = n * sxx - sx * sx;
  double var_y = n * syy - sy * sy;
  if (var_x <= 0.0 || var_y <= 0.0)
    throw AnalysisError("sentiment_agreement undefined: constant column after dropping unclear rows");
  res.value = (n * sxy - sx * sy) / std::sqrt(var_x * var_y);
  return res;
}

std::map<std::string, SeedList> load_seed_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open seed file: " + path);
  std::map<std::string, SeedList> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (lineno == 1 && t == "hashtag,account,polarity") continue;
    auto parts = split(t, ',');
    if (parts.size() != 3)
      throw ConfigError("seed file " + path + " line " + std::to_string(lineno) +
                        ": expected 'hashtag,account,polarity'");
    std::string tag = lower_utf8(trim(parts[0]));
    std::string account = trim(parts[1]);
    std::string pol = lower_utf8(trim(parts[2]));
    Polarity p;
    if (pol == "pro") p = Polarity::Pro;
    else if (pol == "contra") p = Polarity::Contra;
    else
      throw ConfigError("seed file " + path + " line " + std::to_string(lineno) +
                        ": polarity must be pro or contra");
    auto& list = out[tag];
    if (list.count(account))
      throw ConfigError("seed file " + path + ": account '" + account +
                        "' listed twice for #" + tag);
    list[account] = p;
  }
  return out;
}

std::vector<SentimentAnnotation> load_annotation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open annotation file: " + path);
  std::vector<SentimentAnnotation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (lineno == 1 && t == "tweet_id,sentiment") continue;
    auto parts = split(t, ',');
    if (parts.size() != 2)
      throw ConfigError("annotation file " + path + " line " + std::to_string(lineno) +
                        ": expected 'tweet_id,sentiment'");
    SentimentAnnotation a;
    a.tweet_id = trim(parts[0]);
    std::string s = trim(parts[1]);
    if (s == "+") a.sentiment = Sentiment::Positive;
    else if (s == "-") a.sentiment = Sentiment::Negative;
    else if (s == "?") a.sentiment = Sentiment::Unclear;
    else
      throw ConfigError("annotation file " + path + " line " + std::to_string(lineno) +
                        ": sentiment must be one of + - ?");
    out.push_back(std::move(a));
  }
  return out;
}

void write_labels_csv(const std::vector<PolarityMap>& maps, const std::string& path) {
  std::ostringstream out;
  out << "hashtag,community_id,label,coverage\n";
  for (const auto& m : maps)
    for (const auto& [c, l] : m.labels)
      out << csv_escape(m.hashtag) << ',' << c << ',' << to_string(l) << ','
          << format_double(m.coverage) << '\n';
  write_file(path, out.str());
}

std::map<std::string, PolarityMap> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open labels file: " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "hashtag,community_id,label,coverage")
    throw InputError("bad labels header in " + path);
  std::map<std::string, PolarityMap> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto parts = split(line, ',');
    if (parts.size() != 4)
      throw InputError(path + " line " + std::to_string(lineno) + ": expected 4 fields");
    auto& m = out[parts[0]];
    m.hashtag = parts[0];
    int c = std::stoi(parts[1]);
    if (parts[2] == "pro") m.labels[c] = ClusterLabel::Pro;
    else if (parts[2] == "contra") m.labels[c] = ClusterLabel::Contra;
    else
      throw InputError(path + " line " + std::to_string(lineno) + ": bad label");
    m.coverage = std::stod(parts[3]);
  }
  return out;
}

void write_top_accounts_csv(const RetweetGraph& graph, const Partition& partition,
                            const PolarityMap& polarity, int k, const std::string& path) {
  auto report = top_accounts_report(graph, partition, k);
  std::ostringstream out;
  out << "community_id,label,rank,account,in_weight\n";
  for (const auto& [c, ranked] : report) {
    std::string label = to_string(polarity.label_of(c));
    int rank = 1;
    for (const auto& [account, w] : ranked.entries)
      out << c << ',' << label << ',' << rank++ << ',' << csv_escape(account) << ',' << w << '\n';
  }
  write_file(path, out.str());
}

}  // namespace hashjack
