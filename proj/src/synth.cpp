#include "hashjack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hashjack/errors.hpp"
#include "hashjack/time_util.hpp"
#include "hashjack/util.hpp"

namespace hashjack {

std::string to_string(const SideKey& side) {
  return to_string(side.polarity) + ":" + side.party;
}

void SynthConfig::validate() const {
  if (parties.empty()) throw ConfigError("synth: no parties configured");
  std::set<std::string> seen;
  for (const auto& p : parties) {
    if (p.empty()) throw ConfigError("synth: empty party tag");
    if (!seen.insert(p).second) throw ConfigError("synth: duplicate party tag " + p);
  }
  if (hub_count < 1) throw ConfigError("synth: hub_count must be >= 1");
  if (hub_exponent < 0.0) throw ConfigError("synth: hub_exponent must be >= 0");
  if (retweets_per_user <= 0.0) throw ConfigError("synth: retweets_per_user must be positive");
  if (own_tag_rate < 0.0 || own_tag_rate > 1.0)
    throw ConfigError("synth: own_tag_rate must lie in [0,1]");
  if (window.start > window.end) throw ConfigError("synth: window start after end");
  for (const auto& [side, row] : hashjack) {
    if (!seen.count(side.party))
      throw ConfigError("synth: hashjack row for unknown party " + side.party);
    double row_sum = own_tag_rate;
    for (const auto& [target, p] : row) {
      if (!seen.count(target))
        throw ConfigError("synth: hashjack target is not a configured party: " + target);
      if (target == side.party)
        throw ConfigError("synth: hashjack row for " + to_string(side) +
                          " may not target its own party (it would bridge both clusters of one network)");
      if (p < 0.0 || p > 1.0)
        throw ConfigError("synth: hashjack probability out of [0,1] for " + to_string(side) +
                          " -> " + target);
      row_sum += p;
    }
    if (row_sum > 1.0 + 1e-12)
      throw ConfigError("synth: own_tag_rate plus hashjack row for " + to_string(side) +
                        " exceeds 1 (" + format_double(row_sum) + ")");
  }
  for (const auto& [party, n] : pro_users)
    if (!seen.count(party)) throw ConfigError("synth: pro_users for unknown party " + party);
  for (const auto& [party, n] : contra_users)
    if (!seen.count(party)) throw ConfigError("synth: contra_users for unknown party " + party);
}

namespace {

std::uint32_t population(const std::map<std::string, std::uint32_t>& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? 0 : it->second;
}

double jack_rate(const SynthConfig& cfg, const SideKey& side, const std::string& target) {
  auto row = cfg.hashjack.find(side);
  if (row == cfg.hashjack.end()) return 0.0;
  auto it = row->second.find(target);
  return it == row->second.end() ? 0.0 : it->second;
}

// Draw a hub rank with probability proportional to (rank+1)^-exponent.
class HubSampler {
 public:
  HubSampler(std::uint32_t count, double exponent) {
    cumulative_.reserve(count);
    double total = 0.0;
    for (std::uint32_t j = 0; j < count; ++j) {
      total += std::pow(static_cast<double>(j + 1), -exponent);
      cumulative_.push_back(total);
    }
  }

  std::uint32_t draw(Rng& rng) const {
    double u = rng.next_double() * cumulative_.back();
    auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

std::string account_name(const SideKey& side, bool hub, std::uint32_t i) {
  std::string prefix = hub ? "hub_" : "u_";
  prefix += side.polarity == Polarity::Pro ? "pro_" : "con_";
  prefix += side.party;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%05u", i);
  return prefix + buf;
}

}  // namespace

std::vector<PlantedOdds> implied_odds(const SynthConfig& config) {
  // The planted odds compare pro-X users against the rest of the risk set
  // for party Y: user populations of every party other than Y (Y's own
  // natives cannot carry a hashtag into their own discourse). This matches
  // the pair universe mode of the odds matrix; hub accounts are excluded
  // from the arithmetic.
  std::vector<SideKey> sides;
  for (const auto& party : config.parties) {
    if (population(config.pro_users, party) > 0) sides.push_back({party, Polarity::Pro});
    if (population(config.contra_users, party) > 0) sides.push_back({party, Polarity::Contra});
  }

  std::vector<PlantedOdds> out;
  for (const auto& x : config.parties) {
    if (population(config.pro_users, x) == 0) continue;
    for (const auto& y : config.parties) {
      if (x == y) continue;
      PlantedOdds planted;
      planted.pro_party = x;
      planted.contra_party = y;
      planted.p_source = jack_rate(config, {x, Polarity::Pro}, y);

      double weighted = 0.0, total = 0.0;
      for (const auto& side : sides) {
        if (side.party == y) continue;
        if (side.party == x && side.polarity == Polarity::Pro) continue;
        double pop = side.polarity == Polarity::Pro ? population(config.pro_users, side.party)
                                                    : population(config.contra_users, side.party);
        weighted += pop * jack_rate(config, side, y);
        total += pop;
      }
      planted.p_baseline = total > 0.0 ? weighted / total : 0.0;

      const double o1 = planted.p_source / (1.0 - std::min(planted.p_source, 1.0 - 1e-12));
      const double o0 = planted.p_baseline / (1.0 - std::min(planted.p_baseline, 1.0 - 1e-12));
      if (o0 > 0.0)
        planted.implied_or = o1 / o0;
      else
        planted.implied_or = o1 > 0.0 ? std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::quiet_NaN();
      out.push_back(planted);
    }
  }
  return out;
}

SynthResult generate_corpus(const SynthConfig& config) {
  config.validate();

  SynthResult result;
  GroundTruth& truth = result.truth;

  HubSampler hub_sampler(config.hub_count, config.hub_exponent);

  // hubs exist for every side of every party, users only where populated
  for (const auto& party : config.parties) {
    for (Polarity pol : {Polarity::Pro, Polarity::Contra}) {
      SideKey side{party, pol};
      auto& hub_list = truth.hubs[side];
      for (std::uint32_t j = 0; j < config.hub_count; ++j) {
        std::string name = account_name(side, true, j);
        hub_list.push_back(name);
        truth.side_of[name] = side;
      }
    }
  }

  Rng rng(derive_seed(config.seed, "synth"));
  const std::int64_t span = config.window.end - config.window.start + 1;

  struct PendingRecord {
    std::int64_t ts;
    std::uint64_t order;  // draw order; ties in ts resolved deterministically
    std::string author;
    std::string hub;
    std::string tag;
  };
  std::vector<PendingRecord> pending;
  std::uint64_t order = 0;

  for (const auto& party : config.parties) {
    for (Polarity pol : {Polarity::Pro, Polarity::Contra}) {
      SideKey side{party, pol};
      std::uint32_t count = pol == Polarity::Pro ? population(config.pro_users, party)
                                                 : population(config.contra_users, party);
      for (std::uint32_t i = 0; i < count; ++i) {
        std::string user = account_name(side, false, i);
        truth.side_of[user] = side;

        // per-user membership draws
        std::vector<std::string> targets;
        for (const auto& y : config.parties)
          if (rng.bernoulli(jack_rate(config, side, y))) targets.push_back(y);
        if (!targets.empty()) truth.jacked[user] = targets;

        std::uint64_t n_retweets = rng.poisson(config.retweets_per_user);
        std::uint64_t floor = 1 + targets.size();
        if (n_retweets < floor) n_retweets = floor;

        for (std::uint64_t r = 0; r < n_retweets; ++r) {
          // first retweets pin one appearance per drawn discourse
          std::string tag;
          const std::vector<std::string>* hub_pool = nullptr;
          if (r == 0) {
            tag = party;
            hub_pool = &truth.hubs.at(side);
          } else if (r <= targets.size()) {
            tag = targets[static_cast<std::size_t>(r - 1)];
            hub_pool = &truth.hubs.at({tag, Polarity::Contra});
          } else if (targets.empty() || rng.bernoulli(config.own_tag_rate)) {
            tag = party;
            hub_pool = &truth.hubs.at(side);
          } else {
            tag = targets[static_cast<std::size_t>(rng.next_below(targets.size()))];
            hub_pool = &truth.hubs.at({tag, Polarity::Contra});
          }
          const std::string& hub = (*hub_pool)[hub_sampler.draw(rng)];
          std::int64_t ts =
              config.window.start + static_cast<std::int64_t>(rng.next_below(
                                        static_cast<std::uint64_t>(span)));
          pending.push_back({ts, order++, user, hub, tag});
        }
      }
    }
  }

  std::sort(pending.begin(), pending.end(), [](const PendingRecord& a, const PendingRecord& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.order < b.order;
  });

  result.records.reserve(pending.size());
  std::uint64_t seq = 0;
  for (const auto& p : pending) {
    TweetRecord rec;
    char idbuf[24];
    std::snprintf(idbuf, sizeof(idbuf), "syn%010llu", static_cast<unsigned long long>(seq++));
    rec.id = idbuf;
    rec.author = p.author;
    rec.rt_author = p.hub;
    rec.rt_id = "orig_" + p.hub;
    rec.tags = {p.tag};
    rec.ts = p.ts;
    result.records.push_back(std::move(rec));
  }

  truth.planted = implied_odds(config);
  return result;
}

std::map<std::string, SeedList> seeds_from_truth(const GroundTruth& truth) {
  std::map<std::string, SeedList> seeds;
  for (const auto& [side, hub_list] : truth.hubs)
    for (const auto& hub : hub_list) seeds[side.party][hub] = side.polarity;
  return seeds;
}

void write_corpus_jsonl(const std::vector<TweetRecord>& records, const std::string& path) {
  std::ostringstream out;
  for (const auto& r : records) out << serialize_record(r) << '\n';
  write_file(path, out.str());
}

void write_ground_truth_csv(const GroundTruth& truth, const std::string& path) {
  std::ostringstream out;
  out << "account,party,polarity,is_hub\n";
  std::set<std::string> hub_set;
  for (const auto& [side, hubs] : truth.hubs) hub_set.insert(hubs.begin(), hubs.end());
  for (const auto& [account, side] : truth.side_of)
    out << csv_escape(account) << ',' << csv_escape(side.party) << ',' << to_string(side.polarity)
        << ',' << (hub_set.count(account) ? 1 : 0) << '\n';
  write_file(path, out.str());
}

void write_planted_odds_csv(const GroundTruth& truth, const std::string& path) {
  std::ostringstream out;
  out << "pro_party,contra_party,p_source,p_baseline,implied_or\n";
  for (const auto& p : truth.planted)
    out << csv_escape(p.pro_party) << ',' << csv_escape(p.contra_party) << ','
        << format_double(p.p_source) << ',' << format_double(p.p_baseline) << ','
        << format_double(p.implied_or) << '\n';
  write_file(path, out.str());
}

void write_seed_csv(const GroundTruth& truth, const std::string& path) {
  std::ostringstream out;
  out << "hashtag,account,polarity\n";
  auto seeds = seeds_from_truth(truth);
  for (const auto& [tag, list] : seeds)
    for (const auto& [account, polarity] : list)
      out << csv_escape(tag) << ',' << csv_escape(account) << ',' << to_string(polarity) << '\n';
  write_file(path, out.str());
}

}  // namespace hashjack
