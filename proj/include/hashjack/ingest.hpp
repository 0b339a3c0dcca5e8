#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hashjack {

// One tweet. `rt_author`/`rt_id` are present iff the tweet is a retweet.
// Hashtags are stored normalized: lowercased, '#' stripped, alias-mapped,
// deduplicated and sorted.
struct TweetRecord {
  std::string id;
  std::string author;
  std::optional<std::string> rt_author;
  std::optional<std::string> rt_id;
  std::vector<std::string> tags;
  std::int64_t ts = 0;  // UTC epoch seconds
  std::optional<std::string> text;

  bool is_retweet() const { return rt_author.has_value(); }
  bool operator==(const TweetRecord&) const = default;
};

// Inclusive on both ends.
struct CorpusWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;
};

// The observation window used throughout by default: May 28th 00:00:00
// through June 4th 23:59:59 2018 CEST, expressed in UTC.
CorpusWindow default_window();

struct ParseReport {
  std::uint64_t records_ok = 0;
  std::uint64_t records_malformed = 0;
  std::uint64_t duplicates_dropped = 0;
  std::uint64_t outside_window = 0;
  // retweets + originals = records_ok; exposed separately so corpus size
  // can be compared under either counting convention.
  std::uint64_t retweet_records = 0;
  std::uint64_t original_records = 0;

  void merge(const ParseReport& other);
};

using AliasTable = std::map<std::string, std::string>;

// {gruene, grüne, diegrünen} -> gruene
AliasTable default_alias_table();

// CSV lines "alias,canonical"; '#' comment lines allowed.
AliasTable load_alias_file(const std::string& path);

// Lowercase (UTF-8 Latin-1 aware), strip leading '#', then alias-map.
// Returns empty string for tags that normalize to nothing.
std::string normalize_hashtag(std::string_view raw, const AliasTable& aliases);

// The seven party tags the analysis tracks by default.
std::set<std::string> default_tracked_tags();

// Input: UTF-8 line-delimited JSON objects with keys
//   id, author, tags (array), ts (ISO-8601 with offset),
//   rt_author?, rt_id?, text?
// Malformed lines are counted, never fatal. Duplicate ids: first wins.
std::pair<std::vector<TweetRecord>, ParseReport> parse_corpus(
    std::istream& stream, const AliasTable& aliases = default_alias_table());

// Multi-file variant; duplicates are tracked across files.
std::pair<std::vector<TweetRecord>, ParseReport> parse_corpus_files(
    const std::vector<std::string>& paths,
    const AliasTable& aliases = default_alias_table());

// Canonical one-line serialization; parse(serialize(r)) == r.
std::string serialize_record(const TweetRecord& rec);

std::vector<TweetRecord> filter_window(const std::vector<TweetRecord>& records,
                                       const CorpusWindow& window);

// A record carrying k tracked hashtags lands in all k slices.
// Throws ConfigError on an empty tracked set.
std::map<std::string, std::vector<TweetRecord>> slice_by_hashtag(
    const std::vector<TweetRecord>& records, const std::set<std::string>& tracked);

}  // namespace hashjack
