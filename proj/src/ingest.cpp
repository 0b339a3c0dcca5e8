#include "hashjack/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "hashjack/errors.hpp"
#include "hashjack/time_util.hpp"
#include "hashjack/util.hpp"

namespace hashjack {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

CorpusWindow default_window() {
  // CEST is UTC+2 during the window.
  return CorpusWindow{parse_iso8601("2018-05-28T00:00:00+02:00"),
                      parse_iso8601("2018-06-04T23:59:59+02:00")};
}

void ParseReport::merge(const ParseReport& other) {
  records_ok += other.records_ok;
  records_malformed += other.records_malformed;
  duplicates_dropped += other.duplicates_dropped;
  outside_window += other.outside_window;
  retweet_records += other.retweet_records;
  original_records += other.original_records;
}

AliasTable default_alias_table() {
  return AliasTable{
      {"gruene", "gruene"},
      {"grüne", "gruene"},
      {"diegrünen", "gruene"},
  };
}

AliasTable load_alias_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open alias file: " + path);
  AliasTable table = default_alias_table();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto parts = split(t, ',');
    if (parts.size() != 2)
      throw ConfigError("alias file " + path + " line " + std::to_string(lineno) +
                        ": expected 'alias,canonical'");
    std::string alias = lower_utf8(trim(parts[0]));
    std::string canon = lower_utf8(trim(parts[1]));
    if (alias.empty() || canon.empty())
      throw ConfigError("alias file " + path + " line " + std::to_string(lineno) +
                        ": empty field");
    table[alias] = canon;
  }
  return table;
}

std::string normalize_hashtag(std::string_view raw, const AliasTable& aliases) {
  std::string t = lower_utf8(trim(raw));
  if (!t.empty() && t[0] == '#') t.erase(0, 1);
  auto it = aliases.find(t);
  if (it != aliases.end()) return it->second;
  return t;
}

std::set<std::string> default_tracked_tags() {
  return {"afd", "cdu", "csu", "fdp", "gruene", "linke", "spd"};
}

namespace {

// nullptr result means the line is malformed.
std::optional<TweetRecord> parse_line(const std::string& line, const AliasTable& aliases) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;

  TweetRecord rec;
  if (!j.contains("id") || !j["id"].is_string()) return std::nullopt;
  if (!j.contains("author") || !j["author"].is_string()) return std::nullopt;
  if (!j.contains("tags") || !j["tags"].is_array()) return std::nullopt;
  if (!j.contains("ts") || !j["ts"].is_string()) return std::nullopt;
  rec.id = j["id"].get<std::string>();
  rec.author = j["author"].get<std::string>();
  if (rec.id.empty() || rec.author.empty()) return std::nullopt;

  try {
    rec.ts = parse_iso8601(j["ts"].get<std::string>());
  } catch (const InputError&) {
    return std::nullopt;
  }

  if (j.contains("rt_author") && !j["rt_author"].is_null()) {
    if (!j["rt_author"].is_string()) return std::nullopt;
    // a retweet must name the retweeted tweet as well
    if (!j.contains("rt_id") || !j["rt_id"].is_string()) return std::nullopt;
    rec.rt_author = j["rt_author"].get<std::string>();
    rec.rt_id = j["rt_id"].get<std::string>();
    if (rec.rt_author->empty() || rec.rt_id->empty()) return std::nullopt;
  } else if (j.contains("rt_id") && !j["rt_id"].is_null()) {
    return std::nullopt;
  }

  for (const auto& t : j["tags"]) {
    if (!t.is_string()) return std::nullopt;
    std::string norm = normalize_hashtag(t.get<std::string>(), aliases);
    if (!norm.empty()) rec.tags.push_back(std::move(norm));
  }
  std::sort(rec.tags.begin(), rec.tags.end());
  rec.tags.erase(std::unique(rec.tags.begin(), rec.tags.end()), rec.tags.end());

  if (j.contains("text") && !j["text"].is_null()) {
    if (!j["text"].is_string()) return std::nullopt;
    rec.text = j["text"].get<std::string>();
  }
  return rec;
}

void parse_stream_into(std::istream& stream, const AliasTable& aliases,
                       std::vector<TweetRecord>& out, ParseReport& report,
                       std::unordered_set<std::string>& seen_ids) {
  std::string line;
  while (std::getline(stream, line)) {
    if (trim(line).empty()) continue;
    auto rec = parse_line(line, aliases);
    if (!rec) {
      ++report.records_malformed;
      continue;
    }
    if (!seen_ids.insert(rec->id).second) {
      ++report.duplicates_dropped;
      continue;
    }
    ++report.records_ok;
    if (rec->is_retweet()) ++report.retweet_records;
    else ++report.original_records;
    out.push_back(std::move(*rec));
  }
}

}  // namespace

std::pair<std::vector<TweetRecord>, ParseReport> parse_corpus(std::istream& stream,
                                                              const AliasTable& aliases) {
  if (stream.bad()) throw InputError("unreadable input stream");
  std::vector<TweetRecord> out;
  ParseReport report;
  std::unordered_set<std::string> seen;
  parse_stream_into(stream, aliases, out, report, seen);
  return {std::move(out), report};
}

std::pair<std::vector<TweetRecord>, ParseReport> parse_corpus_files(
    const std::vector<std::string>& paths, const AliasTable& aliases) {
  std::vector<TweetRecord> out;
  ParseReport report;
  std::unordered_set<std::string> seen;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open input file: " + path);
    parse_stream_into(in, aliases, out, report, seen);
  }
  return {std::move(out), report};
}

std::string serialize_record(const TweetRecord& rec) {
  ordered_json j;
  j["id"] = rec.id;
  j["author"] = rec.author;
  if (rec.rt_author) {
    j["rt_author"] = *rec.rt_author;
    j["rt_id"] = *rec.rt_id;
  }
  j["tags"] = rec.tags;
  j["ts"] = format_utc(rec.ts);
  if (rec.text) j["text"] = *rec.text;
  return j.dump();
}

std::vector<TweetRecord> filter_window(const std::vector<TweetRecord>& records,
                                       const CorpusWindow& window) {
  if (window.start > window.end) throw ConfigError("window start is after window end");
  std::vector<TweetRecord> out;
  out.reserve(records.size());
  for (const auto& r : records)
    if (r.ts >= window.start && r.ts <= window.end) out.push_back(r);
  return out;
}

std::map<std::string, std::vector<TweetRecord>> slice_by_hashtag(
    const std::vector<TweetRecord>& records, const std::set<std::string>& tracked) {
  if (tracked.empty()) throw ConfigError("tracked hashtag set is empty; nothing to analyze");
  std::map<std::string, std::vector<TweetRecord>> slices;
  for (const auto& tag : tracked) slices[tag];
  for (const auto& r : records)
    for (const auto& tag : r.tags)
      if (tracked.count(tag)) slices[tag].push_back(r);
  return slices;
}

}  // namespace hashjack
