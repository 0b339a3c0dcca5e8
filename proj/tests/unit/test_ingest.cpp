#include <doctest.h>

#include <sstream>

#include "../testutil.hpp"
#include "hashjack/errors.hpp"
#include "hashjack/ingest.hpp"
#include "hashjack/time_util.hpp"

using namespace hashjack;

namespace {

std::pair<std::vector<TweetRecord>, ParseReport> parse_text(const std::string& text) {
  std::istringstream stream(text);
  return parse_corpus(stream);
}

}  // namespace

TEST_CASE("empty stream yields empty corpus and zeroed report") {
  auto [records, report] = parse_text("");
  CHECK(records.empty());
  CHECK(report.records_ok == 0);
  CHECK(report.records_malformed == 0);
  CHECK(report.duplicates_dropped == 0);
}

TEST_CASE("a truncated line is counted, not fatal") {
  std::string text =
      R"({"id":"1","author":"alice","tags":["afd"],"ts":"2018-05-28T10:00:00Z"})" "\n"
      R"({"id":"2","author":"bob","tags":["cs)" "\n"
      R"({"id":"3","author":"carol","tags":["csu"],"ts":"2018-05-28T11:00:00Z"})" "\n";
  auto [records, report] = parse_text(text);
  CHECK(records.size() == 2);
  CHECK(report.records_ok == 2);
  CHECK(report.records_malformed == 1);
  CHECK(records[0].id == "1");
  CHECK(records[1].id == "3");
}

TEST_CASE("retweet line carries both normalized tags and the link") {
  auto [records, report] = parse_text(
      R"({"id":"1","author":"alice","rt_author":"bob","rt_id":"99","tags":["AfD","CSU"],"ts":"2018-05-28T10:00:00+02:00"})"
      "\n");
  REQUIRE(records.size() == 1);
  const auto& r = records[0];
  CHECK(r.tags == std::vector<std::string>{"afd", "csu"});
  CHECK(r.is_retweet());
  CHECK(*r.rt_author == "bob");
  CHECK(*r.rt_id == "99");
  CHECK(r.ts == parse_iso8601("2018-05-28T08:00:00Z"));
  CHECK(report.retweet_records == 1);
  CHECK(report.original_records == 0);
}

TEST_CASE("rt_author without rt_id is malformed") {
  auto [records, report] = parse_text(
      R"({"id":"1","author":"alice","rt_author":"bob","tags":["afd"],"ts":"2018-05-28T10:00:00Z"})"
      "\n");
  CHECK(records.empty());
  CHECK(report.records_malformed == 1);
}

TEST_CASE("duplicate tweet ids: first wins") {
  std::string text =
      R"({"id":"1","author":"alice","tags":["afd"],"ts":"2018-05-28T10:00:00Z"})" "\n"
      R"({"id":"1","author":"bob","tags":["csu"],"ts":"2018-05-28T11:00:00Z"})" "\n";
  auto [records, report] = parse_text(text);
  REQUIRE(records.size() == 1);
  CHECK(records[0].author == "alice");
  CHECK(report.duplicates_dropped == 1);
  CHECK(report.records_ok == 1);
}

TEST_CASE("umlaut spellings collapse through the alias table") {
  auto aliases = default_alias_table();
  CHECK(normalize_hashtag("#GRUENE", aliases) == "gruene");
  CHECK(normalize_hashtag("Grüne", aliases) == "gruene");
  CHECK(normalize_hashtag("GRÜNE", aliases) == "gruene");
  CHECK(normalize_hashtag("DieGrünen", aliases) == "gruene");
  CHECK(normalize_hashtag("#AfD", aliases) == "afd");
  CHECK(normalize_hashtag("fußball", aliases) == "fußball");
}

TEST_CASE("window filter keeps inclusive bounds") {
  CorpusWindow w = default_window();
  CHECK(w.start == parse_iso8601("2018-05-27T22:00:00Z"));
  CHECK(w.end == parse_iso8601("2018-06-04T21:59:59Z"));

  std::vector<TweetRecord> records;
  records.push_back(testutil::original("start", "a", {"afd"}, w.start));
  records.push_back(testutil::original("end", "a", {"afd"}, w.end));
  records.push_back(testutil::original("late", "a", {"afd"}, w.end + 1));
  records.push_back(testutil::original("early", "a", {"afd"}, w.start - 1));

  auto kept = filter_window(records, w);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == "start");
  CHECK(kept[1].id == "end");

  // idempotence
  auto again = filter_window(kept, w);
  CHECK(again == kept);
}

TEST_CASE("slices: multi-tag records appear in every matching slice") {
  std::vector<TweetRecord> records;
  records.push_back(testutil::retweet("1", "a", "b", {"afd", "csu"}));
  records.push_back(testutil::original("2", "a", {"fußball"}));
  records.push_back(testutil::original("3", "c", {"spd"}));

  auto slices = slice_by_hashtag(records, default_tracked_tags());
  CHECK(slices.at("afd").size() == 1);
  CHECK(slices.at("csu").size() == 1);
  CHECK(slices.at("spd").size() == 1);
  CHECK(slices.at("cdu").empty());

  std::size_t total = 0;
  for (const auto& [tag, slice] : slices) total += slice.size();
  CHECK(total == 3);  // record 1 counted twice, record 2 nowhere

  CHECK_THROWS_AS(slice_by_hashtag(records, {}), ConfigError);
}

TEST_CASE("serialize/parse round-trip is identity") {
  std::mt19937_64 eng(404);
  auto pick = [&](std::initializer_list<const char*> xs) {
    auto it = xs.begin();
    std::advance(it, eng() % xs.size());
    return std::string(*it);
  };
  for (int trial = 0; trial < 200; ++trial) {
    TweetRecord r;
    r.id = "id" + std::to_string(trial);
    r.author = pick({"alice", "bob", "c,omma", "d\"quote", "ümläut"});
    if (eng() % 2) {
      r.rt_author = pick({"x", "y"});
      r.rt_id = "o" + std::to_string(eng() % 1000);
    }
    int n_tags = 1 + static_cast<int>(eng() % 3);
    for (int i = 0; i < n_tags; ++i) r.tags.push_back(pick({"afd", "csu", "spd", "gruene"}));
    std::sort(r.tags.begin(), r.tags.end());
    r.tags.erase(std::unique(r.tags.begin(), r.tags.end()), r.tags.end());
    r.ts = 1527465600 + static_cast<std::int64_t>(eng() % 700000);
    if (eng() % 2) r.text = pick({"some text", "line\nbreak", "\"quoted\""});

    auto [parsed, report] = parse_text(serialize_record(r) + "\n");
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == r);
    CHECK(report.records_malformed == 0);
  }
}

TEST_CASE("parse_corpus_files dedups across files") {
  testutil::TempDir dir("ingest");
  std::string line1 = R"({"id":"1","author":"a","tags":["afd"],"ts":"2018-05-28T10:00:00Z"})";
  std::string line2 = R"({"id":"2","author":"b","tags":["afd"],"ts":"2018-05-28T10:00:00Z"})";
  write_file(dir.file("f1.jsonl"), line1 + "\n");
  write_file(dir.file("f2.jsonl"), line1 + "\n" + line2 + "\n");
  auto [records, report] = parse_corpus_files({dir.file("f1.jsonl"), dir.file("f2.jsonl")});
  CHECK(records.size() == 2);
  CHECK(report.duplicates_dropped == 1);
  CHECK_THROWS_AS(parse_corpus_files({dir.file("missing.jsonl")}), InputError);
}
