#include <doctest.h>

#include "hashjack/errors.hpp"
#include "hashjack/time_util.hpp"
#include "hashjack/util.hpp"

using namespace hashjack;

TEST_CASE("seed derivation is stable and stage-separated") {
  auto a = derive_seed(42, "louvain", "afd");
  CHECK(a == derive_seed(42, "louvain", "afd"));
  CHECK(a != derive_seed(42, "louvain", "csu"));
  CHECK(a != derive_seed(42, "layout", "afd"));
  CHECK(a != derive_seed(43, "louvain", "afd"));
}

TEST_CASE("rng draws are deterministic") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_double() == b.next_double());
  }
}

TEST_CASE("poisson mean is roughly honored") {
  Rng rng(11);
  double sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(25.0));
  CHECK(sum / n == doctest::Approx(25.0).epsilon(0.02));
  CHECK(Rng(1).poisson(0.0) == 0);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 8.142857142857142, 1e-12, 3e300}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv escaping") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("utf8 lowercase folds German umlauts") {
  CHECK(lower_utf8("AfD") == "afd");
  CHECK(lower_utf8("GRÜNE") == "grüne");
  CHECK(lower_utf8("Fußball") == "fußball");
}

TEST_CASE("iso8601 parsing handles offsets") {
  // the paper window boundaries, CEST vs UTC
  CHECK(parse_iso8601("2018-05-28T00:00:00+02:00") == parse_iso8601("2018-05-27T22:00:00Z"));
  CHECK(parse_iso8601("2018-06-04T23:59:59+0200") == parse_iso8601("2018-06-04T21:59:59Z"));
  CHECK(parse_iso8601("2018-05-28T10:15:30.123Z") == parse_iso8601("2018-05-28T10:15:30Z"));
  CHECK(parse_iso8601("2018-05-28T00:00:00-01") == parse_iso8601("2018-05-28T01:00:00Z"));
  CHECK_THROWS_AS(parse_iso8601("2018-05-28T00:00:00"), InputError);  // no offset
  CHECK_THROWS_AS(parse_iso8601("not a time"), InputError);
  CHECK_THROWS_AS(parse_iso8601("2018-13-01T00:00:00Z"), InputError);
}

TEST_CASE("format_utc inverts parse") {
  for (const char* s : {"2018-05-27T22:00:00Z", "1970-01-01T00:00:00Z", "2024-02-29T12:34:56Z"}) {
    CHECK(format_utc(parse_iso8601(s)) == s);
  }
}
