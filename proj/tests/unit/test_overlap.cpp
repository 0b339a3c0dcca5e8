#include <doctest.h>

#include <cmath>
#include <random>

#include "../testutil.hpp"
#include "hashjack/community.hpp"
#include "hashjack/errors.hpp"
#include "hashjack/overlap.hpp"
#include "hashjack/polarity.hpp"

using namespace hashjack;

namespace {

// Assemble a MembershipTable directly; rows as (account, pro flags, contra flags).
MembershipTable table_from(const std::vector<std::string>& parties,
                           const std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>>& rows) {
  MembershipTable t;
  t.parties = parties;
  for (const auto& [acc, pro, contra] : rows) {
    t.accounts.push_back(acc);
    t.pro_mask.push_back(pro);
    t.contra_mask.push_back(contra);
  }
  return t;
}

// replicate a flag pattern n times
void add_rows(std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>>& rows,
              const std::string& prefix, int n, std::uint64_t pro, std::uint64_t contra) {
  for (int i = 0; i < n; ++i)
    rows.emplace_back(prefix + std::to_string(i), pro, contra);
}

}  // namespace

TEST_CASE("z_quantile matches the bisection oracle") {
  CHECK(z_quantile(0.99) == doctest::Approx(2.575829).epsilon(1e-6));
  CHECK(z_quantile(0.95) == doctest::Approx(1.959964).epsilon(1e-6));
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.99, 0.999, 0.2, 0.05}) {
    double oracle = testutil::normal_quantile_bisect(0.5 + level / 2.0);
    CHECK(std::abs(z_quantile(level) - oracle) < 1e-6);
  }
  // level -> 0+ gives 0
  CHECK(std::abs(z_quantile(1e-12)) < 1e-6);
  CHECK_THROWS_AS(z_quantile(0.0), ConfigError);
  CHECK_THROWS_AS(z_quantile(1.0), ConfigError);
  CHECK_THROWS_AS(z_quantile(-0.5), ConfigError);
}

TEST_CASE("odds_2x2 closed forms") {
  auto r = odds_2x2(30, 10, 10, 30, 0.99);
  CHECK(r.odds_ratio == doctest::Approx(9.0).epsilon(1e-12));
  CHECK_FALSE(r.corrected);

  CHECK(odds_2x2(10, 10, 10, 10, 0.99).odds_ratio == doctest::Approx(1.0));

  auto corrected = odds_2x2(5, 0, 3, 7, 0.99);
  CHECK(corrected.corrected);
  CHECK(corrected.a == 5.5);
  CHECK(corrected.b == 0.5);
  CHECK(corrected.c == 3.5);
  CHECK(corrected.d == 7.5);
  CHECK(corrected.odds_ratio == doctest::Approx((5.5 * 7.5) / (0.5 * 3.5)).epsilon(1e-12));
  CHECK(corrected.odds_ratio == doctest::Approx(23.571428571).epsilon(1e-9));

  CHECK_THROWS_AS(odds_2x2(0, 0, 0, 0, 0.99), AnalysisError);
}

TEST_CASE("odds_2x2 wald interval brackets the point estimate") {
  auto r = odds_2x2(30, 10, 10, 30, 0.99);
  CHECK(r.ci_low < r.odds_ratio);
  CHECK(r.ci_high > r.odds_ratio);
  double se = std::sqrt(1.0 / 30 + 1.0 / 10 + 1.0 / 10 + 1.0 / 30);
  double z = z_quantile(0.99);
  CHECK(r.ci_low == doctest::Approx(std::exp(std::log(9.0) - z * se)).epsilon(1e-9));
  CHECK(r.ci_high == doctest::Approx(std::exp(std::log(9.0) + z * se)).epsilon(1e-9));
}

TEST_CASE("swapping a<->c and b<->d inverts the odds ratio exactly") {
  std::mt19937_64 eng(4242);
  for (int i = 0; i < 100; ++i) {
    double a = 1 + static_cast<double>(eng() % 100);
    double b = 1 + static_cast<double>(eng() % 100);
    double c = 1 + static_cast<double>(eng() % 100);
    double d = 1 + static_cast<double>(eng() % 100);
    auto fwd = odds_2x2(a, b, c, d, 0.95);
    auto swp = odds_2x2(c, d, a, b, 0.95);
    CHECK(swp.odds_ratio == doctest::Approx(1.0 / fwd.odds_ratio).epsilon(1e-12));
  }
}

TEST_CASE("wald interval width is monotone in z and in cell counts") {
  auto width = [](const OddsResult& r) { return std::log(r.ci_high) - std::log(r.ci_low); };
  CHECK(width(odds_2x2(20, 20, 20, 20, 0.99)) > width(odds_2x2(20, 20, 20, 20, 0.95)));
  CHECK(width(odds_2x2(20, 20, 20, 20, 0.95)) > width(odds_2x2(40, 40, 40, 40, 0.95)));
  CHECK(width(odds_2x2(20, 20, 20, 20, 0.95)) > width(odds_2x2(21, 20, 20, 20, 0.95)));
}

TEST_CASE("membership table from labeled networks") {
  // network afd: communities {a0,a1,a2}=0 pro, {b0,b1}=1 contra
  auto g_afd = testutil::make_graph(
      {{"a0", "a1", 2}, {"a1", "a2", 2}, {"a2", "a0", 2}, {"b0", "b1", 1}, {"b1", "b0", 1}},
      "afd");
  auto p_afd = louvain(g_afd, {.seed = 1});
  auto pol_afd = label_clusters(g_afd, p_afd,
                                {{"a0", Polarity::Pro}, {"b0", Polarity::Contra}});

  // network csu: {a0, x0} contra cluster, {y0,y1,y2} pro cluster
  auto g_csu = testutil::make_graph(
      {{"a0", "x0", 3}, {"x0", "a0", 3}, {"y0", "y1", 2}, {"y1", "y2", 2}, {"y2", "y0", 2}},
      "csu");
  auto p_csu = louvain(g_csu, {.seed = 1});
  auto pol_csu = label_clusters(g_csu, p_csu,
                                {{"y0", Polarity::Pro}, {"x0", Polarity::Contra}});

  auto table = membership_table({{&g_afd, &p_afd, &pol_afd}, {&g_csu, &p_csu, &pol_csu}});
  CHECK(table.parties == std::vector<std::string>{"afd", "csu"});
  CHECK(table.universe_size() == 9);  // a0,a1,a2,b0,b1 + x0,y0,y1,y2; a0 shared

  int afd_idx = table.party_index("afd");
  int csu_idx = table.party_index("csu");
  auto row_of = [&](const std::string& acc) {
    for (std::size_t i = 0; i < table.accounts.size(); ++i)
      if (table.accounts[i] == acc) return i;
    FAIL("row not found: ", acc);
    return std::size_t(0);
  };
  // a0 is pro-afd and contra-csu: the hashjack signature
  CHECK(table.pro(row_of("a0"), afd_idx));
  CHECK(table.contra(row_of("a0"), csu_idx));
  CHECK_FALSE(table.contra(row_of("a0"), afd_idx));
  // single-network accounts carry a single flag
  CHECK(table.pro(row_of("a1"), afd_idx));
  CHECK_FALSE(table.pro(row_of("a1"), csu_idx));
  CHECK_FALSE(table.contra(row_of("a1"), csu_idx));

  // pro and contra are never both set for one row and party
  for (std::size_t row = 0; row < table.universe_size(); ++row)
    CHECK((table.pro_mask[row] & table.contra_mask[row]) == 0);

  SUBCASE("duplicate hashtags are rejected") {
    CHECK_THROWS_AS(membership_table({{&g_afd, &p_afd, &pol_afd}, {&g_afd, &p_afd, &pol_afd}}),
                    AnalysisError);
  }
}

TEST_CASE("accounts only in unlabeled communities are excluded and counted") {
  auto g = testutil::make_graph({{"a0", "a1", 5},
                                 {"a1", "a2", 5},
                                 {"a2", "a0", 5},
                                 {"b0", "b1", 4},
                                 {"b1", "b0", 4},
                                 {"z0", "z1", 1}},
                                "afd");
  auto p = louvain(g, {.seed = 4});
  REQUIRE(p.community_count() == 3);
  auto pol = label_clusters(g, p, {{"a0", Polarity::Pro}, {"b0", Polarity::Contra}});

  auto g2 = testutil::make_graph({{"m0", "m1", 1}, {"n0", "n1", 1}, {"n1", "n0", 1}}, "csu");
  auto p2 = louvain(g2, {.seed = 4});
  auto pol2 = label_clusters(g2, p2, {{"n0", Polarity::Pro}, {"m0", Polarity::Contra}});

  auto table = membership_table({{&g, &p, &pol}, {&g2, &p2, &pol2}});
  CHECK(table.excluded_unlabeled == 2);  // z0, z1
  for (const auto& acc : table.accounts) CHECK(acc.substr(0, 1) != "z");
}

TEST_CASE("empty label maps give an empty table") {
  auto g = testutil::make_graph({{"a", "b", 1}}, "afd");
  auto p = louvain(g, {.seed = 0});
  PolarityMap pol;
  pol.hashtag = "afd";
  auto g2 = testutil::make_graph({{"c", "d", 1}}, "csu");
  auto p2 = louvain(g2, {.seed = 0});
  PolarityMap pol2;
  pol2.hashtag = "csu";
  auto table = membership_table({{&g, &p, &pol}, {&g2, &p2, &pol2}});
  CHECK(table.universe_size() == 0);
}

TEST_CASE("logistic fit on a 2x2 equals the closed-form odds ratio") {
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> rows;
  // outcome party csu (index 1), predictor afd (index 0)
  add_rows(rows, "a", 30, 0b01, 0b10);  // pro_afd, contra_csu
  add_rows(rows, "b", 10, 0b01, 0b00);  // pro_afd only
  add_rows(rows, "c", 10, 0b00, 0b10);  // contra_csu only
  add_rows(rows, "d", 30, 0b00, 0b00);  // neither
  auto table = table_from({"afd", "csu"}, rows);

  auto model = fit_logistic(table, "csu", 0.99);
  CHECK(model.converged);
  CHECK(model.n == 80);
  REQUIRE(model.coefficients.size() == 1);
  CHECK(model.coefficients[0].predictor == "afd");
  CHECK(std::exp(model.coefficients[0].beta) == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(model.coefficients[0].odds == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(model.coefficients[0].ci_low < 9.0);
  CHECK(model.coefficients[0].ci_high > 9.0);
}

TEST_CASE("intercept-only fit at prevalence one half has zero intercept") {
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> rows;
  add_rows(rows, "y", 25, 0b0, 0b1);
  add_rows(rows, "n", 25, 0b0, 0b0);
  auto table = table_from({"solo"}, rows);
  auto model = fit_logistic(table, "solo", 0.95);
  CHECK(model.converged);
  CHECK(model.intercept.beta == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("perfect separation is flagged, not thrown") {
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> rows;
  add_rows(rows, "a", 20, 0b01, 0b10);  // predictor 1 -> outcome 1
  add_rows(rows, "d", 20, 0b00, 0b00);  // predictor 0 -> outcome 0
  auto table = table_from({"afd", "csu"}, rows);
  auto model = fit_logistic(table, "csu", 0.99);
  CHECK_FALSE(model.converged);
  CHECK(model.diagnostic.find("separation") != std::string::npos);
}

TEST_CASE("constant outcome is an error") {
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> rows;
  add_rows(rows, "a", 10, 0b01, 0b00);
  auto table = table_from({"afd", "csu"}, rows);
  CHECK_THROWS_AS(fit_logistic(table, "csu", 0.99), AnalysisError);
}

TEST_CASE("logistic/2x2 equivalence on random tables") {
  std::mt19937_64 eng(31415);
  for (int trial = 0; trial < 25; ++trial) {
    double a = 1 + static_cast<double>(eng() % 150);
    double b = 1 + static_cast<double>(eng() % 150);
    double c = 1 + static_cast<double>(eng() % 150);
    double d = 1 + static_cast<double>(eng() % 150);
    std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> rows;
    add_rows(rows, "a", static_cast<int>(a), 0b01, 0b10);
    add_rows(rows, "b", static_cast<int>(b), 0b01, 0b00);
    add_rows(rows, "c", static_cast<int>(c), 0b00, 0b10);
    add_rows(rows, "d", static_cast<int>(d), 0b00, 0b00);
    auto table = table_from({"x", "y"}, rows);
    auto model = fit_logistic(table, "y", 0.99);
    auto oracle = odds_2x2(a, b, c, d, 0.99);
    REQUIRE(model.converged);
    CHECK(model.coefficients[0].odds == doctest::Approx(oracle.odds_ratio).epsilon(1e-6));
  }
}

TEST_CASE("hashjack matrix emits every off-diagonal cell and all models") {
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> rows;
  // three parties; plant an afd->csu association
  add_rows(rows, "a", 40, 0b001, 0b010);
  add_rows(rows, "b", 60, 0b001, 0b000);
  add_rows(rows, "c", 10, 0b100, 0b010);
  add_rows(rows, "d", 90, 0b100, 0b000);
  add_rows(rows, "e", 50, 0b000, 0b100);  // contra_spd only
  auto table = table_from({"afd", "csu", "spd"}, rows);

  auto report = hashjack_matrix(table, 0.99, UniverseMode::Global);
  CHECK(report.cells.size() == 6);
  CHECK(report.models.size() + report.model_errors.size() == 3);
  // afd model fails: contra_afd is constant zero -- recorded, not fatal
  CHECK(report.model_errors.count("afd") == 1);
  CHECK(report.models.count("csu") == 1);

  const auto& cell = report.cells.at({"afd", "csu"});
  CHECK(cell.odds.odds_ratio ==
        doctest::Approx(odds_2x2(40, 60, 10, 140, 0.99).odds_ratio).epsilon(1e-12));

  SUBCASE("pair universe drops rows with no membership outside the outcome party") {
    auto pair_report = hashjack_matrix(table, 0.99, UniverseMode::Pair);
    // outcome spd: rows "d" (pro_spd only) and "e" (contra_spd only) are
    // spd natives and leave the risk set; a, b, c stay
    CHECK(pair_report.cells.at({"afd", "spd"}).universe == 110);
    CHECK(report.cells.at({"afd", "spd"}).universe == 250);
  }
}

TEST_CASE("membership csv round-trip") {
  testutil::TempDir dir("membership");
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> rows;
  add_rows(rows, "a", 3, 0b01, 0b10);
  add_rows(rows, "b", 2, 0b10, 0b00);
  auto table = table_from({"afd", "csu"}, rows);
  write_membership_csv(table, dir.file("membership.csv"));
  auto back = read_membership_csv(dir.file("membership.csv"));
  CHECK(back.parties == table.parties);
  CHECK(back.accounts == table.accounts);
  CHECK(back.pro_mask == table.pro_mask);
  CHECK(back.contra_mask == table.contra_mask);
}
