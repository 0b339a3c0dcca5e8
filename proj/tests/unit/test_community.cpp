#include <doctest.h>

#include <random>

#include "../testutil.hpp"
#include "hashjack/community.hpp"
#include "hashjack/errors.hpp"

using namespace hashjack;

TEST_CASE("modularity of the two-triangle partition is exactly 1/2") {
  auto g = testutil::two_triangles();
  // a0,a1,a2 -> 0; b0,b1,b2 -> 1 (accounts are sorted a0,a1,a2,b0,b1,b2)
  std::vector<int> assign{0, 0, 0, 1, 1, 1};
  CHECK(modularity(g, assign) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("all nodes in one community score zero") {
  auto g = testutil::random_graph(7, 0.4, 21);
  std::vector<int> assign(static_cast<std::size_t>(g.node_count()), 0);
  CHECK(modularity(g, assign) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("triangle of singletons scores -1/3") {
  auto g = testutil::make_graph({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}});
  std::vector<int> assign{0, 1, 2};
  CHECK(modularity(g, assign) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("edgeless graph scores zero by convention") {
  RetweetGraph g;
  g.accounts = {"a", "b"};
  CHECK(modularity(g, std::vector<int>{0, 1}) == 0.0);
}

TEST_CASE("missing node in an account-keyed assignment is named") {
  auto g = testutil::make_graph({{"a", "b", 1}});
  std::unordered_map<std::string, int> assign{{"a", 0}};
  CHECK_THROWS_WITH_AS(modularity(g, assign), doctest::Contains("b"), AnalysisError);
}

TEST_CASE("modularity matches the pairwise oracle on random graphs") {
  std::mt19937_64 eng(5150);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + static_cast<int>(eng() % 8);
    auto g = testutil::random_graph(n, 0.35, eng());
    std::vector<int> assign(static_cast<std::size_t>(g.node_count()));
    for (auto& c : assign) c = static_cast<int>(eng() % 3);
    double got = modularity(g, assign);
    double want = testutil::modularity_pairwise(g, assign);
    CHECK(got == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("modularity is invariant under community relabeling and weight scaling") {
  auto g = testutil::cliques_with_bridges({4, 3});
  std::vector<int> assign(static_cast<std::size_t>(g.node_count()));
  for (std::size_t i = 0; i < assign.size(); ++i) assign[i] = i % 2 == 0 ? 3 : 7;
  std::vector<int> relabeled(assign.size());
  for (std::size_t i = 0; i < assign.size(); ++i) relabeled[i] = assign[i] == 3 ? 1 : 0;
  CHECK(modularity(g, assign) == doctest::Approx(modularity(g, relabeled)).epsilon(1e-14));

  auto scaled = g;
  for (auto& e : scaled.edges) e.weight *= 5;
  CHECK(modularity(g, assign) == doctest::Approx(modularity(scaled, assign)).epsilon(1e-12));
}

TEST_CASE("brute force finds the triangle split of two disjoint triangles") {
  auto p = brute_force_partition(testutil::two_triangles());
  CHECK(p.modularity == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.community_count() == 2);
  CHECK(p.community_sizes == std::vector<int>{3, 3});
}

TEST_CASE("brute force on a single edge keeps both endpoints together") {
  auto g = testutil::make_graph({{"a", "b", 1}});
  auto p = brute_force_partition(g);
  CHECK(p.community_count() == 1);
  CHECK(p.modularity == doctest::Approx(0.0).epsilon(1e-14));
  // the only alternative scores -0.5
  CHECK(modularity(g, std::vector<int>{0, 1}) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("brute force refuses more than 12 nodes") {
  std::vector<std::tuple<std::string, std::string, long long>> edges;
  for (int i = 0; i < 12; ++i)
    edges.emplace_back("n" + std::to_string(i), "n" + std::to_string(i + 1), 1);
  CHECK_THROWS_AS(brute_force_partition(testutil::make_graph(edges)), AnalysisError);
}

TEST_CASE("louvain on the empty graph returns the empty partition") {
  RetweetGraph g;
  auto p = louvain(g);
  CHECK(p.assignment.empty());
  CHECK(p.modularity == 0.0);
  CHECK(p.community_count() == 0);
}

TEST_CASE("louvain finds the triangles across a bridge, matching brute force exactly") {
  auto g = testutil::cliques_with_bridges({3, 3});
  auto exact = brute_force_partition(g);
  auto p = louvain(g, {.seed = 3});
  CHECK(p.modularity == doctest::Approx(exact.modularity).epsilon(1e-13));
  CHECK(p.community_count() == 2);
  // each triangle is one community
  auto map = p.account_map(g);
  CHECK(map.at("c0_0") == map.at("c0_1"));
  CHECK(map.at("c0_1") == map.at("c0_2"));
  CHECK(map.at("c1_0") == map.at("c1_1"));
  CHECK(map.at("c0_0") != map.at("c1_0"));
}

TEST_CASE("louvain is deterministic for a fixed seed") {
  auto g = testutil::random_graph(40, 0.12, 2024);
  LouvainParams params;
  params.seed = 99;
  auto p1 = louvain(g, params);
  auto p2 = louvain(g, params);
  CHECK(p1.assignment == p2.assignment);
  CHECK(p1.modularity == p2.modularity);
}

TEST_CASE("canonical ids: communities ordered by size then smallest member") {
  auto g = testutil::cliques_with_bridges({2, 4});
  auto p = louvain(g, {.seed = 1});
  REQUIRE(p.community_count() == 2);
  CHECK(p.community_sizes[0] >= p.community_sizes[1]);
  // the 4-clique (c1_*) must be community 0
  auto map = p.account_map(g);
  CHECK(map.at("c1_0") == 0);
  CHECK(map.at("c0_0") == 1);
}

TEST_CASE("partition invariants: coverage, sizes and recomputed Q") {
  auto g = testutil::random_graph(30, 0.15, 808);
  auto p = louvain(g, {.seed = 5});
  REQUIRE(static_cast<int>(p.assignment.size()) == g.node_count());
  std::vector<int> sizes(static_cast<std::size_t>(p.community_count()), 0);
  for (int c : p.assignment) {
    REQUIRE(c >= 0);
    REQUIRE(c < p.community_count());
    ++sizes[static_cast<std::size_t>(c)];
  }
  CHECK(sizes == p.community_sizes);
  CHECK(p.modularity == doctest::Approx(modularity(g, p.assignment)).epsilon(1e-12));
  CHECK(p.modularity >= -0.5);
  CHECK(p.modularity <= 1.0);
}

TEST_CASE("every accepted local move gains at least min_gain and the gains add up") {
  std::mt19937_64 eng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = testutil::random_graph(18, 0.2, eng());
    LouvainParams params;
    params.seed = eng();
    LouvainAudit audit;
    auto p = louvain(g, params, &audit);

    std::vector<int> singletons(static_cast<std::size_t>(g.node_count()));
    for (std::size_t i = 0; i < singletons.size(); ++i) singletons[i] = static_cast<int>(i);
    double q0 = modularity(g, singletons);

    double sum = 0.0;
    for (double gain : audit.move_gains) {
      CHECK(gain >= params.min_gain);
      sum += gain;
    }
    CHECK(p.modularity == doctest::Approx(q0 + sum).epsilon(1e-9));
  }
}

TEST_CASE("louvain beats random partitions and stays near the oracle on small graphs") {
  std::mt19937_64 eng(777);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 4 + static_cast<int>(eng() % 7);  // up to 10 nodes
    auto g = testutil::random_graph(n, 0.3, eng());
    auto p = louvain(g, {.seed = eng()});
    auto oracle = brute_force_partition(g);

    std::vector<int> random_assign(static_cast<std::size_t>(g.node_count()));
    for (auto& c : random_assign) c = static_cast<int>(eng() % 4);
    CHECK(p.modularity >= modularity(g, random_assign) - 1e-12);
    CHECK(p.modularity >= oracle.modularity - 0.05);
    CHECK(p.modularity <= oracle.modularity + 1e-12);
  }
}

TEST_CASE("communities csv round-trip") {
  testutil::TempDir dir("comm");
  auto g = testutil::cliques_with_bridges({3, 4});
  auto p = louvain(g, {.seed = 11});
  write_communities_csv(g, p, dir.file("communities.csv"));
  auto back = read_communities_csv(g, dir.file("communities.csv"));
  CHECK(back.assignment == p.assignment);
  CHECK(back.community_sizes == p.community_sizes);
}
