#include <doctest.h>

#include <algorithm>

#include "divnorm/scc.hpp"

using namespace divnorm;

TEST_CASE("components come out sinks first") {
  // 0 → 1 ⇄ 2 → 3 ↺
  const std::vector<std::vector<std::size_t>> g{{1}, {2}, {1, 3}, {3}};
  const auto comps = strongly_connected_components(g);
  REQUIRE(comps.size() == 3);
  CHECK(comps[0] == std::vector<std::size_t>{3});
  CHECK(comps[1] == std::vector<std::size_t>{1, 2});
  CHECK(comps[2] == std::vector<std::size_t>{0});
}

TEST_CASE("long chain does not recurse") {
  std::vector<std::vector<std::size_t>> g(200000);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) g[i].push_back(i + 1);
  g.back().push_back(0);
  const auto comps = strongly_connected_components(g);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].size() == g.size());
}

TEST_CASE("every vertex lands in exactly one component") {
  std::vector<std::vector<std::size_t>> g{{0}, {}, {1, 0}, {2, 4}, {3}};
  const auto comps = strongly_connected_components(g);
  std::vector<int> seen(g.size(), 0);
  for (const auto& c : comps)
    for (const auto v : c) ++seen[v];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
  CHECK(comps.size() == 4);
}
