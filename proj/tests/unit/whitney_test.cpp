#include <doctest.h>

#include <cmath>
#include <limits>

#include "sobext/whitney.hpp"
#include "support/test_spaces.hpp"

using namespace sobext;
using sobext::testing::line_grid;

namespace {

// Independent check of coverage and r <= dist(B, S) <= 4r from raw distances.
void check_contract(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover) {
  for (PointId x = 0; x < space.size(); ++x) {
    if (s.contains(x)) continue;
    bool in = false;
    for (const auto& wb : cover.balls) in = in || space.distance(x, wb.ball.center) < wb.ball.radius;
    CHECK_MESSAGE(in, "point " << x << " uncovered");
  }
  for (const auto& wb : cover.balls) {
    double dist = std::numeric_limits<double>::infinity();
    for (PointId y = 0; y < space.size(); ++y) {
      if (space.distance(y, wb.ball.center) >= wb.ball.radius) continue;
      for (PointId z : s.ids) dist = std::min(dist, space.distance(y, z));
    }
    CHECK(wb.ball.radius <= dist);
    CHECK(dist <= 4.0 * wb.ball.radius);
    CHECK(wb.star_radius == 9.0 / 8.0 * wb.ball.radius);
  }
}

RegularSubset ring(const MetricMeasureSpace& grid, int side) {
  PointSet ids;
  for (PointId p = 0; p < grid.size(); ++p) {
    const auto c = grid.coordinates(p);
    if (c[0] == 0 || c[1] == 0 || c[0] == side - 1 || c[1] == side - 1) ids.push_back(p);
  }
  return make_subset(grid, ids, 1.0);
}

}  // namespace

TEST_CASE("S = X gives an empty cover that verifies vacuously") {
  const auto s = line_grid(8);
  const auto sub = make_subset(s, all_points(s));
  const WhitneyCover c = build_whitney(s, sub);
  CHECK(c.empty());
  const CoverReport rep = verify_cover(s, sub, c, 2.0);
  CHECK(rep.pass);
  CHECK(rep.coverage);
  CHECK(rep.multiplicity == 0);
}

TEST_CASE("empty S is rejected") {
  const auto s = line_grid(8);
  CHECK_THROWS_AS(build_whitney(s, make_subset(s, {})), Error);
}

TEST_CASE("line with a single S point") {
  const auto s = line_grid(16);
  const auto sub = make_subset(s, {0});
  const WhitneyCover c = build_whitney(s, sub);
  check_contract(s, sub, c);
  for (const auto& wb : c.balls) CHECK(wb.anchor == 0);
  const CoverReport rep = verify_cover(s, sub, c, estimate_doubling(s).doubling);
  CHECK(rep.pass);
  CHECK(rep.coverage);
  CHECK(rep.sandwich);
}

TEST_CASE("8x8 grid with S the boundary ring") {
  const int dims[] = {8, 8};
  const auto g = gen_grid(dims, 1.0);
  const auto sub = ring(g, 8);
  const WhitneyCover c = build_whitney(g, sub);
  check_contract(g, sub, c);
  const double cd = estimate_doubling(g).doubling;
  const CoverReport rep = verify_cover(g, sub, c, cd);
  CHECK(rep.pass);
  CHECK(rep.multiplicity <= 9.0 * std::pow(cd, 4));
  // multiplicity recomputed by hand
  int mult = 0;
  for (PointId x = 0; x < g.size(); ++x) {
    if (sub.contains(x)) continue;
    int k = 0;
    for (const auto& wb : c.balls) k += g.distance(x, wb.ball.center) < wb.ball.radius;
    mult = std::max(mult, k);
  }
  CHECK(rep.multiplicity == mult);
  CHECK(c.multiplicity == mult);
}

TEST_CASE("random spaces satisfy the contract") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto sp = seed % 2 ? sobext::testing::random_cloud(seed, 80, 2) : sobext::testing::random_graph_metric(seed, 60);
    const auto sub = make_subset(sp, sobext::testing::random_subset(seed * 7, sp.size(), 0.3));
    const WhitneyCover c = build_whitney(sp, sub);
    check_contract(sp, sub, c);
    const CoverReport rep = verify_cover(sp, sub, c, 1e9);
    CHECK(rep.coverage);
    CHECK(rep.sandwich);
  }
}

TEST_CASE("anchors") {
  const auto s = line_grid(16);
  CHECK(select_anchor(s, make_subset(s, {0}), {4, 1.0}) == 0);
  CHECK(select_anchor(s, make_subset(s, {0, 8}), {3, 0.5}) == 0);
  CHECK(select_anchor(s, make_subset(s, {0, 8}), {4, 0.5}) == 0);
  CHECK(select_anchor(s, make_subset(s, {8, 0}), {4, 0.5}) == 0);
  CHECK(select_anchor(s, make_subset(s, {0, 8}), {6, 0.5}) == 8);
}

TEST_CASE("construction is deterministic") {
  const auto sp = sobext::testing::random_cloud(3, 120, 2);
  const auto sub = make_subset(sp, sobext::testing::random_subset(3, sp.size(), 0.4));
  const WhitneyCover a = build_whitney(sp, sub);
  const WhitneyCover b = build_whitney(sp, sub);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.balls[i].ball.center == b.balls[i].ball.center);
    CHECK(a.balls[i].ball.radius == b.balls[i].ball.radius);
    CHECK(a.balls[i].anchor == b.balls[i].anchor);
  }
}

TEST_CASE("corrupted radius is flagged") {
  const auto s = line_grid(16);
  const auto sub = make_subset(s, {0});
  WhitneyCover c = build_whitney(s, sub);
  auto balls = c.balls;
  const std::size_t victim = balls.size() / 2;
  balls[victim].ball.radius /= 2.0;
  balls[victim].star_radius /= 2.0;
  const WhitneyCover bad = assemble_cover(s, sub, balls);
  const CoverReport rep = verify_cover(s, sub, bad, estimate_doubling(s).doubling);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.sandwich);
  REQUIRE(rep.sandwich_violations.size() >= 1);
  CHECK(rep.sandwich_violations.front() == victim);

  // dropping the only ball over some point leaves a hole there
  std::optional<PointId> lonely;
  for (PointId x = 1; x < s.size() && !lonely; ++x)
    if (c.balls_at[x].size() == 1) lonely = x;
  REQUIRE(lonely.has_value());
  balls = c.balls;
  balls.erase(balls.begin() + static_cast<std::ptrdiff_t>(c.balls_at[*lonely].front()));
  const CoverReport hole = verify_cover(s, sub, assemble_cover(s, sub, balls), 2.0);
  CHECK_FALSE(hole.coverage);
  CHECK_FALSE(hole.pass);
  REQUIRE(hole.uncovered.has_value());
  CHECK(c.balls_at[*hole.uncovered].size() == 1);
}

TEST_CASE("neighbor lists are symmetric and include the ball itself") {
  const auto sp = sobext::testing::random_cloud(9, 100, 2);
  const auto sub = make_subset(sp, sobext::testing::random_subset(9, sp.size(), 0.3));
  const WhitneyCover c = build_whitney(sp, sub);
  for (std::size_t b = 0; b < c.size(); ++b) {
    CHECK(std::binary_search(c.neighbors[b].begin(), c.neighbors[b].end(), b));
    for (std::size_t k : c.neighbors[b]) CHECK(std::binary_search(c.neighbors[k].begin(), c.neighbors[k].end(), b));
  }
}
