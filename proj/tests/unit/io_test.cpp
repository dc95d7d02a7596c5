#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sobext/io.hpp"
#include "support/built.hpp"
#include "support/test_spaces.hpp"

using namespace sobext;

namespace {

void same_space(const MetricMeasureSpace& a, const MetricMeasureSpace& b) {
  REQUIRE(a.size() == b.size());
  CHECK(a.has_coordinates() == b.has_coordinates());
  CHECK(a.window().r_min == b.window().r_min);
  CHECK(a.window().r_max == b.window().r_max);
  for (PointId i = 0; i < a.size(); ++i) {
    CHECK(a.weight(i) == b.weight(i));
    for (PointId j = 0; j < a.size(); ++j) CHECK(a.distance(i, j) == b.distance(i, j));
  }
}

}  // namespace

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.0, 1.0, 0.1, -2.5e-300, 1.0 / 3.0, 6.02214076e23, 5e-324}) {
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK(io::format_double(kInfinity) == "inf");
  CHECK(io::format_double(-kInfinity) == "-inf");
  CHECK(std::isnan(io::parse_double("nan")));
  CHECK_THROWS_AS(io::parse_double("1.0x"), Error);
}

TEST_CASE("spaces round-trip") {
  const auto cloud = sobext::testing::random_cloud(3, 30, 3);
  std::stringstream a;
  io::write_space(a, cloud);
  same_space(cloud, io::read_space(a));

  const auto graph = sobext::testing::random_graph_metric(4, 25);
  std::stringstream b;
  io::write_space(b, graph);
  same_space(graph, io::read_space(b));
}

TEST_CASE("space parse errors") {
  std::istringstream missing("mms v1 2 coords\np 0 0.0 1\n");
  CHECK_THROWS_WITH_AS(io::read_space(missing), "point 1 missing from space file", Error);
  std::istringstream header("mms v2 2 coords\n");
  CHECK_THROWS_AS(io::read_space(header), Error);
  std::istringstream dims("mms v1 2 coords\np 0 0 0 1\np 1 1 1\n");
  CHECK_THROWS_AS(io::read_space(dims), Error);
  std::istringstream comments("# hand written\nmms v1 2 coords\np 0 0 1  # origin\n\np 1 2 1\n");
  const auto sp = io::read_space(comments);
  CHECK(sp.distance(0, 1) == 2.0);
}

TEST_CASE("masks and fields round-trip") {
  const PointSet mask{0, 4, 7};
  std::stringstream m;
  io::write_mask(m, mask);
  CHECK(io::read_mask(m, 8) == mask);
  std::istringstream out_of_range("mask v1\n9\n");
  CHECK_THROWS_AS(io::read_mask(out_of_range, 8), Error);

  const ScalarField f = sobext::testing::random_field(2, 10, {1, 2, 5, 9});
  std::stringstream s;
  io::write_field(s, f);
  CHECK(io::read_field(s, 10) == f);
  std::istringstream dup("field v1\n1 0.5\n1 0.25\n");
  CHECK_THROWS_AS(io::read_field(dup, 4), Error);
}

TEST_CASE("cover and family round-trip") {
  auto sp = sobext::testing::lattice_cloud(6, 60, 2);
  const PointSet mask = sobext::testing::random_subset(6, sp.size(), 0.4);
  const double delta = build_whitney(sp, make_subset(sp, mask)).max_radius();
  const auto b = sobext::testing::build(std::move(sp), mask, delta);
  std::stringstream c;
  io::write_cover(c, b->cover);
  const WhitneyCover cover = io::read_cover(c, b->space, b->s);
  REQUIRE(cover.size() == b->cover.size());
  for (std::size_t k = 0; k < cover.size(); ++k) {
    CHECK(cover.balls[k].ball.center == b->cover.balls[k].ball.center);
    CHECK(cover.balls[k].ball.radius == b->cover.balls[k].ball.radius);
    CHECK(cover.balls[k].anchor == b->cover.balls[k].anchor);
    CHECK(cover.members[k] == b->cover.members[k]);
  }
  CHECK(cover.multiplicity == b->cover.multiplicity);

  std::stringstream f;
  io::write_family(f, b->family);
  const QuasiBallFamily fam = io::read_family(f, b->space, b->s, cover);
  CHECK(fam.sets == b->family.sets);
  CHECK(fam.epsilon == b->family.epsilon);
  CHECK(fam.delta == b->family.delta);
  CHECK(fam.gamma3 == b->family.gamma3);
  CHECK(fam.gamma2 == b->family.gamma2);
}

TEST_CASE("reports round-trip") {
  AuditReport a;
  a.name = "alpha";
  a.observed_constant = kInfinity;
  a.ceiling = 2.0;
  a.pass = false;
  Witness w;
  w.points = {3, 1};
  w.radius = 0.5;
  w.ball = 7;
  w.lhs = 1.0;
  w.rhs = 0.0;
  a.witness = w;
  a.refinement_ratio = 0.75;
  a.instances = 12;
  a.note = "x, y";
  AuditReport b;
  b.name = "beta";
  b.observed_constant = 0.125;
  const auto back = io::reports_from_json(io::reports_to_json({a, b}));
  REQUIRE(back.size() == 2);
  CHECK(back[0].observed_constant == kInfinity);
  CHECK(back[0].ceiling == 2.0);
  CHECK_FALSE(back[0].pass);
  CHECK(back[0].witness->points == std::vector<PointId>{3, 1});
  CHECK(back[0].witness->radius == 0.5);
  CHECK(back[0].witness->ball == 7u);
  CHECK(back[0].refinement_ratio == 0.75);
  CHECK(back[0].instances == 12);
  CHECK(back[0].note == "x, y");
  CHECK_FALSE(back[1].ceiling.has_value());
  CHECK_FALSE(back[1].witness.has_value());
  CHECK_THROWS_AS(io::reports_from_json("{"), Error);

  std::stringstream csv;
  io::write_csv(csv, io::csv_rows("fx", {a, b}));
  const auto rows = io::read_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].fixture == "fx");
  CHECK(rows[0].observed_constant == kInfinity);
  CHECK(rows[0].refinement_ratio == 0.75);
  CHECK_FALSE(rows[1].ceiling.has_value());
  CHECK_FALSE(rows[1].refinement_ratio.has_value());
  CHECK(rows[1].pass);
}
