#include <doctest.h>

#include <cmath>
#include <set>

#include "sobext/pipeline.hpp"
#include "support/paths.hpp"

using namespace sobext;

namespace {

// Verification outputs of the cover, family and partition modules; their
// values are counts and ratios of single atoms at the coarse level.
const std::set<std::string> kStructural{"whitney_cover",         "whitney_comparability", "quasi_ball_containment",
                                        "quasi_ball_measure",    "quasi_ball_overlap",    "partition_sum",
                                        "partition_lipschitz"};

const AuditReport* by_name(const std::vector<AuditReport>& reps, const std::string& name) {
  for (const auto& r : reps)
    if (r.name == name) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("uncapped audit constants are stable under refinement") {
  for (const char* name : {"fat_cantor_l3", "sierpinski_l2", "cantor_corners"}) {
    CAPTURE(name);
    const RunConfig cfg = load_config(sobext::testing::fixture_dir() / (std::string(name) + ".json"));
    REQUIRE(cfg.refine.has_value());
    REQUIRE(cfg.p == 2.0);
    const PipelineResult res = run_pipeline(cfg, false);
    CHECK(res.exit_code == 0);
    std::size_t checked = 0;
    for (const auto& r : res.reports) {
      if (kStructural.count(r.name) || r.ceiling) continue;
      const AuditReport* fine = by_name(res.refined_reports, r.name);
      REQUIRE(fine != nullptr);
      if (r.instances == 0 || fine->instances == 0) continue;
      CAPTURE(r.name);
      REQUIRE(r.refinement_ratio.has_value());
      CHECK(*r.refinement_ratio >= 0.25);
      CHECK(*r.refinement_ratio <= 4.0);
      ++checked;
    }
    CHECK(checked >= 15);

    // the partition Lipschitz constant moves by at most a factor 2
    const AuditReport* lip = by_name(res.reports, "partition_lipschitz");
    REQUIRE(lip != nullptr);
    REQUIRE(lip->refinement_ratio.has_value());
    CHECK(*lip->refinement_ratio >= 0.5);
    CHECK(*lip->refinement_ratio <= 2.0);
  }
}

TEST_CASE("refinement leaves the scale and input fixed") {
  const RunConfig cfg = load_config(sobext::testing::fixture_dir() / "fat_cantor_l3.json");
  const Instance coarse = build_instance(cfg, cfg.generator);
  const Instance fine = build_instance(cfg, cfg.refine);
  CHECK(coarse.s.delta == fine.s.delta);
  CHECK(fine.fixture.space.size() == 4 * coarse.fixture.space.size());
  CHECK(fine.cover.max_radius() <= coarse.s.delta);
  CHECK(coarse.cover.max_radius() <= coarse.s.delta);
}
