#include <doctest.h>

#include <cmath>

#include "sobext/audit.hpp"
#include "sobext/generators.hpp"
#include "support/built.hpp"
#include "support/test_spaces.hpp"

using namespace sobext;

namespace {

std::unique_ptr<sobext::testing::Built> sierpinski() {
  Fixture fx = gen_fat_sierpinski(2, 16);
  return sobext::testing::build(std::move(fx.space), std::move(fx.mask), fx.recommended_delta);
}

// One removed central cross: large Whitney balls with many points each.
std::unique_ptr<sobext::testing::Built> corners() {
  Fixture fx = gen_fat_cantor(1, 16, 2, [](int) { return 0.75; });
  return sobext::testing::build(std::move(fx.space), std::move(fx.mask), 0.25);
}

const AuditReport& find(const std::vector<AuditReport>& reps, const std::string& name) {
  for (const auto& r : reps)
    if (r.name == name) return r;
  FAIL("missing report " << name);
  return reps.front();
}

}  // namespace

TEST_CASE("ratio conventions") {
  CHECK(RatioTracker::ratio(0.0, 0.0) == 0.0);
  CHECK(RatioTracker::ratio(1e-13, 0.0) == 0.0);
  CHECK(RatioTracker::ratio(1e-11, 0.0) == kInfinity);
  CHECK(RatioTracker::ratio(3.0, 2.0) == 1.5);

  RatioTracker t;
  t.observe(0.0, 0.0, {});
  CHECK(t.constant() == 0.0);
  CHECK_FALSE(t.witness().has_value());
  Witness a;
  a.points = {1};
  Witness b;
  b.points = {2};
  t.observe(2.0, 1.0, a);
  t.observe(4.0, 2.0, b);  // tie keeps the first
  CHECK(t.constant() == 2.0);
  CHECK(t.witness()->points == std::vector<PointId>{1});
  CHECK(t.witness()->lhs == 2.0);
  CHECK(t.instances() == 3);

  CHECK(t.report("x", 2.0).pass);
  CHECK_FALSE(t.report("x", 1.5).pass);
  CHECK(t.report("x", std::nullopt).pass);
  t.observe(1.0, 0.0, b);
  CHECK_FALSE(t.report("x", std::nullopt).pass);
  CHECK(t.witness()->points == std::vector<PointId>{2});

  RatioTracker u, v;
  u.observe(1.0, 1.0, a);
  v.observe(1.0, 1.0, b);
  u.merge(v);
  CHECK(u.witness()->points == std::vector<PointId>{1});
  CHECK(u.instances() == 2);
}

TEST_CASE("refinement ratio") {
  CHECK(refinement_ratio(0.0, 0.0) == 1.0);
  CHECK(refinement_ratio(0.0, 1.0) == kInfinity);
  CHECK(refinement_ratio(2.0, 1.0) == 0.5);
  CHECK(refinement_ratio(2.0, 0.0) == 0.0);
}

TEST_CASE("oscillation lemma on two points") {
  const auto sp = sobext::testing::line({0.0, 2.0});
  const ScalarField u(2, {0, 1}, {0.0, 1.0});
  const std::vector<SubsetPair> pairs{{{0}, {1}}};
  const std::vector<SubsetPoint> points{{{0}, 1}};
  auto tight = audit_oscillation_lemma(sp, u, ScalarField::constant(2, {0, 1}, 0.25), pairs, points);
  CHECK(tight[0].name == "oscillation_pairs");
  CHECK(tight[0].observed_constant == 1.0);
  CHECK(tight[0].pass);
  CHECK(tight[1].observed_constant == 1.0);
  auto loose = audit_oscillation_lemma(sp, u, ScalarField::constant(2, {0, 1}, 0.2), pairs, points);
  CHECK_FALSE(loose[0].pass);
  CHECK(loose[0].observed_constant == doctest::Approx(1.25));
  CHECK(loose[0].witness->points == std::vector<PointId>{0, 1});
  CHECK_THROWS_AS(audit_oscillation_lemma(sp, u, u, {{{}, {1}}}, {}), Error);
}

TEST_CASE("restriction bound") {
  const ScalarField small(3, {0, 2}, {1.0, 2.0});
  const ScalarField big(3, {0, 1, 2}, {0.5, 9.0, 1.0});
  const AuditReport ok = audit_restriction_bound({0, 2}, small, big, "r");
  CHECK(ok.observed_constant == 2.0);
  CHECK(ok.pass);
  const ScalarField smaller(3, {0, 1, 2}, {0.5, 9.0, 0.9});
  const AuditReport bad = audit_restriction_bound({0, 2}, small, smaller, "r");
  CHECK_FALSE(bad.pass);
  CHECK(bad.witness->points == std::vector<PointId>{2});
}

TEST_CASE("sampled balls") {
  const auto sp = sobext::testing::line_grid(10);
  const auto balls = sample_balls(sp, {1, 3, 5, 7}, 2, 3);
  REQUIRE(balls.size() == 6);
  CHECK(balls[0].center == 1);
  CHECK(balls[3].center == 5);
  CHECK(balls[0].radius > 1.0);
  CHECK(balls[2].radius > 9.0);
  CHECK(sample_balls(sp, {}, 4, 4).empty());
}

TEST_CASE("healthy instance passes the inequality audits") {
  const auto b = sierpinski();
  const auto ctx = b->context();
  const ScalarField u = sobext::testing::random_field(3, b->space.size(), b->s.ids);
  const ExtensionBundle bundle = make_bundle(ctx, u, canonical_gradient(b->space, u));
  const AuditReport grad = audit_gradient_inequality(b->space, bundle);
  CHECK(grad.pass);
  CHECK(std::isfinite(grad.observed_constant));
  const auto osc = audit_oscillation_lemma(b->space, u, *bundle.g, family_pairs(b->cover, b->family),
                                           family_points(b->s, b->family));
  CHECK(osc[0].pass);
  CHECK(osc[1].pass);
  const auto lp = audit_lp_bounds(ctx, bundle, {}, 2.0);
  CHECK(lp.size() == 3);
  for (const auto& r : lp) CHECK(r.pass);
  const MaximalFields mf = compute_maximal_fields(ctx, bundle, 1.0);
  for (const auto& r : audit_sharp_bounds(ctx, bundle, mf)) CHECK(r.pass);
  CHECK(audit_maximal_lp(b->space, bundle, mf, 2.0).observed_constant >= 1.0);
  const auto trace = audit_trace_equivalence(ctx, bundle, mf, {2.0, 1.0}, grad.observed_constant);
  CHECK(find(trace, "trace_lower").pass);
  CHECK(find(trace, "trace_upper").pass);
  CHECK(find(trace, "hajlasz_trace").pass);
  BallLemmaConstants eta;
  const auto lemmas = audit_ball_lemmas(ctx, bundle, mf, sample_balls(b->space, b->s.ids, 8, 6),
                                        sample_balls(b->space, complement(b->space, b->s), 8, 6), &eta);
  CHECK(lemmas.size() == 7);
  for (const auto& r : lemmas) CHECK_MESSAGE(r.pass, r.name);
  CHECK(eta.eta1 > 0.0);
  CHECK(eta.eta2 == 1.0 + (b->family.gamma1 + 9.0 / 8.0) * eta.eta1);
}

TEST_CASE("halved cover radius is flagged") {
  const auto b = sierpinski();
  auto balls = b->cover.balls;
  const std::size_t victim = balls.size() / 2;
  balls[victim].ball.radius /= 2.0;
  balls[victim].star_radius /= 2.0;
  const WhitneyCover bad = assemble_cover(b->space, b->s, balls);
  const auto reps = cover_audits(verify_cover(b->space, b->s, bad, estimate_doubling(b->space).doubling));
  const AuditReport& cov = find(reps, "whitney_cover");
  CHECK_FALSE(cov.pass);
  REQUIRE(cov.witness.has_value());
  CHECK(cov.witness->ball.has_value());
  // the healthy cover passes
  CHECK(find(cover_audits(verify_cover(b->space, b->s, b->cover, estimate_doubling(b->space).doubling)),
             "whitney_cover")
            .pass);
}

TEST_CASE("constant-one partition is flagged") {
  const auto b = sierpinski();
  Partition fake = b->partition;
  for (auto& row : fake.entries)
    for (auto& e : row) e.value = 1.0;
  const auto reps = partition_audits(verify_partition(b->space, b->s, b->cover, fake));
  const AuditReport& sum = find(reps, "partition_sum");
  CHECK_FALSE(sum.pass);
  REQUIRE(sum.witness.has_value());
  CHECK(fake.entries[sum.witness->points.at(0)].size() > 1);
}

TEST_CASE("gradient zeroed over a Whitney ball is flagged") {
  const auto b = corners();
  const ScalarField u = sobext::testing::random_field(5, b->space.size(), b->s.ids);
  ExtensionBundle bundle = make_bundle(b->context(), u, canonical_gradient(b->space, u));
  // a ball on which the extension is not constant
  std::optional<std::size_t> target;
  for (std::size_t k = 0; k < b->cover.size() && !target; ++k) {
    const auto& m = b->cover.members[k];
    for (PointId x : m)
      if (bundle.u_tilde.at(x) != bundle.u_tilde.at(m.front())) target = k;
  }
  REQUIRE(target.has_value());
  for (PointId x : b->cover.members[*target]) bundle.g_tilde->set(x, 0.0);
  const AuditReport rep = audit_gradient_inequality(b->space, bundle);
  CHECK_FALSE(rep.pass);
  CHECK(rep.observed_constant == kInfinity);
  REQUIRE(rep.witness.has_value());
  const auto& m = b->cover.members[*target];
  for (PointId x : rep.witness->points) CHECK(std::binary_search(m.begin(), m.end(), x));
}
