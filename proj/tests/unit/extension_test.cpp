#include <doctest.h>

#include <cmath>

#include "sobext/extension.hpp"
#include "support/built.hpp"
#include "support/test_spaces.hpp"

using namespace sobext;
using sobext::testing::Built;

namespace {

std::unique_ptr<Built> random_built(std::uint64_t seed, double delta_factor = 1.0) {
  auto sp = seed % 2 ? sobext::testing::random_cloud(seed, 80, 2) : sobext::testing::lattice_cloud(seed, 80, 2);
  auto mask = sobext::testing::random_subset(seed + 7, sp.size(), 0.4);
  const RegularSubset probe = make_subset(sp, mask);
  const double delta = build_whitney(sp, probe).max_radius() * delta_factor;
  return sobext::testing::build(std::move(sp), std::move(mask), delta);
}

long double naive_average(const MetricMeasureSpace& sp, const ScalarField& f, const PointSet& h) {
  long double fw = 0, w = 0;
  for (PointId p : h) {
    fw += static_cast<long double>(f.at(p)) * sp.weight(p);
    w += sp.weight(p);
  }
  return h.empty() ? 0.0L : fw / w;
}

}  // namespace

TEST_CASE("restriction is exact") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto b = random_built(seed);
    const ScalarField u = sobext::testing::random_field(seed, b->space.size(), b->s.ids);
    const ScalarField ext = extend_function(b->context(), u);
    CHECK(ext.domain() == all_points(b->space));
    for (PointId x : b->s.ids) CHECK(ext.at(x) == u.at(x));
  }
}

TEST_CASE("constants are preserved below the scale") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto b = random_built(seed, 1.0);
    REQUIRE(b->family.empty_small.empty());
    for (double c : {1.0, -3.5, 0.1}) {
      const ScalarField u = ScalarField::constant(b->space.size(), b->s.ids, c);
      const ScalarField ext = extend_function(b->context(), u);
      for (PointId x = 0; x < b->space.size(); ++x) CHECK(std::abs(ext.at(x) - c) <= 1e-12 * std::abs(c));
    }
  }
}

TEST_CASE("constants decay where quasi-balls are empty") {
  const auto b = random_built(3, 0.0);
  const ScalarField u = ScalarField::constant(b->space.size(), b->s.ids, 2.0);
  const ScalarField ext = extend_function(b->context(), u);
  for (PointId x = 0; x < b->space.size(); ++x) {
    if (!b->s.contains(x)) CHECK(ext.at(x) == 0.0);
  }
}

TEST_CASE("term sums against a direct evaluation") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto b = random_built(seed, 0.7);
    const auto& sp = b->space;
    const std::size_t n = sp.size();
    const ScalarField u = sobext::testing::random_field(seed, n, b->s.ids);
    ScalarField g = sobext::testing::random_field(seed + 1, n, b->s.ids);
    for (PointId x : b->s.ids) g.set(x, std::abs(g.at(x)));
    const ExtensionBundle bundle = make_bundle(b->context(), u, g);
    const ScalarField f_abs = extend_abs_average(b->context(), u);
    for (PointId x = 0; x < n; ++x) {
      if (b->s.contains(x)) {
        CHECK(bundle.g_tilde->at(x) == g.at(x));
        CHECK(f_abs.at(x) == u.at(x));
        continue;
      }
      long double eu = 0, eg = 0, ef = 0;
      for (std::size_t k = 0; k < b->cover.size(); ++k) {
        const auto& wb = b->cover.balls[k];
        const long double ua = naive_average(sp, u, b->family.sets[k]);
        const long double ga = naive_average(sp, g, b->family.sets[k]);
        eu += ua * b->partition.phi(k, x);
        if (sp.distance(x, wb.ball.center) < wb.star_radius) {
          eg += ga + std::fabs(ua);
          ef += std::fabs(ua);
        }
      }
      CHECK(bundle.u_tilde.at(x) == doctest::Approx(static_cast<double>(eu)).epsilon(1e-12));
      CHECK(bundle.g_tilde->at(x) == doctest::Approx(static_cast<double>(eg)).epsilon(1e-12));
      CHECK(f_abs.at(x) == doctest::Approx(static_cast<double>(ef)).epsilon(1e-12));
      CHECK(bundle.g_tilde->at(x) >= 0.0);
    }
  }
}

TEST_CASE("linearity and positivity") {
  const auto b = random_built(5, 0.8);
  const std::size_t n = b->space.size();
  const ScalarField u = sobext::testing::random_field(1, n, b->s.ids);
  const ScalarField v = sobext::testing::random_field(2, n, b->s.ids);
  std::vector<double> w(b->s.size()), pos(b->s.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = 2.0 * u.values()[i] - 3.0 * v.values()[i];
    pos[i] = std::abs(u.values()[i]);
  }
  const ScalarField eu = extend_function(b->context(), u);
  const ScalarField ev = extend_function(b->context(), v);
  const ScalarField ew = extend_function(b->context(), ScalarField(n, b->s.ids, w));
  const ScalarField ep = extend_function(b->context(), ScalarField(n, b->s.ids, pos));
  for (PointId x = 0; x < n; ++x) {
    CHECK(ew.at(x) == doctest::Approx(2.0 * eu.at(x) - 3.0 * ev.at(x)).epsilon(1e-12).scale(1.0));
    CHECK(ep.at(x) >= 0.0);
  }
}

TEST_CASE("input validation") {
  const auto b = random_built(2);
  const std::size_t n = b->space.size();
  const ScalarField u = sobext::testing::random_field(1, n, b->s.ids);
  ScalarField g = ScalarField::constant(n, b->s.ids, 1.0);
  g.set(b->s.ids.front(), -1.0);
  CHECK_THROWS_AS(extend_gradient(b->context(), u, g), Error);
  const ScalarField everywhere = ScalarField::constant(n, all_points(b->space), 1.0);
  CHECK_THROWS_AS(extend_function(b->context(), everywhere), Error);
}

TEST_CASE("zero extension") {
  const ScalarField f(5, {1, 3}, {2.0, -1.0});
  const ScalarField z = zero_extend(f);
  CHECK(z.domain() == PointSet{0, 1, 2, 3, 4});
  CHECK(z.values()[0] == 0.0);
  CHECK(z.at(1) == 2.0);
  CHECK(z.at(3) == -1.0);
  CHECK(z.at(4) == 0.0);
}

TEST_CASE("canonical gradient") {
  const auto two = sobext::testing::line({0.0, 4.0});
  const ScalarField u(2, {0, 1}, {1.0, 3.0});
  const ScalarField g = canonical_gradient(two, u);
  CHECK(g.at(0) == 0.25);
  CHECK(g.at(1) == 0.25);

  const auto sp = sobext::testing::random_cloud(9, 50, 3);
  const ScalarField r = sobext::testing::random_field(9, 50, all_points(sp));
  const ScalarField gr = canonical_gradient(sp, r);
  for (PointId x = 0; x < 50; ++x) {
    for (PointId y = 0; y < 50; ++y) {
      if (x == y) continue;
      CHECK(std::abs(r.at(x) - r.at(y)) <= sp.distance(x, y) * (gr.at(x) + gr.at(y)) * (1 + 1e-15));
    }
  }
}
