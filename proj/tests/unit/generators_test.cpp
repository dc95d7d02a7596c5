#include <doctest.h>

#include <cmath>

#include "sobext/generators.hpp"

using namespace sobext;

TEST_CASE("grid") {
  const int dims[] = {4};
  const auto g = gen_grid(dims, 1.0);
  REQUIRE(g.size() == 4);
  for (PointId i = 0; i < 4; ++i) {
    CHECK(g.weight(i) == 1.0);
    CHECK(g.coordinates(i)[0] == static_cast<double>(i));
  }
  const int dims2[] = {3, 5};
  const auto g2 = gen_grid(dims2, 0.5);
  CHECK(g2.size() == 15);
  CHECK(g2.weight(7) == 0.25);
  CHECK(g2.total_measure() == doctest::Approx(15 * 0.25));
  CHECK_THROWS_AS(gen_grid(std::span<const int>{}, 1.0), Error);
}

TEST_CASE("fat Cantor level zero keeps everything") {
  const auto fx = gen_fat_cantor(0, 32, 1);
  CHECK(fx.mask.size() == 32);
  CHECK(fx.recommended_delta == doctest::Approx(4.0 / 32));
}

TEST_CASE("fat Cantor interval measure") {
  // remaining length after k steps is prod (1 - 4^-j)
  const auto iv = fat_cantor_intervals(3, fat_cantor_default_schedule);
  CHECK(iv.size() == 8);
  double len = 0.0;
  for (auto [a, b] : iv) len += b - a;
  CHECK(len == doctest::Approx((1 - 0.25) * (1 - 0.0625) * (1 - 1.0 / 64)).epsilon(1e-14));
  CHECK(len > 0.5);
}

TEST_CASE("fat Cantor retained cells match a direct count") {
  const int cells = 256;
  const auto fx = gen_fat_cantor(3, cells, 1);
  const auto iv = fat_cantor_intervals(3, fat_cantor_default_schedule);
  std::size_t count = 0;
  for (int i = 0; i < cells; ++i) {
    const double c = (i + 0.5) / cells;
    bool in = false;
    for (auto [a, b] : iv) in = in || (a <= c && c <= b);
    count += in;
  }
  CHECK(fx.mask.size() == count);
  const double retained = fx.space.measure(fx.mask);
  double len = 0.0;
  for (auto [a, b] : iv) len += b - a;
  CHECK(std::abs(retained - len) <= 2.0 * 8 / cells);  // at most one cell per interval end

  const auto fx2 = gen_fat_cantor(3, 64, 2);
  const auto fx1 = gen_fat_cantor(3, 64, 1);
  CHECK(fx2.space.size() == 64 * 64);
  CHECK(fx2.mask.size() == fx1.mask.size() * fx1.mask.size());
}

TEST_CASE("fat Cantor rejects a schedule removing everything") {
  CHECK_THROWS_AS(gen_fat_cantor(1, 8, 1, [](int) { return 1.0; }), Error);
  CHECK_THROWS_AS(gen_fat_cantor(1, 8, 3), Error);
}

TEST_CASE("fat Sierpinski") {
  const auto fx = gen_fat_sierpinski(2, 32);
  CHECK(fx.space.size() == 1024);
  CHECK(!fx.mask.empty());
  CHECK(fx.mask.size() < 1024);
  // the cell at the center of the square is removed at step 1
  const PointId center = 16 * 32 + 16;
  CHECK(!std::binary_search(fx.mask.begin(), fx.mask.end(), center));
  CHECK(std::binary_search(fx.mask.begin(), fx.mask.end(), PointId{0}));
  const double removed = 1.0 - fx.space.measure(fx.mask);
  // continuum removal: (1/2)^2 + 8 (1/4 * 1/3)^2
  CHECK(removed == doctest::Approx(0.25 + 8.0 / 144).epsilon(0.25));
  CHECK(gen_fat_sierpinski(0, 8).mask.size() == 64);
}
