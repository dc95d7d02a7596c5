#include "sobext/generators.hpp"

#include <cmath>

namespace sobext {

namespace {

void check_schedule_value(double f, int step) {
  if (!(f >= 0.0) || !(f < 1.0)) {
    throw Error("removal schedule must stay in [0, 1) (step " + std::to_string(step) + ")");
  }
}

MetricMeasureSpace cell_centers(int cells, int dims) {
  if (cells <= 0) throw Error("cell count must be positive");
  const double h = 1.0 / cells;
  std::size_t n = 1;
  for (int d = 0; d < dims; ++d) n *= static_cast<std::size_t>(cells);
  std::vector<double> coords;
  coords.reserve(n * static_cast<std::size_t>(dims));
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (int d = 0; d < dims; ++d) {
      const auto i = static_cast<double>(rest % static_cast<std::size_t>(cells));
      rest /= static_cast<std::size_t>(cells);
      coords.push_back((i + 0.5) * h);
    }
  }
  const double w = std::pow(h, dims);
  return MetricMeasureSpace::from_coordinates(dims, std::move(coords), std::vector<double>(n, w));
}

double cell_diameter(int cells, int dims) { return std::sqrt(static_cast<double>(dims)) / cells; }

}  // namespace

double fat_cantor_default_schedule(int step) { return std::pow(4.0, -step); }

double fat_sierpinski_default_schedule(int step) { return std::pow(2.0, -step); }

MetricMeasureSpace gen_grid(std::span<const int> dims, double spacing) {
  if (dims.empty()) throw Error("grid needs at least one dimension");
  if (!(spacing > 0.0)) throw Error("grid spacing must be positive");
  std::size_t n = 1;
  for (int d : dims) {
    if (d <= 0) throw Error("grid extents must be positive");
    n *= static_cast<std::size_t>(d);
  }
  const int dim = static_cast<int>(dims.size());
  std::vector<double> coords;
  coords.reserve(n * dims.size());
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (int d : dims) {
      coords.push_back(static_cast<double>(rest % static_cast<std::size_t>(d)) * spacing);
      rest /= static_cast<std::size_t>(d);
    }
  }
  return MetricMeasureSpace::from_coordinates(dim, std::move(coords),
                                              std::vector<double>(n, std::pow(spacing, dim)));
}

std::vector<std::pair<double, double>> fat_cantor_intervals(int level, const RemovalSchedule& schedule) {
  if (level < 0) throw Error("level must be nonnegative");
  std::vector<std::pair<double, double>> current{{0.0, 1.0}};
  for (int k = 1; k <= level; ++k) {
    const double f = schedule(k);
    check_schedule_value(f, k);
    std::vector<std::pair<double, double>> next;
    next.reserve(current.size() * 2);
    for (auto [a, b] : current) {
      const double keep = (b - a) * (1.0 - f) / 2.0;
      next.emplace_back(a, a + keep);
      next.emplace_back(b - keep, b);
    }
    current = std::move(next);
  }
  return current;
}

Fixture gen_fat_cantor(int level, int cells, int dims, const RemovalSchedule& schedule) {
  if (dims != 1 && dims != 2) throw Error("fat Cantor generator supports 1 or 2 dimensions");
  const auto intervals = fat_cantor_intervals(level, schedule);
  std::vector<char> keep(static_cast<std::size_t>(cells), 0);
  for (int i = 0; i < cells; ++i) {
    const double c = (i + 0.5) / cells;
    for (auto [a, b] : intervals) {
      if (c >= a && c <= b) {
        keep[static_cast<std::size_t>(i)] = 1;
        break;
      }
    }
  }
  Fixture fx{"fat_cantor", cell_centers(cells, dims), {}, 4.0 * cell_diameter(cells, dims)};
  const std::size_t n = fx.space.size();
  for (std::size_t idx = 0; idx < n; ++idx) {
    const std::size_t i = idx % static_cast<std::size_t>(cells);
    const std::size_t j = idx / static_cast<std::size_t>(cells);
    if (keep[i] && (dims == 1 || keep[j])) fx.mask.push_back(static_cast<PointId>(idx));
  }
  if (fx.mask.empty()) throw Error("schedule removes every cell");
  return fx;
}

Fixture gen_fat_sierpinski(int level, int cells, const RemovalSchedule& schedule) {
  if (level < 0) throw Error("level must be nonnegative");
  std::vector<double> fractions;
  double removed_area = 0.0;
  for (int k = 1; k <= level; ++k) {
    const double a = schedule(k);
    check_schedule_value(a, k);
    fractions.push_back(a);
    removed_area += std::pow(9.0, k - 1) * std::pow(a * std::pow(3.0, -(k - 1)), 2);
  }
  if (removed_area >= 1.0) throw Error("schedule removes the whole square");
  Fixture fx{"fat_sierpinski", cell_centers(cells, 2), {}, 4.0 * cell_diameter(cells, 2)};
  const std::size_t n = fx.space.size();
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto c = fx.space.coordinates(static_cast<PointId>(idx));
    bool removed = false;
    for (int k = 1; k <= level && !removed; ++k) {
      const double side = std::pow(3.0, -(k - 1));
      const double half = fractions[static_cast<std::size_t>(k - 1)] * side / 2.0;
      double gap = 0.0;
      for (int d = 0; d < 2; ++d) {
        const double q = (std::floor(c[d] / side) + 0.5) * side;
        gap = std::max(gap, std::abs(c[d] - q));
      }
      removed = gap < half;
    }
    if (!removed) fx.mask.push_back(static_cast<PointId>(idx));
  }
  if (fx.mask.empty()) throw Error("schedule removes every cell");
  return fx;
}

}  // namespace sobext
