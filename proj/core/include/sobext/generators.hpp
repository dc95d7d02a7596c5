#pragma once

#include <functional>
#include <span>
#include <string>

#include "sobext/space.hpp"

namespace sobext {

/// A generated space with a subset mask and the scale at which the mask is
/// expected to be regular (four ambient cell diameters).
struct Fixture {
  std::string name;
  MetricMeasureSpace space;
  PointSet mask;
  double recommended_delta = 0.0;
};

/// Fraction removed at construction step k (k = 1, 2, ...).
using RemovalSchedule = std::function<double(int step)>;

/// Middle 4^-k of every interval at step k.
double fat_cantor_default_schedule(int step);
/// Centered square of side 2^-k of every 3-adic square of generation k-1.
double fat_sierpinski_default_schedule(int step);

/// Lattice points i * spacing with weight spacing^d.
MetricMeasureSpace gen_grid(std::span<const int> dims, double spacing);

/// `cells`^dims cell centers of [0,1]^dims; the mask keeps cells whose center
/// lies in the product of fat Cantor sets of the given level.
Fixture gen_fat_cantor(int level, int cells, int dims = 1,
                       const RemovalSchedule& schedule = fat_cantor_default_schedule);

/// cells x cells centers of [0,1]^2; the mask removes, at every step k, the
/// centered square of side schedule(k) * 3^-(k-1) from each 3-adic square of
/// side 3^-(k-1).
Fixture gen_fat_sierpinski(int level, int cells,
                           const RemovalSchedule& schedule = fat_sierpinski_default_schedule);

/// Closed intervals that remain in [0,1] after `level` fat Cantor steps.
std::vector<std::pair<double, double>> fat_cantor_intervals(int level, const RemovalSchedule& schedule);

}  // namespace sobext
