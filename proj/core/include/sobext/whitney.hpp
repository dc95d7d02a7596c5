#pragma once

#include <optional>
#include <vector>

#include "sobext/space.hpp"

namespace sobext {

struct WhitneyBall {
  Ball ball;
  PointId anchor = 0;        // nearest point of S to the center
  double star_radius = 0.0;  // 9/8 of the radius
};

/// Whitney covering of X \ S with cached membership tables.
struct WhitneyCover {
  std::vector<WhitneyBall> balls;
  int multiplicity = 0;
  /// Balls K with B* and K* sharing a point (B itself included).
  std::vector<std::vector<std::size_t>> neighbors;
  std::vector<PointSet> members;
  std::vector<PointSet> star_members;
  /// Per point: indices of balls whose star contains it.
  std::vector<std::vector<std::size_t>> stars_at;
  /// Per point: indices of balls containing it.
  std::vector<std::vector<std::size_t>> balls_at;

  std::size_t size() const { return balls.size(); }
  bool empty() const { return balls.empty(); }
  double max_radius() const;
};

/// Greedy Whitney covering: rho(x) = d(x, S) / 4, centers accepted in order of
/// decreasing rho (ties by id) when farther than rho_j / 2 from every accepted
/// center x_j.
WhitneyCover build_whitney(const MetricMeasureSpace& space, const RegularSubset& s);

/// argmin over S of d(center, .), lowest id on ties.
PointId select_anchor(const MetricMeasureSpace& space, const RegularSubset& s, const Ball& ball);

/// Fills the membership, neighbor and multiplicity tables for `balls`.
WhitneyCover assemble_cover(const MetricMeasureSpace& space, const RegularSubset& s,
                            std::vector<WhitneyBall> balls);

struct CoverReport {
  bool coverage = true;
  std::optional<PointId> uncovered;

  bool sandwich = true;  // r <= dist(B, S) <= 4r for every ball
  std::vector<std::size_t> sandwich_violations;

  int multiplicity = 0;
  double multiplicity_bound = 0.0;  // 9 * C_d^4
  int star_multiplicity = 0;

  // Observed comparability constants (max ratios).
  double anchor_constant = 0.0;         // both inclusions around y_B
  double anchor_measure_ratio = 1.0;    // mu(B(x_B, r_B)) vs mu(B(y_B, r_B))
  double neighbor_constant = 1.0;       // r_K / r_B over neighbors
  double star_distance_constant = 1.0;  // d(x, S) / r_B over x in B*
  double comparability = 1.0;           // max of the three radius constants
  double comparability_ceiling = 64.0;

  bool pass = true;
};

CoverReport verify_cover(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                         double doubling_constant, double comparability_ceiling = 64.0);

}  // namespace sobext
