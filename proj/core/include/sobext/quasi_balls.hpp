#pragma once

#include <optional>
#include <vector>

#include "sobext/space.hpp"
#include "sobext/whitney.hpp"

namespace sobext {

/// Reflected quasi-balls H_B, one per Whitney ball (same indexing).
struct QuasiBallFamily {
  std::vector<PointSet> sets;
  /// mu(B_eps cap S) for balls with r_B <= delta, 0 otherwise.
  std::vector<double> core_measure;
  double epsilon = 0.5;
  double delta = 0.0;

  double gamma1 = 0.0;          // max d(h, x_B) / r_B over h in H_B
  double gamma2 = 0.0;          // max mu(B) / mu(H_B) over balls with r_B <= delta
  double gamma2_forward = 0.0;  // max mu(H_B) / mu(B) over the same balls
  int gamma3 = 0;               // max number of H_B containing a point
  /// Balls with r_B <= delta whose H_B came out empty.
  std::vector<std::size_t> empty_small;

  std::size_t size() const { return sets.size(); }
};

/// B_eps = B(y_B, eps r_B); A_B = {K != B : K_eps meets B_eps, r_K <= eps r_B};
/// H_B = (B_eps cap S) minus the union of K_eps over A_B, and H_B = {} when
/// r_B > delta.
QuasiBallFamily build_quasi_balls(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                                  double epsilon, double delta);

/// Family with the given sets (for example read back from a dump); fills
/// core_measure and the observed constants.
QuasiBallFamily family_from_sets(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                                 double epsilon, double delta, std::vector<PointSet> sets);

/// Recomputes gamma1, gamma2, gamma2_forward, gamma3 and empty_small from the
/// sets.
void measure_family(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                    QuasiBallFamily& family);

struct EpsilonChoice {
  double epsilon = 0.5;
  QuasiBallFamily family;
};

/// Halves eps from 1/2 until mu(H_B) >= mu(B_eps cap S) / 2 for every ball with
/// r_B <= delta; gives up below 2^-20.
EpsilonChoice tune_epsilon(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                           double delta);

/// True when every small ball keeps at least half of B_eps cap S.
bool family_is_balanced(const MetricMeasureSpace& space, const QuasiBallFamily& family);

struct RadiusGateViolation {
  std::size_t ball_a = 0;
  std::size_t ball_b = 0;
  PointId shared = 0;
};

struct FamilyReport {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma2_forward = 0.0;
  int gamma3 = 0;
  int recorded_gamma3 = 0;

  /// Balls breaking a structural property: empty small H_B, nonempty large
  /// H_B, or H_B leaving B_eps cap S.
  std::vector<std::size_t> violating_balls;
  std::vector<RadiusGateViolation> gate_violations;
  /// First ball whose set differs from a fresh build with the same eps, delta.
  std::optional<std::size_t> mismatch;
  /// Point of S attaining gamma3.
  std::optional<PointId> densest_point;

  bool pass = true;
};

FamilyReport verify_family(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                           const QuasiBallFamily& family);

}  // namespace sobext
