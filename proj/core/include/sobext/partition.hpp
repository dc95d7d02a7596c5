#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sobext/space.hpp"
#include "sobext/whitney.hpp"

namespace sobext {

struct PartitionEntry {
  std::size_t ball = 0;
  double value = 0.0;
};

/// Sparse partition of unity on X \ S: entries[x] lists (ball, phi_B(x)) in
/// ball order; points of S have no entries.
struct Partition {
  std::vector<std::vector<PartitionEntry>> entries;
  double lipschitz_constant = 0.0;

  double phi(std::size_t ball, PointId x) const;
};

/// psi_B = clamp((9/8 r_B - d(x, x_B)) / (r_B / 8), 0, 1), phi_B = psi_B / sum psi.
Partition build_partition(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover);

struct LipschitzWitness {
  PointId x = 0;
  PointId y = 0;
  std::size_t ball = 0;
};

/// max over x != y in X \ S and balls B of |phi_B(x) - phi_B(y)| r_B / d(x, y).
double partition_lipschitz(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                           const Partition& partition, LipschitzWitness* witness = nullptr);

struct SupportViolation {
  std::size_t ball = 0;
  PointId point = 0;
  double value = 0.0;
};

struct PartitionReport {
  double max_sum_deviation = 0.0;
  std::optional<PointId> worst_point;
  std::vector<SupportViolation> support_violations;  // nonzero phi_B outside B*, or on S
  std::vector<SupportViolation> range_violations;    // phi_B outside [0, 1]
  double lipschitz_constant = 0.0;
  LipschitzWitness lipschitz_witness;
  bool pass = true;
};

PartitionReport verify_partition(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                                 const Partition& partition, double sum_tolerance = 1e-12);

}  // namespace sobext
