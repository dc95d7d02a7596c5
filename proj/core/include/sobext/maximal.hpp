#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "sobext/space.hpp"

namespace sobext {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct NormParams {
  double p = 2.0;
  double alpha_order = 1.0;

  /// Throws Error unless p > 1 (infinity allowed) and alpha_order > 0.
  void validate() const;
};

namespace detail {

// Shared by the kernels and their reference implementations so that both
// round identically once the exact sums agree.
inline double sharp_statistic(double radius, double alpha, double deviation, double ball_measure) {
  return std::pow(radius, -alpha) * (deviation / ball_measure);
}

inline double hl_statistic(double abs_sum, double ball_measure) { return abs_sum / ball_measure; }

}  // namespace detail

/// f^#_{alpha,A}(x) = sup_r r^-alpha / mu(B(x,r)) * sum_{B cap A} |f - f_{B cap A}| w,
/// evaluated at every candidate radius with closed-ball membership. Defined on A.
ScalarField sharp_maximal(const MetricMeasureSpace& space, const PointSet& a, const ScalarField& f,
                          double alpha_order);

/// Mf(x) = sup_r (1/mu(B)) sum_B |f| w over candidate radii, together with the
/// singleton limit |f(x)|. f must be defined on all of X.
ScalarField hl_maximal(const MetricMeasureSpace& space, const ScalarField& f);

/// (sum |f|^p w)^(1/p) over the domain of f; max |f| for p = infinity.
double lp_norm(const MetricMeasureSpace& space, const ScalarField& f, double p);

/// ||f||_p + ||f^#_alpha||_p with A = X.
double calderon_norm(const MetricMeasureSpace& space, const ScalarField& f, const NormParams& params);

/// ||u||_p + ||u^#_{alpha,S}||_p on S.
double trace_side_norm(const MetricMeasureSpace& space, const PointSet& s, const ScalarField& u,
                       const NormParams& params);

/// First pair (x, y) in the domain of u breaking
/// |u(x) - u(y)| <= d(x, y) (g(x) + g(y)) beyond a relative tolerance.
std::optional<std::pair<PointId, PointId>> gradient_violation(const MetricMeasureSpace& space, const ScalarField& u,
                                                              const ScalarField& g, double rel_tol = 1e-12);

/// ||u||_p + ||g||_p after checking that g is a generalized gradient of u.
double hajlasz_norm_with_witness(const MetricMeasureSpace& space, const ScalarField& u, const ScalarField& g,
                                 double p);

}  // namespace sobext
