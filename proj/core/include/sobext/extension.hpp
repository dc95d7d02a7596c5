#pragma once

#include <optional>
#include <vector>

#include "sobext/partition.hpp"
#include "sobext/quasi_balls.hpp"
#include "sobext/space.hpp"
#include "sobext/whitney.hpp"

namespace sobext {

/// Everything the extension operators read; all members must outlive it.
struct ExtensionContext {
  const MetricMeasureSpace& space;
  const RegularSubset& s;
  const WhitneyCover& cover;
  const QuasiBallFamily& family;
  const Partition& partition;
};

struct ExtensionBundle {
  ScalarField u;
  std::optional<ScalarField> g;
  ScalarField u_tilde;
  std::optional<ScalarField> g_tilde;
  std::vector<double> averages;  // u_{H_B}, 0 for empty H_B
};

/// f_{H_B} for every ball (0 when H_B is empty).
std::vector<double> quasi_averages(const MetricMeasureSpace& space, const QuasiBallFamily& family,
                                   const ScalarField& f);

/// u on S, sum_B u_{H_B} phi_B(x) off S (ball-index order).
ScalarField extend_function(const ExtensionContext& ctx, const ScalarField& u);

/// g on S, sum_B (g_{H_B} + |u_{H_B}|) 1[x in B*] off S.
ScalarField extend_gradient(const ExtensionContext& ctx, const ScalarField& u, const ScalarField& g);

/// f on S, sum_B |f_{H_B}| 1[x in B*] off S.
ScalarField extend_abs_average(const ExtensionContext& ctx, const ScalarField& f);

/// f on its domain, 0 on the rest of X.
ScalarField zero_extend(const ScalarField& f);

/// g(x) = max_{y != x} |u(x) - u(y)| / (2 d(x, y)) over the domain of u.
ScalarField canonical_gradient(const MetricMeasureSpace& space, const ScalarField& u);

ExtensionBundle make_bundle(const ExtensionContext& ctx, const ScalarField& u,
                            std::optional<ScalarField> g = std::nullopt);

}  // namespace sobext
