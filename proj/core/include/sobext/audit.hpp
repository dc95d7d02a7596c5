#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sobext/extension.hpp"
#include "sobext/maximal.hpp"
#include "sobext/partition.hpp"
#include "sobext/quasi_balls.hpp"
#include "sobext/whitney.hpp"

namespace sobext {

/// The instance attaining an observed constant.
struct Witness {
  std::vector<PointId> points;
  std::optional<double> radius;
  std::optional<std::size_t> ball;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AuditReport {
  std::string name;
  double observed_constant = 0.0;
  std::optional<double> ceiling;  // no ceiling: pass iff the constant is finite
  bool pass = true;
  std::optional<Witness> witness;
  std::optional<double> refinement_ratio;
  std::size_t instances = 0;
  std::string note;
};

/// Tracks max lhs / rhs. 0/0 counts as a pass and is skipped; lhs > 1e-12 over
/// rhs = 0 makes the constant infinite. Ties keep the first witness.
class RatioTracker {
 public:
  static constexpr double kZero = 1e-12;

  void observe(double lhs, double rhs, Witness where);
  /// Lazy form: the witness is only built when the ratio improves.
  template <class MakeWitness>
  void observe_lazy(double lhs, double rhs, MakeWitness&& make) {
    ++instances_;
    const double r = ratio(lhs, rhs);
    if (r > best_) {
      best_ = r;
      Witness w = make();
      w.lhs = lhs;
      w.rhs = rhs;
      witness_ = std::move(w);
    }
  }
  void merge(const RatioTracker& other);

  double constant() const { return best_; }
  const std::optional<Witness>& witness() const { return witness_; }
  std::size_t instances() const { return instances_; }

  AuditReport report(std::string name, std::optional<double> ceiling, std::string note = {}) const;

  /// lhs / rhs with the conventions above; 0 when both vanish.
  static double ratio(double lhs, double rhs);

 private:
  double best_ = 0.0;
  std::optional<Witness> witness_;
  std::size_t instances_ = 0;
};

/// fine / coarse, with 0/0 = 1.
double refinement_ratio(double coarse, double fine);

/// Maximal functions shared by the sharp-function audits.
struct MaximalFields {
  double alpha_order = 1.0;
  ScalarField u_sharp_s;       // u^#_{alpha,S} on S
  ScalarField u_tilde_sharp;   // (Ext u)^#_alpha on X
  ScalarField m_u_hat;         // M(u^) on X
  ScalarField m_sharp_hat;     // M((u^#_{alpha,S})^) on X
};

MaximalFields compute_maximal_fields(const ExtensionContext& ctx, const ExtensionBundle& bundle, double alpha_order);

// --- structural reports -------------------------------------------------------

std::vector<AuditReport> cover_audits(const CoverReport& rep);
std::vector<AuditReport> family_audits(const FamilyReport& rep);
std::vector<AuditReport> partition_audits(const PartitionReport& rep, double sum_tolerance = 1e-12);

// --- inequality audits --------------------------------------------------------

/// max over x != y of |Eu(x) - Eu(y)| / (d(x, y) (Eg(x) + Eg(y))).
AuditReport audit_gradient_inequality(const MetricMeasureSpace& space, const ExtensionBundle& bundle);

struct SubsetPair {
  PointSet first;
  PointSet second;
};
struct SubsetPoint {
  PointSet set;
  PointId point = 0;
};

/// |u_H - u_H'| <= diam(H u H') (g_H + g_H') over `pairs` and
/// |u_H - u(y)| <= diam(H u {y}) (g_H + g(y)) over `points`; ceiling 1 + 1e-12.
std::vector<AuditReport> audit_oscillation_lemma(const MetricMeasureSpace& space, const ScalarField& u,
                                                 const ScalarField& g, const std::vector<SubsetPair>& pairs,
                                                 const std::vector<SubsetPoint>& points);

/// Pairs of quasi-balls of neighboring Whitney balls (both nonempty).
std::vector<SubsetPair> family_pairs(const WhitneyCover& cover, const QuasiBallFamily& family);
/// Every nonempty quasi-ball against every point of S.
std::vector<SubsetPoint> family_points(const RegularSubset& s, const QuasiBallFamily& family);

/// Norm ratios of Eu, of the averaged extension F over `f_samples` (plus u),
/// and of Eg against ||g|| + ||u||.
std::vector<AuditReport> audit_lp_bounds(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                         const std::vector<ScalarField>& f_samples, double p);

/// Pointwise bounds of (Eu)^# on S and on X, and of |Eu| by M(u^).
std::vector<AuditReport> audit_sharp_bounds(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                            const MaximalFields& fields);

/// ||M u^||_p / ||u^||_p.
AuditReport audit_maximal_lp(const MetricMeasureSpace& space, const ExtensionBundle& bundle,
                             const MaximalFields& fields, double p);

/// Deterministic sample of balls: up to `centers` evenly spaced centers from
/// `pool`, each with `radii` geometric radii between the minimum positive
/// distance and the diameter.
std::vector<Ball> sample_balls(const MetricMeasureSpace& space, const PointSet& pool, std::size_t centers = 64,
                               std::size_t radii = 12);

struct BallLemmaConstants {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
};

/// Ball-family lemmas over sampled balls: radius bound, the two sum bounds, the
/// small/large oscillation bounds at centers in S, and the Whitney-ball bounds
/// at centers off S.
std::vector<AuditReport> audit_ball_lemmas(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                           const MaximalFields& fields, const std::vector<Ball>& s_samples,
                                           const std::vector<Ball>& off_samples,
                                           BallLemmaConstants* constants = nullptr);

/// u^#_{alpha,S} <= 2 U^#_alpha pointwise on S, ceiling 2 + 1e-12. `big_u_sharp`
/// is U^#_alpha on X for some U extending u.
AuditReport audit_restriction_bound(const PointSet& s, const ScalarField& u_sharp_s, const ScalarField& big_u_sharp,
                                    std::string name);

/// Trace-side norm against the Calderon norm of Eu in both directions, and the
/// Hajlasz witness ratio with gradient C * Eg.
std::vector<AuditReport> audit_trace_equivalence(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                                 const MaximalFields& fields, const NormParams& params,
                                                 double gradient_constant);

/// Sorted by name.
void sort_reports(std::vector<AuditReport>& reports);

}  // namespace sobext
