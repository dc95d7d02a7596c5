#include "sobext/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sobext/parallel.hpp"

namespace sobext {

// --- RatioTracker -------------------------------------------------------------

double RatioTracker::ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  if (lhs > kZero) return kInfinity;
  return 0.0;
}

void RatioTracker::observe(double lhs, double rhs, Witness where) {
  observe_lazy(lhs, rhs, [&] { return std::move(where); });
}

void RatioTracker::merge(const RatioTracker& other) {
  instances_ += other.instances_;
  if (other.best_ > best_) {
    best_ = other.best_;
    witness_ = other.witness_;
  }
}

AuditReport RatioTracker::report(std::string name, std::optional<double> ceiling, std::string note) const {
  AuditReport r;
  r.name = std::move(name);
  r.observed_constant = best_;
  r.ceiling = ceiling;
  r.pass = ceiling ? best_ <= *ceiling : std::isfinite(best_);
  r.witness = witness_;
  r.instances = instances_;
  r.note = std::move(note);
  return r;
}

double refinement_ratio(double coarse, double fine) {
  if (coarse == 0.0 && fine == 0.0) return 1.0;
  if (coarse == 0.0) return kInfinity;
  return fine / coarse;
}

void sort_reports(std::vector<AuditReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const AuditReport& a, const AuditReport& b) { return a.name < b.name; });
}

namespace {

Witness at_points(std::vector<PointId> pts, std::optional<double> radius = std::nullopt,
                  std::optional<std::size_t> ball = std::nullopt) {
  Witness w;
  w.points = std::move(pts);
  w.radius = radius;
  w.ball = ball;
  return w;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Mean oscillation r^-alpha / mu(K) * sum_K |f - f_K| w over the open ball K.
double ball_oscillation(const MetricMeasureSpace& space, const std::vector<double>& f, PointId z, double r,
                        double alpha) {
  const std::size_t n = space.size();
  double mu = 0.0;
  double fw = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto p = static_cast<PointId>(j);
    if (space.distance(z, p) < r) {
      mu += space.weight(p);
      fw += f[j] * space.weight(p);
    }
  }
  if (!(mu > 0.0)) return 0.0;
  const double mean = fw / mu;
  double dev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto p = static_cast<PointId>(j);
    if (space.distance(z, p) < r) dev += std::abs(f[j] - mean) * space.weight(p);
  }
  return std::pow(r, -alpha) * dev / mu;
}

std::vector<double> dense_values(const ScalarField& f) {
  std::vector<double> out(f.point_count(), 0.0);
  for (PointId x : f.domain()) out[x] = f.at(x);
  return out;
}

}  // namespace

// --- maximal fields -----------------------------------------------------------

MaximalFields compute_maximal_fields(const ExtensionContext& ctx, const ExtensionBundle& bundle, double alpha_order) {
  MaximalFields mf;
  mf.alpha_order = alpha_order;
  mf.u_sharp_s = sharp_maximal(ctx.space, ctx.s.ids, bundle.u, alpha_order);
  mf.u_tilde_sharp = sharp_maximal(ctx.space, all_points(ctx.space), bundle.u_tilde, alpha_order);
  mf.m_u_hat = hl_maximal(ctx.space, zero_extend(bundle.u));
  mf.m_sharp_hat = hl_maximal(ctx.space, zero_extend(mf.u_sharp_s));
  return mf;
}

// --- structural ---------------------------------------------------------------

std::vector<AuditReport> cover_audits(const CoverReport& rep) {
  AuditReport cov;
  cov.name = "whitney_cover";
  cov.observed_constant = rep.multiplicity;
  cov.ceiling = rep.multiplicity_bound;
  cov.pass = rep.coverage && rep.sandwich && rep.multiplicity <= rep.multiplicity_bound;
  std::string note = "star multiplicity " + std::to_string(rep.star_multiplicity);
  if (rep.uncovered) {
    cov.witness = at_points({*rep.uncovered});
    note += "; uncovered point " + std::to_string(*rep.uncovered);
  }
  if (!rep.sandwich_violations.empty()) {
    Witness w;
    w.ball = rep.sandwich_violations.front();
    if (!cov.witness) cov.witness = w;
    note += "; distance bound fails for " + std::to_string(rep.sandwich_violations.size()) + " ball(s), first " +
            std::to_string(rep.sandwich_violations.front());
  }
  cov.note = note;

  AuditReport cmp;
  cmp.name = "whitney_comparability";
  cmp.observed_constant = rep.comparability;
  cmp.ceiling = rep.comparability_ceiling;
  cmp.pass = rep.comparability <= rep.comparability_ceiling;
  cmp.note = "anchor " + format_number(rep.anchor_constant) + ", neighbor " + format_number(rep.neighbor_constant) +
             ", star distance " + format_number(rep.star_distance_constant) + ", anchor measure ratio " +
             format_number(rep.anchor_measure_ratio);
  return {cov, cmp};
}

std::vector<AuditReport> family_audits(const FamilyReport& rep) {
  std::string note;
  if (!rep.violating_balls.empty()) note += "violating balls: " + std::to_string(rep.violating_balls.size()) + "; ";
  if (!rep.gate_violations.empty()) note += "radius gate violations: " + std::to_string(rep.gate_violations.size()) + "; ";
  if (rep.mismatch) note += "set differs from rebuild at ball " + std::to_string(*rep.mismatch) + "; ";
  if (rep.gamma3 != rep.recorded_gamma3) {
    note += "overlap " + std::to_string(rep.gamma3) + " exceeds recorded " + std::to_string(rep.recorded_gamma3) + "; ";
  }

  auto make = [&](std::string name, double value) {
    AuditReport r;
    r.name = std::move(name);
    r.observed_constant = value;
    r.pass = rep.pass && std::isfinite(value);
    r.note = note;
    return r;
  };
  AuditReport g1 = make("quasi_ball_containment", rep.gamma1);
  AuditReport g2 = make("quasi_ball_measure", rep.gamma2);
  g2.note += "reverse ratio " + format_number(rep.gamma2_forward);
  AuditReport g3 = make("quasi_ball_overlap", rep.gamma3);
  if (!rep.violating_balls.empty()) {
    Witness w;
    w.ball = rep.violating_balls.front();
    g1.witness = w;
  }
  if (!rep.gate_violations.empty()) {
    const auto& gv = rep.gate_violations.front();
    Witness w = at_points({gv.shared});
    w.ball = gv.ball_a;
    g3.witness = w;
  } else if (rep.densest_point) {
    g3.witness = at_points({*rep.densest_point});
  }
  return {g1, g2, g3};
}

std::vector<AuditReport> partition_audits(const PartitionReport& rep, double sum_tolerance) {
  AuditReport sum;
  sum.name = "partition_sum";
  sum.observed_constant = rep.max_sum_deviation;
  sum.ceiling = sum_tolerance;
  sum.pass = rep.max_sum_deviation <= sum_tolerance && rep.support_violations.empty() && rep.range_violations.empty();
  if (rep.worst_point) sum.witness = at_points({*rep.worst_point});
  if (!rep.support_violations.empty()) {
    const auto& v = rep.support_violations.front();
    sum.note = "support violations: " + std::to_string(rep.support_violations.size());
    if (!sum.witness) sum.witness = at_points({v.point}, std::nullopt, v.ball);
  }
  if (!rep.range_violations.empty()) {
    sum.note += (sum.note.empty() ? "" : "; ") + std::string("range violations: ") +
                std::to_string(rep.range_violations.size());
  }

  AuditReport lip;
  lip.name = "partition_lipschitz";
  lip.observed_constant = rep.lipschitz_constant;
  lip.pass = std::isfinite(rep.lipschitz_constant);
  lip.witness = at_points({rep.lipschitz_witness.x, rep.lipschitz_witness.y}, std::nullopt, rep.lipschitz_witness.ball);
  return {sum, lip};
}

// --- gradient inequality --------------------------------------------------------

AuditReport audit_gradient_inequality(const MetricMeasureSpace& space, const ExtensionBundle& bundle) {
  if (!bundle.g_tilde) throw Error("gradient audit needs an extended gradient");
  const std::size_t n = space.size();
  const std::vector<double> u = dense_values(bundle.u_tilde);
  const std::vector<double> g = dense_values(*bundle.g_tilde);
  const unsigned workers = std::max(1u, std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<RatioTracker> local(workers);
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    RatioTracker& t = local[chunk == 0 ? 0 : begin / chunk];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double lhs = std::abs(u[i] - u[j]);
        const double rhs = space.distance(static_cast<PointId>(i), static_cast<PointId>(j)) * (g[i] + g[j]);
        t.observe_lazy(lhs, rhs, [&] { return at_points({static_cast<PointId>(i), static_cast<PointId>(j)}); });
      }
    }
  });
  RatioTracker all;
  for (const auto& t : local) all.merge(t);
  return all.report("gradient_inequality", std::nullopt);
}

// --- oscillation over subsets -----------------------------------------------------

std::vector<SubsetPair> family_pairs(const WhitneyCover& cover, const QuasiBallFamily& family) {
  std::vector<SubsetPair> out;
  for (std::size_t b = 0; b < family.size(); ++b) {
    if (family.sets[b].empty()) continue;
    for (std::size_t k : cover.neighbors[b]) {
      if (k < b || family.sets[k].empty()) continue;
      out.push_back({family.sets[b], family.sets[k]});
    }
  }
  return out;
}

std::vector<SubsetPoint> family_points(const RegularSubset& s, const QuasiBallFamily& family) {
  std::vector<SubsetPoint> out;
  for (const auto& h : family.sets) {
    if (h.empty()) continue;
    for (PointId y : s.ids) out.push_back({h, y});
  }
  return out;
}

std::vector<AuditReport> audit_oscillation_lemma(const MetricMeasureSpace& space, const ScalarField& u,
                                                 const ScalarField& g, const std::vector<SubsetPair>& pairs,
                                                 const std::vector<SubsetPoint>& points) {
  constexpr double kCeiling = 1.0 + 1e-12;
  auto check = [&](const PointSet& h) {
    if (!(space.measure(h) > 0.0)) throw Error("oscillation audit: subset of zero measure");
  };
  auto cross = [&](const PointSet& a, const PointSet& b) {
    double d = 0.0;
    for (PointId x : a)
      for (PointId y : b) d = std::max(d, space.distance(x, y));
    return d;
  };

  RatioTracker pair_t;
  for (const auto& pr : pairs) {
    check(pr.first);
    check(pr.second);
    const double lhs = std::abs(average(space, u, pr.first) - average(space, u, pr.second));
    const double diam = std::max({set_diameter(space, pr.first), set_diameter(space, pr.second),
                                  cross(pr.first, pr.second)});
    const double rhs = diam * (average(space, g, pr.first) + average(space, g, pr.second));
    pair_t.observe_lazy(lhs, rhs, [&] {
      std::vector<PointId> pts(pr.first.begin(), pr.first.end());
      pts.insert(pts.end(), pr.second.begin(), pr.second.end());
      return at_points(std::move(pts));
    });
  }

  RatioTracker point_t;
  const PointSet* last = nullptr;
  double last_diam = 0.0;
  double last_u = 0.0;
  double last_g = 0.0;
  for (const auto& sp : points) {
    if (last == nullptr || *last != sp.set) {
      check(sp.set);
      last = &sp.set;
      last_diam = set_diameter(space, sp.set);
      last_u = average(space, u, sp.set);
      last_g = average(space, g, sp.set);
    }
    double diam = last_diam;
    for (PointId x : sp.set) diam = std::max(diam, space.distance(x, sp.point));
    const double lhs = std::abs(last_u - u.at(sp.point));
    const double rhs = diam * (last_g + g.at(sp.point));
    point_t.observe_lazy(lhs, rhs, [&] {
      std::vector<PointId> pts(sp.set.begin(), sp.set.end());
      pts.push_back(sp.point);
      return at_points(std::move(pts));
    });
  }
  return {pair_t.report("oscillation_pairs", kCeiling), point_t.report("oscillation_points", kCeiling)};
}

// --- L^p bounds ------------------------------------------------------------------

std::vector<AuditReport> audit_lp_bounds(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                         const std::vector<ScalarField>& f_samples, double p) {
  if (!(p > 1.0)) throw Error("p > 1 required");
  const std::string note = "p = " + format_number(p);
  const double u_norm = lp_norm(ctx.space, bundle.u, p);

  RatioTracker ext;
  ext.observe(lp_norm(ctx.space, bundle.u_tilde, p), u_norm, {});

  RatioTracker avg;
  std::vector<const ScalarField*> fs{&bundle.u};
  for (const auto& f : f_samples) fs.push_back(&f);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const ScalarField big_f = extend_abs_average(ctx, *fs[i]);
    Witness w;
    w.ball = i;  // sample index (0 is u itself)
    avg.observe(lp_norm(ctx.space, big_f, p), lp_norm(ctx.space, *fs[i], p), std::move(w));
  }
  std::vector<AuditReport> out{ext.report("lp_extension", std::nullopt, note),
                               avg.report("lp_abs_average", std::nullopt, note)};
  if (bundle.g && bundle.g_tilde) {
    RatioTracker grad;
    grad.observe(lp_norm(ctx.space, *bundle.g_tilde, p), lp_norm(ctx.space, *bundle.g, p) + u_norm, {});
    out.push_back(grad.report("lp_gradient", std::nullopt, note));
  }
  return out;
}

// --- sharp-function bounds -----------------------------------------------------------

std::vector<AuditReport> audit_sharp_bounds(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                            const MaximalFields& f) {
  const std::size_t n = ctx.space.size();
  const std::string note = "alpha = " + format_number(f.alpha_order);
  RatioTracker on_s;
  for (PointId z : ctx.s.ids) {
    on_s.observe_lazy(f.u_tilde_sharp.at(z), f.u_sharp_s.at(z) + f.m_u_hat.at(z), [&] { return at_points({z}); });
  }
  RatioTracker everywhere;
  RatioTracker pointwise;
  for (std::size_t j = 0; j < n; ++j) {
    const auto z = static_cast<PointId>(j);
    everywhere.observe_lazy(f.u_tilde_sharp.at(z), f.m_sharp_hat.at(z) + f.m_u_hat.at(z),
                            [&] { return at_points({z}); });
    pointwise.observe_lazy(std::abs(bundle.u_tilde.at(z)), f.m_u_hat.at(z), [&] { return at_points({z}); });
  }
  return {on_s.report("sharp_on_subset", std::nullopt, note),
          everywhere.report("sharp_everywhere", std::nullopt, note),
          pointwise.report("pointwise_extension", std::nullopt)};
}

AuditReport audit_maximal_lp(const MetricMeasureSpace& space, const ExtensionBundle& bundle,
                             const MaximalFields& fields, double p) {
  RatioTracker t;
  t.observe(lp_norm(space, fields.m_u_hat, p), lp_norm(space, bundle.u, p), {});
  return t.report("maximal_lp", std::nullopt, "p = " + format_number(p));
}

// --- ball lemmas ------------------------------------------------------------------------

std::vector<Ball> sample_balls(const MetricMeasureSpace& space, const PointSet& pool, std::size_t centers,
                               std::size_t radii) {
  std::vector<Ball> out;
  if (pool.empty() || centers == 0 || radii == 0 || space.size() < 2) return out;
  const std::size_t count = std::min(centers, pool.size());
  const double lo = space.min_positive_distance();
  const double hi = space.diameter();
  for (std::size_t c = 0; c < count; ++c) {
    const PointId z = pool[c * pool.size() / count];
    for (std::size_t k = 0; k < radii; ++k) {
      const double t = radii == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(radii - 1);
      // slightly off the lattice of distances so that ball boundaries avoid atoms
      out.push_back({z, lo * std::pow(hi / lo, t) * 1.0009765625});
    }
  }
  return out;
}

std::vector<AuditReport> audit_ball_lemmas(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                           const MaximalFields& fields, const std::vector<Ball>& s_samples,
                                           const std::vector<Ball>& off_samples, BallLemmaConstants* constants) {
  const auto& space = ctx.space;
  const auto& cover = ctx.cover;
  const auto& family = ctx.family;
  const std::size_t n = space.size();
  const std::size_t nb = cover.size();
  const double alpha = fields.alpha_order;
  const double delta = family.delta;
  const std::vector<double> ut = dense_values(bundle.u_tilde);
  const std::vector<double> u = dense_values(bundle.u);
  const std::vector<double>& avg = bundle.averages;

  std::vector<double> ball_mu(nb);
  for (std::size_t b = 0; b < nb; ++b) ball_mu[b] = space.measure(cover.members[b]);

  auto members = [&](PointId z, double r) {
    PointSet k;
    for (std::size_t j = 0; j < n; ++j) {
      if (space.distance(z, static_cast<PointId>(j)) < r) k.push_back(static_cast<PointId>(j));
    }
    return k;
  };
  auto touching = [&](const PointSet& k) {  // B with B* meeting K
    std::vector<std::size_t> out;
    for (PointId p : k) out.insert(out.end(), cover.stars_at[p].begin(), cover.stars_at[p].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };

  for (const Ball& k : s_samples) {
    if (!ctx.s.contains(k.center)) throw Error("ball sample centered off S where S is required");
  }

  // radius bound first: eta1 feeds every other lemma
  RatioTracker radius_t;
  for (const Ball& k : s_samples) {
    const auto bk = touching(members(k.center, k.radius));
    for (std::size_t b : bk) {
      radius_t.observe_lazy(cover.balls[b].ball.radius, k.radius,
                            [&] { return at_points({k.center}, k.radius, b); });
    }
  }
  const double eta1 = radius_t.constant() > 0.0 && std::isfinite(radius_t.constant()) ? radius_t.constant() : 1.0;
  const double eta2 = 1.0 + (family.gamma1 + 9.0 / 8.0) * eta1;
  const double eta3 = 8.0 * (family.gamma1 + 10.0);
  if (constants) *constants = {eta1, eta2, eta3};
  const double threshold = delta / eta1;

  RatioTracker sum_t;
  RatioTracker quasi_t;
  RatioTracker small_t;
  RatioTracker large_t;
  for (const Ball& k : s_samples) {
    const PointSet km = members(k.center, k.radius);
    const auto bk = touching(km);
    PointSet d;
    for (std::size_t j = 0; j < n; ++j) {
      const auto p = static_cast<PointId>(j);
      if (ctx.s.contains(p) && space.distance(k.center, p) < eta2 * k.radius) d.push_back(p);
    }
    const double u_d = average(space, bundle.u, d);
    for (double c : {u_d, 0.0}) {
      double off = 0.0;
      for (PointId p : km) {
        if (!ctx.s.contains(p)) off += std::abs(ut[p] - c) * space.weight(p);
      }
      double over_all = 0.0;
      double over_small = 0.0;
      for (std::size_t b : bk) {
        const double term = ball_mu[b] * std::abs(avg[b] - c);
        over_all += term;
        if (cover.balls[b].ball.radius <= delta) over_small += term;
      }
      double on_d = 0.0;
      for (PointId p : d) on_d += std::abs(u[p] - c) * space.weight(p);
      sum_t.observe_lazy(off, over_all, [&] { return at_points({k.center}, k.radius); });
      quasi_t.observe_lazy(over_small, on_d, [&] { return at_points({k.center}, k.radius); });
    }
    const double osc = ball_oscillation(space, ut, k.center, k.radius, alpha);
    if (k.radius <= threshold) {
      small_t.observe_lazy(osc, fields.u_sharp_s.at(k.center), [&] { return at_points({k.center}, k.radius); });
    } else {
      large_t.observe_lazy(osc, fields.m_u_hat.at(k.center), [&] { return at_points({k.center}, k.radius); });
    }
  }

  // Whitney-ball bounds at centers off S
  std::vector<double> inf_sharp(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& h = family.sets[b];
    if (h.empty()) continue;
    double m = std::numeric_limits<double>::infinity();
    for (PointId p : h) m = std::min(m, fields.u_sharp_s.at(p));
    inf_sharp[b] = m;
  }
  RatioTracker wsmall_t;
  RatioTracker wlarge_t;
  for (const Ball& k : off_samples) {
    if (ctx.s.contains(k.center)) throw Error("ball sample centered in S where X \\ S is required");
    const double osc = ball_oscillation(space, ut, k.center, k.radius, alpha);
    for (std::size_t q : cover.balls_at[k.center]) {
      const double rhs = inf_sharp[q] + fields.m_u_hat.at(k.center);
      auto& t = k.radius <= cover.balls[q].ball.radius / 8.0 ? wsmall_t : wlarge_t;
      t.observe_lazy(osc, rhs, [&] { return at_points({k.center}, k.radius, q); });
    }
  }

  const std::string eta_note = "eta1 = " + format_number(eta1) + ", eta2 = " + format_number(eta2) +
                               ", eta3 = " + format_number(eta3) + ", alpha = " + format_number(alpha);
  return {radius_t.report("ball_radius_bound", std::nullopt, eta_note),
          sum_t.report("ball_sum_bound", std::nullopt, "c = mean over D and c = 0"),
          quasi_t.report("ball_quasi_sum_bound", std::nullopt, eta_note),
          small_t.report("small_ball_oscillation", std::nullopt, eta_note),
          large_t.report("large_ball_oscillation", std::nullopt, eta_note),
          wsmall_t.report("whitney_small_ball", std::nullopt, eta_note),
          wlarge_t.report("whitney_large_ball", std::nullopt, eta_note)};
}

// --- trace norms ------------------------------------------------------------------------

AuditReport audit_restriction_bound(const PointSet& s, const ScalarField& u_sharp_s, const ScalarField& big_u_sharp,
                                    std::string name) {
  RatioTracker t;
  for (PointId x : s) t.observe_lazy(u_sharp_s.at(x), big_u_sharp.at(x), [&] { return at_points({x}); });
  return t.report(std::move(name), 2.0 + 1e-12);
}

std::vector<AuditReport> audit_trace_equivalence(const ExtensionContext& ctx, const ExtensionBundle& bundle,
                                                 const MaximalFields& fields, const NormParams& params,
                                                 double gradient_constant) {
  params.validate();
  const auto& space = ctx.space;
  const double p = params.p;
  const double trace = lp_norm(space, bundle.u, p) + lp_norm(space, fields.u_sharp_s, p);
  const double calderon = lp_norm(space, bundle.u_tilde, p) + lp_norm(space, fields.u_tilde_sharp, p);
  const std::string note = "p = " + format_number(p) + ", alpha = " + format_number(params.alpha_order) +
                           "; quotient norm bounded by the constructed extension only";

  RatioTracker lower;
  lower.observe(trace, calderon, {});
  RatioTracker upper;
  upper.observe(calderon, trace, {});
  std::vector<AuditReport> out{lower.report("trace_lower", 2.0 + 1e-12, note),
                               upper.report("trace_upper", std::nullopt, note)};

  if (bundle.g && bundle.g_tilde) {
    AuditReport h;
    h.name = "hajlasz_trace";
    if (!std::isfinite(gradient_constant)) {
      h.observed_constant = kInfinity;
      h.pass = false;
      h.note = "gradient inequality constant is infinite";
    } else {
      std::vector<double> scaled(space.size());
      for (std::size_t j = 0; j < space.size(); ++j) {
        scaled[j] = gradient_constant * bundle.g_tilde->at(static_cast<PointId>(j));
      }
      const ScalarField cg(space.size(), bundle.g_tilde->domain(), std::move(scaled));
      RatioTracker t;
      t.observe(hajlasz_norm_with_witness(space, bundle.u_tilde, cg, p),
                hajlasz_norm_with_witness(space, bundle.u, *bundle.g, p), {});
      h = t.report("hajlasz_trace", std::nullopt,
                   "p = " + format_number(p) + ", gradient scaled by " + format_number(gradient_constant));
    }
    out.push_back(h);
  }
  return out;
}

}  // namespace sobext
