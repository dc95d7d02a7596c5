#include "sobext/quasi_balls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sobext/parallel.hpp"

namespace sobext {

namespace {

constexpr double kEpsilonFloor = 0x1p-20;

PointSet members_within(const MetricMeasureSpace& space, PointId center, double radius) {
  PointSet out;
  if (!(radius > 0.0)) return out;
  const std::size_t n = space.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (space.distance(center, static_cast<PointId>(j)) < radius) out.push_back(static_cast<PointId>(j));
  }
  return out;
}

}  // namespace

QuasiBallFamily build_quasi_balls(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                                  double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("epsilon must lie in (0, 1]");
  if (!(delta >= 0.0)) throw Error("delta must be nonnegative");
  const std::size_t nb = cover.size();
  const std::size_t n = space.size();

  QuasiBallFamily fam;
  fam.epsilon = epsilon;
  fam.delta = delta;
  fam.sets.assign(nb, {});
  fam.core_measure.assign(nb, 0.0);

  // K_eps members and, per point, the balls whose K_eps contains it.
  std::vector<PointSet> eps_members(nb);
  parallel_chunks(nb, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto& wb = cover.balls[k];
      eps_members[k] = members_within(space, wb.anchor, epsilon * wb.ball.radius);
    }
  });
  std::vector<std::vector<std::size_t>> eps_at(n);
  for (std::size_t k = 0; k < nb; ++k) {
    for (PointId p : eps_members[k]) eps_at[p].push_back(k);
  }

  parallel_chunks(nb, [&](std::size_t begin, std::size_t end) {
    std::vector<char> carving(nb, 0);
    std::vector<std::size_t> marked;
    for (std::size_t b = begin; b < end; ++b) {
      const double rb = cover.balls[b].ball.radius;
      if (!(rb <= delta)) continue;
      const double gate = epsilon * rb;
      for (PointId p : eps_members[b]) {
        for (std::size_t k : eps_at[p]) {
          if (k != b && !carving[k] && cover.balls[k].ball.radius <= gate) {
            carving[k] = 1;
            marked.push_back(k);
          }
        }
      }
      double core = 0.0;
      PointSet h;
      for (PointId p : eps_members[b]) {
        if (!s.contains(p)) continue;
        core += space.weight(p);
        bool carved = false;
        for (std::size_t k : eps_at[p]) {
          if (carving[k]) {
            carved = true;
            break;
          }
        }
        if (!carved) h.push_back(p);
      }
      fam.sets[b] = std::move(h);
      fam.core_measure[b] = core;
      for (std::size_t k : marked) carving[k] = 0;
      marked.clear();
    }
  });
  measure_family(space, s, cover, fam);
  return fam;
}

QuasiBallFamily family_from_sets(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                                 double epsilon, double delta, std::vector<PointSet> sets) {
  if (sets.size() != cover.size()) throw Error("quasi-ball sets do not match the cover");
  QuasiBallFamily fam;
  fam.epsilon = epsilon;
  fam.delta = delta;
  fam.sets = std::move(sets);
  fam.core_measure.assign(cover.size(), 0.0);
  for (std::size_t b = 0; b < cover.size(); ++b) {
    const auto& wb = cover.balls[b];
    if (!(wb.ball.radius <= delta)) continue;
    for (PointId p : members_within(space, wb.anchor, epsilon * wb.ball.radius)) {
      if (s.contains(p)) fam.core_measure[b] += space.weight(p);
    }
  }
  measure_family(space, s, cover, fam);
  return fam;
}

void measure_family(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                    QuasiBallFamily& fam) {
  (void)s;
  fam.gamma1 = 0.0;
  fam.gamma2 = 0.0;
  fam.gamma2_forward = 0.0;
  fam.gamma3 = 0;
  fam.empty_small.clear();
  std::vector<int> count(space.size(), 0);
  for (std::size_t b = 0; b < fam.sets.size(); ++b) {
    const auto& wb = cover.balls[b];
    const PointSet& h = fam.sets[b];
    for (PointId p : h) {
      ++count[p];
      fam.gamma1 = std::max(fam.gamma1, space.distance(p, wb.ball.center) / wb.ball.radius);
    }
    if (!(wb.ball.radius <= fam.delta)) continue;
    const double mu_h = space.measure(h);
    if (h.empty() || !(mu_h > 0.0)) {
      fam.empty_small.push_back(b);
      fam.gamma2 = std::numeric_limits<double>::infinity();
      continue;
    }
    const double mu_b = space.measure(cover.members[b]);
    fam.gamma2 = std::max(fam.gamma2, mu_b / mu_h);
    fam.gamma2_forward = std::max(fam.gamma2_forward, mu_h / mu_b);
  }
  for (int c : count) fam.gamma3 = std::max(fam.gamma3, c);
}

bool family_is_balanced(const MetricMeasureSpace& space, const QuasiBallFamily& family) {
  if (!family.empty_small.empty()) return false;
  for (std::size_t b = 0; b < family.sets.size(); ++b) {
    if (family.core_measure[b] > 0.0 && !(space.measure(family.sets[b]) >= 0.5 * family.core_measure[b])) {
      return false;
    }
  }
  return true;
}

EpsilonChoice tune_epsilon(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                           double delta) {
  for (double eps = 0.5; eps >= kEpsilonFloor; eps *= 0.5) {
    QuasiBallFamily fam = build_quasi_balls(space, s, cover, eps, delta);
    if (family_is_balanced(space, fam)) return {eps, std::move(fam)};
  }
  throw Error("epsilon tuning failed; set is likely not regular at scale delta");
}

FamilyReport verify_family(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                           const QuasiBallFamily& family) {
  FamilyReport rep;
  rep.recorded_gamma3 = family.gamma3;
  const std::size_t nb = cover.size();
  if (family.sets.size() != nb) throw Error("family does not match the cover");

  QuasiBallFamily fresh_stats = family;
  measure_family(space, s, cover, fresh_stats);
  rep.gamma1 = fresh_stats.gamma1;
  rep.gamma2 = fresh_stats.gamma2;
  rep.gamma2_forward = fresh_stats.gamma2_forward;
  rep.gamma3 = fresh_stats.gamma3;

  const double eps = family.epsilon;
  std::vector<std::vector<std::size_t>> holders(space.size());
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& wb = cover.balls[b];
    const bool small = wb.ball.radius <= family.delta;
    const PointSet& h = family.sets[b];
    bool bad = small ? h.empty() : !h.empty();
    for (PointId p : h) {
      holders[p].push_back(b);
      if (!s.contains(p) || !(space.distance(p, wb.anchor) < eps * wb.ball.radius)) bad = true;
    }
    if (bad) rep.violating_balls.push_back(b);
  }

  std::size_t densest = 0;
  for (std::size_t p = 0; p < holders.size(); ++p) {
    const auto& hs = holders[p];
    if (hs.size() > densest) {
      densest = hs.size();
      rep.densest_point = static_cast<PointId>(p);
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (std::size_t j = i + 1; j < hs.size(); ++j) {
        const double ra = cover.balls[hs[i]].ball.radius;
        const double rb = cover.balls[hs[j]].ball.radius;
        if (ra > family.delta || rb > family.delta) continue;
        if (!(eps * rb < ra && eps * ra < rb)) {
          rep.gate_violations.push_back({hs[i], hs[j], static_cast<PointId>(p)});
        }
      }
    }
  }

  const QuasiBallFamily rebuilt = build_quasi_balls(space, s, cover, eps, family.delta);
  for (std::size_t b = 0; b < nb; ++b) {
    if (rebuilt.sets[b] != family.sets[b]) {
      rep.mismatch = b;
      break;
    }
  }

  rep.pass = rep.violating_balls.empty() && rep.gate_violations.empty() && !rep.mismatch &&
             rep.gamma3 == rep.recorded_gamma3 && std::isfinite(rep.gamma1) && std::isfinite(rep.gamma2);
  return rep;
}

}  // namespace sobext
