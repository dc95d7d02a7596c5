#include "sobext/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sobext/parallel.hpp"

namespace sobext {

double WhitneyCover::max_radius() const {
  double r = 0.0;
  for (const auto& b : balls) r = std::max(r, b.ball.radius);
  return r;
}

PointId select_anchor(const MetricMeasureSpace& space, const RegularSubset& s, const Ball& ball) {
  if (s.empty()) throw Error("anchor selection needs a nonempty S");
  PointId best = s.ids.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (PointId y : s.ids) {  // ids ascending, strict < keeps the lowest id on ties
    const double d = space.distance(ball.center, y);
    if (d < best_d) {
      best_d = d;
      best = y;
    }
  }
  return best;
}

WhitneyCover assemble_cover(const MetricMeasureSpace& space, const RegularSubset& s, std::vector<WhitneyBall> balls) {
  const std::size_t n = space.size();
  const std::size_t nb = balls.size();
  WhitneyCover cover;
  cover.balls = std::move(balls);
  cover.members.resize(nb);
  cover.star_members.resize(nb);
  parallel_chunks(nb, [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      const auto& wb = cover.balls[b];
      space.check_id(wb.ball.center);
      space.check_id(wb.anchor);
      for (std::size_t j = 0; j < n; ++j) {
        const double d = space.distance(wb.ball.center, static_cast<PointId>(j));
        if (d < wb.ball.radius) cover.members[b].push_back(static_cast<PointId>(j));
        if (d < wb.star_radius) cover.star_members[b].push_back(static_cast<PointId>(j));
      }
    }
  });
  cover.stars_at.assign(n, {});
  cover.balls_at.assign(n, {});
  for (std::size_t b = 0; b < nb; ++b) {
    for (PointId p : cover.members[b]) cover.balls_at[p].push_back(b);
    for (PointId p : cover.star_members[b]) cover.stars_at[p].push_back(b);
  }
  cover.multiplicity = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!s.contains(static_cast<PointId>(p))) {
      cover.multiplicity = std::max(cover.multiplicity, static_cast<int>(cover.balls_at[p].size()));
    }
  }
  cover.neighbors.assign(nb, {});
  for (std::size_t b = 0; b < nb; ++b) {
    auto& nbrs = cover.neighbors[b];
    for (PointId p : cover.star_members[b]) nbrs.insert(nbrs.end(), cover.stars_at[p].begin(), cover.stars_at[p].end());
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return cover;
}

WhitneyCover build_whitney(const MetricMeasureSpace& space, const RegularSubset& s) {
  if (s.empty()) throw Error("Whitney cover needs a nonempty S");
  const PointSet outside = complement(space, s);
  if (outside.empty()) return assemble_cover(space, s, {});

  const std::vector<double> dist_s = distances_to_set(space, s);
  std::vector<PointId> order = outside;
  std::stable_sort(order.begin(), order.end(),
                   [&](PointId a, PointId b) { return dist_s[a] > dist_s[b]; });

  std::vector<PointId> centers;
  for (PointId x : order) {
    bool far = true;
    for (PointId c : centers) {
      if (!(space.distance(x, c) > dist_s[c] / 8.0)) {  // rho_c / 2 with rho = d / 4
        far = false;
        break;
      }
    }
    if (far) centers.push_back(x);
  }

  auto make_ball = [&](PointId x, double r) {
    WhitneyBall wb;
    wb.ball = {x, r};
    wb.anchor = select_anchor(space, s, wb.ball);
    wb.star_radius = 9.0 / 8.0 * r;
    return wb;
  };

  std::vector<WhitneyBall> balls;
  balls.reserve(centers.size());
  for (PointId c : centers) balls.push_back(make_ball(c, dist_s[c] / 4.0));

  // Coverage check; the greedy rule already covers every point, the fallback
  // keeps the postcondition on arbitrary inputs.
  std::vector<char> covered(space.size(), 0);
  for (const auto& wb : balls) {
    for (PointId y : outside) {
      if (space.distance(wb.ball.center, y) < wb.ball.radius) covered[y] = 1;
    }
  }
  for (PointId y : outside) {
    if (!covered[y]) balls.push_back(make_ball(y, dist_s[y] / 4.0));
  }
  return assemble_cover(space, s, std::move(balls));
}

CoverReport verify_cover(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                         double doubling_constant, double comparability_ceiling) {
  CoverReport rep;
  rep.comparability_ceiling = comparability_ceiling;
  rep.multiplicity_bound = 9.0 * std::pow(doubling_constant, 4);
  const std::size_t n = space.size();
  const std::size_t nb = cover.size();

  // Coverage and multiplicity straight from ball membership.
  std::vector<int> count(n, 0);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& ball = cover.balls[b].ball;
    for (std::size_t j = 0; j < n; ++j) {
      if (space.distance(ball.center, static_cast<PointId>(j)) < ball.radius) ++count[j];
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (s.contains(static_cast<PointId>(j))) continue;
    rep.multiplicity = std::max(rep.multiplicity, count[j]);
    if (count[j] == 0 && rep.coverage) {
      rep.coverage = false;
      rep.uncovered = static_cast<PointId>(j);
    }
  }
  if (nb == 0) {
    rep.pass = rep.coverage;
    return rep;
  }

  const std::vector<double> dist_s = distances_to_set(space, s);
  double anchor_c = 0.0;
  double measure_ratio = 1.0;
  double star_c = 1.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& wb = cover.balls[b];
    const double r = wb.ball.radius;
    const PointId x = wb.ball.center;
    const PointId y = wb.anchor;
    double dist_b = std::numeric_limits<double>::infinity();
    double mu_x = 0.0;
    double mu_y = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto p = static_cast<PointId>(j);
      const double dx = space.distance(x, p);
      const double dy = space.distance(y, p);
      if (dx < r) {
        dist_b = std::min(dist_b, dist_s[j]);
        mu_x += space.weight(p);
        anchor_c = std::max(anchor_c, dy / r);  // B within B(y_B, C r_B)
      }
      if (dy < r) {
        mu_y += space.weight(p);
        anchor_c = std::max(anchor_c, dx / r);  // B(y_B, r_B) within C B
      }
      if (dx < wb.star_radius && !s.contains(p)) {
        const double t = dist_s[j] / r;
        star_c = std::max({star_c, t, 1.0 / t});
      }
    }
    if (mu_x > 0.0 && mu_y > 0.0) measure_ratio = std::max({measure_ratio, mu_x / mu_y, mu_y / mu_x});
    if (!(r <= dist_b && dist_b <= 4.0 * r)) {
      rep.sandwich = false;
      rep.sandwich_violations.push_back(b);
    }
  }

  double neighbor_c = 1.0;
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t k : cover.neighbors[b]) {
      neighbor_c = std::max(neighbor_c, cover.balls[k].ball.radius / cover.balls[b].ball.radius);
    }
    rep.star_multiplicity = std::max(rep.star_multiplicity, static_cast<int>(cover.neighbors[b].size()));
  }

  rep.anchor_constant = anchor_c;
  rep.anchor_measure_ratio = measure_ratio;
  rep.neighbor_constant = neighbor_c;
  rep.star_distance_constant = star_c;
  rep.comparability = std::max({anchor_c, neighbor_c, star_c});
  rep.pass = rep.coverage && rep.sandwich && rep.multiplicity <= rep.multiplicity_bound &&
             rep.comparability <= comparability_ceiling;
  return rep;
}

}  // namespace sobext
