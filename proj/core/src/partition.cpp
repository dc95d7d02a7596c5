#include "sobext/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sobext/parallel.hpp"

namespace sobext {

double Partition::phi(std::size_t ball, PointId x) const {
  if (x >= entries.size()) return 0.0;
  for (const auto& e : entries[x]) {
    if (e.ball == ball) return e.value;
  }
  return 0.0;
}

Partition build_partition(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover) {
  const std::size_t n = space.size();
  Partition part;
  part.entries.assign(n, {});
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto x = static_cast<PointId>(j);
      if (s.contains(x)) continue;
      auto& row = part.entries[j];
      double total = 0.0;
      for (std::size_t b : cover.stars_at[j]) {
        const auto& ball = cover.balls[b].ball;
        const double psi = std::clamp((9.0 / 8.0 * ball.radius - space.distance(x, ball.center)) / (ball.radius / 8.0),
                                      0.0, 1.0);
        if (psi > 0.0) {
          row.push_back({b, psi});
          total += psi;
        }
      }
      if (!(total > 0.0)) throw Error("partition of unity: point " + std::to_string(j) + " is not covered");
      for (auto& e : row) e.value /= total;
    }
  });
  part.lipschitz_constant = partition_lipschitz(space, s, cover, part);
  return part;
}

double partition_lipschitz(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                           const Partition& partition, LipschitzWitness* witness) {
  const PointSet outside = complement(space, s);
  const std::size_t m = outside.size();
  struct Best {
    double value = 0.0;
    LipschitzWitness at;
  };
  const unsigned workers = std::max(1u, thread_count());
  std::vector<Best> best(workers);
  const std::size_t chunk = (m + workers - 1) / std::max<std::size_t>(workers, 1);
  parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    Best& local = best[chunk == 0 ? 0 : begin / chunk];
    for (std::size_t a = begin; a < end; ++a) {
      const PointId x = outside[a];
      const auto& ex = partition.entries[x];
      for (std::size_t c = a + 1; c < m; ++c) {
        const PointId y = outside[c];
        const auto& ey = partition.entries[y];
        const double d = space.distance(x, y);
        // merge of two ball-sorted lists
        std::size_t i = 0;
        std::size_t k = 0;
        while (i < ex.size() || k < ey.size()) {
          std::size_t ball;
          double fx = 0.0;
          double fy = 0.0;
          if (k == ey.size() || (i < ex.size() && ex[i].ball < ey[k].ball)) {
            ball = ex[i].ball;
            fx = ex[i++].value;
          } else if (i == ex.size() || ey[k].ball < ex[i].ball) {
            ball = ey[k].ball;
            fy = ey[k++].value;
          } else {
            ball = ex[i].ball;
            fx = ex[i++].value;
            fy = ey[k++].value;
          }
          const double ratio = std::abs(fx - fy) * cover.balls[ball].ball.radius / d;
          if (ratio > local.value) local = {ratio, {x, y, ball}};
        }
      }
    }
  });
  Best overall;
  for (const auto& b : best) {
    if (b.value > overall.value) overall = b;
  }
  if (witness) *witness = overall.at;
  return overall.value;
}

PartitionReport verify_partition(const MetricMeasureSpace& space, const RegularSubset& s, const WhitneyCover& cover,
                                 const Partition& partition, double sum_tolerance) {
  PartitionReport rep;
  const std::size_t n = space.size();
  if (partition.entries.size() != n) throw Error("partition does not match the space");
  for (std::size_t j = 0; j < n; ++j) {
    const auto x = static_cast<PointId>(j);
    const auto& row = partition.entries[j];
    if (s.contains(x)) {
      for (const auto& e : row) {
        if (e.value != 0.0) rep.support_violations.push_back({e.ball, x, e.value});
      }
      continue;
    }
    double total = 0.0;
    for (const auto& e : row) {
      total += e.value;
      if (e.ball >= cover.size()) throw Error("partition references a missing ball");
      const auto& wb = cover.balls[e.ball];
      if (e.value != 0.0 && !(space.distance(x, wb.ball.center) < wb.star_radius)) {
        rep.support_violations.push_back({e.ball, x, e.value});
      }
      if (!(e.value >= 0.0 && e.value <= 1.0)) rep.range_violations.push_back({e.ball, x, e.value});
    }
    const double dev = std::abs(total - 1.0);
    if (dev > rep.max_sum_deviation) {
      rep.max_sum_deviation = dev;
      rep.worst_point = x;
    }
  }
  rep.lipschitz_constant = partition_lipschitz(space, s, cover, partition, &rep.lipschitz_witness);
  rep.pass = rep.max_sum_deviation <= sum_tolerance && rep.support_violations.empty() &&
             rep.range_violations.empty() && std::isfinite(rep.lipschitz_constant);
  return rep;
}

}  // namespace sobext
