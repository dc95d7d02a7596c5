#include "sobext/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "sobext/detail/fenwick.hpp"
#include "sobext/exact_sum.hpp"
#include "sobext/parallel.hpp"

namespace sobext {

void NormParams::validate() const {
  if (!(p > 1.0)) throw Error("p > 1 required");
  if (!(alpha_order > 0.0) || !std::isfinite(alpha_order)) throw Error("alpha_order must be positive");
}

namespace {

struct Neighbor {
  double dist;
  PointId id;
  bool operator<(const Neighbor& o) const { return dist < o.dist || (dist == o.dist && id < o.id); }
};

void sort_neighbors(const MetricMeasureSpace& space, PointId x, std::vector<double>& dist,
                    std::vector<Neighbor>& order) {
  const std::size_t n = space.size();
  dist.resize(n);
  space.distances_from(x, dist);
  order.resize(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = {dist[j], static_cast<PointId>(j)};
  std::sort(order.begin(), order.end());
}

}  // namespace

ScalarField sharp_maximal(const MetricMeasureSpace& space, const PointSet& a, const ScalarField& f,
                          double alpha_order) {
  const std::size_t n = space.size();
  for (PointId x : a) {
    space.check_id(x);
    if (!f.defined_at(x)) throw Error("sharp maximal function: f undefined at point " + std::to_string(x));
  }
  const std::size_t m = a.size();

  // Value ranks of the A points (by value, then id).
  std::vector<PointId> by_value(a.begin(), a.end());
  std::sort(by_value.begin(), by_value.end(), [&](PointId p, PointId q) {
    const double fp = f.at(p);
    const double fq = f.at(q);
    return fp < fq || (fp == fq && p < q);
  });
  std::vector<double> sorted_vals(m);
  std::vector<std::int64_t> rank(n, -1);
  for (std::size_t k = 0; k < m; ++k) {
    sorted_vals[k] = f.at(by_value[k]);
    rank[by_value[k]] = static_cast<std::int64_t>(k);
  }

  std::vector<double> out(m, 0.0);
  parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    detail::ExactFenwick tree(m);
    std::vector<double> dist;
    std::vector<Neighbor> order;
    ExactSum mu, fsum, wsum, flo, wlo, t, v;
    for (std::size_t i = begin; i < end; ++i) {
      const PointId x = a[i];
      sort_neighbors(space, x, dist, order);
      tree.reset();
      mu.clear();
      fsum.clear();
      wsum.clear();
      double best = 0.0;
      double lo = kInfinity;
      double hi = -kInfinity;
      std::size_t j = 0;
      while (j < n) {
        const double r = order[j].dist;
        for (; j < n && order[j].dist == r; ++j) {
          const PointId y = order[j].id;
          const double w = space.weight(y);
          mu.add(w);
          if (rank[y] >= 0) {
            const double fy = sorted_vals[static_cast<std::size_t>(rank[y])];
            lo = std::min(lo, fy);
            hi = std::max(hi, fy);
            fsum.add_product(fy, w);
            wsum.add(w);
            tree.add_point(static_cast<std::size_t>(rank[y]), fy, w);
          }
        }
        if (!(r > 0.0)) continue;
        // the rounded quotient can leave the value range; constants must give 0
        const double mean = std::clamp(fsum.value() / wsum.value(), lo, hi);
        const auto below = static_cast<std::size_t>(
            std::upper_bound(sorted_vals.begin(), sorted_vals.end(), mean) - sorted_vals.begin());
        flo.clear();
        wlo.clear();
        tree.prefix(below, flo, wlo);
        // sum |f - mean| w = F - 2 F_lo - mean (W - 2 W_lo), exactly
        t = fsum;
        t.sub(flo);
        t.sub(flo);
        v = wsum;
        v.sub(wlo);
        v.sub(wlo);
        t.add_scaled(v, -mean);
        const double stat = detail::sharp_statistic(r, alpha_order, t.value(), mu.value());
        best = std::max(best, stat);
      }
      out[i] = best;
    }
  });
  return ScalarField(f.point_count(), a, std::move(out));
}

ScalarField hl_maximal(const MetricMeasureSpace& space, const ScalarField& f) {
  const std::size_t n = space.size();
  if (f.point_count() != n || f.domain().size() != n) throw Error("maximal function needs f on all of X");
  std::vector<double> out(n, 0.0);
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> dist;
    std::vector<Neighbor> order;
    ExactSum mu, s;
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = static_cast<PointId>(i);
      sort_neighbors(space, x, dist, order);
      mu.clear();
      s.clear();
      double best = std::abs(f.at(x));
      std::size_t j = 0;
      while (j < n) {
        const double r = order[j].dist;
        for (; j < n && order[j].dist == r; ++j) {
          const PointId y = order[j].id;
          mu.add(space.weight(y));
          s.add_product(std::abs(f.at(y)), space.weight(y));
        }
        if (!(r > 0.0)) continue;
        best = std::max(best, detail::hl_statistic(s.value(), mu.value()));
      }
      out[i] = best;
    }
  });
  return ScalarField(n, f.domain(), std::move(out));
}

double lp_norm(const MetricMeasureSpace& space, const ScalarField& f, double p) {
  if (!(p > 0.0)) throw Error("p must be positive");
  const PointSet& dom = f.domain();
  if (std::isinf(p)) {
    double best = 0.0;
    for (PointId x : dom) best = std::max(best, std::abs(f.at(x)));
    return best;
  }
  ExactSum acc;
  for (PointId x : dom) {
    const double v = std::abs(f.at(x));
    if (v != 0.0) acc.add_product(std::pow(v, p), space.weight(x));
  }
  return std::pow(acc.value(), 1.0 / p);
}

double calderon_norm(const MetricMeasureSpace& space, const ScalarField& f, const NormParams& params) {
  params.validate();
  const PointSet every = all_points(space);
  if (f.domain() != every) throw Error("Calderon norm needs f on all of X");
  return lp_norm(space, f, params.p) + lp_norm(space, sharp_maximal(space, every, f, params.alpha_order), params.p);
}

double trace_side_norm(const MetricMeasureSpace& space, const PointSet& s, const ScalarField& u,
                       const NormParams& params) {
  params.validate();
  if (u.domain() != s) throw Error("trace norm needs u defined exactly on S");
  return lp_norm(space, u, params.p) + lp_norm(space, sharp_maximal(space, s, u, params.alpha_order), params.p);
}

std::optional<std::pair<PointId, PointId>> gradient_violation(const MetricMeasureSpace& space, const ScalarField& u,
                                                              const ScalarField& g, double rel_tol) {
  const PointSet& dom = u.domain();
  if (g.domain() != dom) throw Error("u and g must share a domain");
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double ui = u.at(dom[i]);
    const double gi = g.at(dom[i]);
    for (std::size_t j = i + 1; j < dom.size(); ++j) {
      const double lhs = std::abs(ui - u.at(dom[j]));
      const double rhs = space.distance(dom[i], dom[j]) * (gi + g.at(dom[j]));
      if (lhs > rhs * (1.0 + rel_tol)) return std::make_pair(dom[i], dom[j]);
    }
  }
  return std::nullopt;
}

double hajlasz_norm_with_witness(const MetricMeasureSpace& space, const ScalarField& u, const ScalarField& g,
                                 double p) {
  if (auto bad = gradient_violation(space, u, g)) {
    throw Error("not a generalized gradient: inequality fails for the pair (" + std::to_string(bad->first) + ", " +
                std::to_string(bad->second) + ")");
  }
  return lp_norm(space, u, p) + lp_norm(space, g, p);
}

}  // namespace sobext
