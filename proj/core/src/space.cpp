#include "sobext/space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "sobext/exact_sum.hpp"
#include "sobext/parallel.hpp"

namespace sobext {

namespace {

std::atomic<unsigned> g_threads{1};

// (distance, id) pairs sorted ascending; ties by id.
void sorted_neighbors(const MetricMeasureSpace& space, PointId x, std::vector<double>& dist,
                      std::vector<std::pair<double, PointId>>& order) {
  const std::size_t n = space.size();
  dist.resize(n);
  space.distances_from(x, dist);
  order.resize(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = {dist[j], static_cast<PointId>(j)};
  std::sort(order.begin(), order.end());
}

}  // namespace

void set_thread_count(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  g_threads = n;
}

unsigned thread_count() { return g_threads; }

// --- MetricMeasureSpace -----------------------------------------------------

MetricMeasureSpace MetricMeasureSpace::from_coordinates(int dimension, std::vector<double> coordinates,
                                                        std::vector<double> weights,
                                                        std::optional<ScaleWindow> window) {
  if (dimension <= 0) throw Error("coordinate dimension must be positive");
  if (coordinates.size() != weights.size() * static_cast<std::size_t>(dimension)) {
    throw Error("coordinate count does not match point count x dimension");
  }
  MetricMeasureSpace s;
  s.dimension_ = dimension;
  s.coords_ = std::move(coordinates);
  s.weights_ = std::move(weights);
  s.finish(window);
  return s;
}

MetricMeasureSpace MetricMeasureSpace::from_matrix(std::vector<double> distances, std::vector<double> weights,
                                                   std::optional<ScaleWindow> window) {
  if (distances.size() != weights.size() * weights.size()) {
    throw Error("distance matrix must be n x n");
  }
  MetricMeasureSpace s;
  s.matrix_ = std::move(distances);
  s.weights_ = std::move(weights);
  s.finish(window);
  return s;
}

void MetricMeasureSpace::finish(std::optional<ScaleWindow> window) {
  const std::size_t n = size();
  total_measure_ = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error("weights must be positive and finite");
    total_measure_ += w;
  }
  min_distance_ = std::numeric_limits<double>::infinity();
  diameter_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(static_cast<PointId>(i), static_cast<PointId>(j));
      min_distance_ = std::min(min_distance_, d);
      diameter_ = std::max(diameter_, d);
    }
  }
  if (n < 2) min_distance_ = 0.0;
  if (window) {
    set_window(*window);
  } else {
    window_ = {2.0 * min_distance_, diameter_ / 2.0};
  }
}

void MetricMeasureSpace::set_window(ScaleWindow w) {
  if (!(w.r_min > 0.0) || !(w.r_max > w.r_min)) throw Error("scale window needs 0 < r_min < r_max");
  window_ = w;
}

void MetricMeasureSpace::distances_from(PointId x, std::span<double> out) const {
  const std::size_t n = size();
  if (dimension_ > 0) {
    for (std::size_t j = 0; j < n; ++j) out[j] = distance(x, static_cast<PointId>(j));
  } else {
    const double* row = matrix_.data() + static_cast<std::size_t>(x) * n;
    std::copy(row, row + n, out.begin());
  }
}

double MetricMeasureSpace::measure(std::span<const PointId> points) const {
  double m = 0.0;
  for (PointId p : points) m += weights_[p];
  return m;
}

void MetricMeasureSpace::validate() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = static_cast<PointId>(i);
    if (distance(pi, pi) != 0.0) throw Error("nonzero self distance at point " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto pj = static_cast<PointId>(j);
      const double d = distance(pi, pj);
      if (!std::isfinite(d) || !(d > 0.0)) {
        throw Error("distance between distinct points " + std::to_string(i) + "," + std::to_string(j) +
                    " is not positive");
      }
      if (d != distance(pj, pi)) {
        throw Error("asymmetric distance between " + std::to_string(i) + "," + std::to_string(j));
      }
    }
  }
  auto check = [&](PointId a, PointId b, PointId c) {
    const double lhs = distance(a, c);
    const double rhs = distance(a, b) + distance(b, c);
    if (lhs > rhs * (1.0 + 1e-12)) {
      throw Error("triangle inequality fails for (" + std::to_string(a) + "," + std::to_string(b) + "," +
                  std::to_string(c) + ")");
    }
  };
  if (n <= 512) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = a + 1; c < n; ++c)
          check(static_cast<PointId>(a), static_cast<PointId>(b), static_cast<PointId>(c));
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<PointId> pick(0, static_cast<PointId>(n - 1));
    for (int t = 0; t < 100000; ++t) check(pick(rng), pick(rng), pick(rng));
  }
}

// --- subsets and fields -----------------------------------------------------

RegularSubset make_subset(const MetricMeasureSpace& space, PointSet ids, double delta, double theta) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  RegularSubset s;
  s.member.assign(space.size(), 0);
  for (PointId p : ids) {
    space.check_id(p);
    s.member[p] = 1;
  }
  s.ids = std::move(ids);
  s.delta = delta;
  s.theta = theta;
  return s;
}

PointSet complement(const MetricMeasureSpace& space, const RegularSubset& s) {
  PointSet out;
  for (std::size_t i = 0; i < space.size(); ++i)
    if (!s.member[i]) out.push_back(static_cast<PointId>(i));
  return out;
}

PointSet all_points(const MetricMeasureSpace& space) {
  PointSet out(space.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<PointId>(i);
  return out;
}

ScalarField::ScalarField(std::size_t point_count, PointSet domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)), slot_(point_count, -1) {
  if (domain_.size() != values_.size()) throw Error("field domain and values differ in size");
  for (std::size_t k = 0; k < domain_.size(); ++k) {
    const PointId p = domain_[k];
    if (p >= point_count) throw Error("field domain contains invalid point " + std::to_string(p));
    if (k > 0 && domain_[k - 1] >= p) throw Error("field domain must be sorted and duplicate-free");
    slot_[p] = static_cast<std::int32_t>(k);
  }
}

ScalarField ScalarField::constant(std::size_t point_count, PointSet domain, double value) {
  std::vector<double> v(domain.size(), value);
  return ScalarField(point_count, std::move(domain), std::move(v));
}

// --- balls and averages -----------------------------------------------------

PointSet ball_members(const MetricMeasureSpace& space, const Ball& b) {
  space.check_id(b.center);
  PointSet out;
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (space.distance(b.center, static_cast<PointId>(j)) < b.radius) out.push_back(static_cast<PointId>(j));
  }
  return out;
}

PointSet closed_ball_members(const MetricMeasureSpace& space, PointId center, double radius) {
  space.check_id(center);
  PointSet out;
  for (std::size_t j = 0; j < space.size(); ++j) {
    if (space.distance(center, static_cast<PointId>(j)) <= radius) out.push_back(static_cast<PointId>(j));
  }
  return out;
}

double average(const MetricMeasureSpace& space, const ScalarField& f, std::span<const PointId> a) {
  if (a.empty()) return 0.0;
  ExactSum num;
  ExactSum den;
  for (PointId p : a) {
    num.add_product(f.at(p), space.weight(p));
    den.add(space.weight(p));
  }
  return num.value() / den.value();
}

std::vector<double> candidate_radii(const MetricMeasureSpace& space, PointId x) {
  space.check_id(x);
  std::vector<double> d(space.size());
  space.distances_from(x, d);
  std::vector<double> out;
  for (double v : d)
    if (v > 0.0) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- constant estimation ----------------------------------------------------

SpaceParams estimate_doubling(const MetricMeasureSpace& space) {
  const ScaleWindow win = space.window();
  const double lo = win.r_min;
  const double hi = win.r_max / 2.0;
  if (!(lo > 0.0) || !(win.r_max > win.r_min) || hi < lo) throw Error("empty radius window");
  const std::size_t n = space.size();

  std::vector<double> cd(n, 0.0);
  std::vector<double> crd(n, std::numeric_limits<double>::infinity());
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> dist;
    std::vector<std::pair<double, PointId>> order;
    std::vector<double> sorted_d(n);
    std::vector<double> cumulative(n);
    std::vector<double> radii;
    for (std::size_t x = begin; x < end; ++x) {
      sorted_neighbors(space, static_cast<PointId>(x), dist, order);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sorted_d[k] = order[k].first;
        acc += space.weight(order[k].second);
        cumulative[k] = acc;
      }
      // Closed-ball measure of radius r.
      auto closed = [&](double r) {
        const auto it = std::upper_bound(sorted_d.begin(), sorted_d.end(), r);
        return cumulative[static_cast<std::size_t>(it - sorted_d.begin()) - 1];
      };
      // The ratio mu(2r)/mu(r) only changes where r or 2r crosses a distance.
      radii.clear();
      radii.push_back(lo);
      for (double d : sorted_d) {
        if (d >= lo && d <= hi) radii.push_back(d);
        if (d / 2.0 >= lo && d / 2.0 <= hi) radii.push_back(d / 2.0);
      }
      for (double r : radii) {
        const double ratio = closed(2.0 * r) / closed(r);
        cd[x] = std::max(cd[x], ratio);
        crd[x] = std::min(crd[x], ratio);
      }
    }
  });
  SpaceParams p;
  p.doubling = *std::max_element(cd.begin(), cd.end());
  p.reverse_doubling = *std::min_element(crd.begin(), crd.end());
  p.alpha = std::log2(p.reverse_doubling);
  p.beta = std::log2(p.doubling);
  return p;
}

namespace {

// Walks closed balls around x in increasing radius; calls visit(r, mu_ball, mu_ball_in_s)
// at the end of every distance group with r > 0. Stops when visit returns false.
template <class Visit>
void sweep_regularity(const MetricMeasureSpace& space, const RegularSubset& s, PointId x,
                      std::vector<double>& dist, std::vector<std::pair<double, PointId>>& order, Visit&& visit) {
  sorted_neighbors(space, x, dist, order);
  double mu = 0.0;
  double mu_s = 0.0;
  const std::size_t n = order.size();
  std::size_t i = 0;
  while (i < n) {
    const double r = order[i].first;
    while (i < n && order[i].first == r) {
      const PointId y = order[i].second;
      mu += space.weight(y);
      if (s.contains(y)) mu_s += space.weight(y);
      ++i;
    }
    if (r > 0.0 && !visit(r, mu, mu_s)) return;
  }
}

}  // namespace

RegularSubset estimate_regularity(const MetricMeasureSpace& space, const PointSet& mask, double delta) {
  if (mask.empty()) throw Error("regularity needs a nonempty mask");
  if (!(delta > 0.0)) throw Error("regularity scale delta must be positive");
  RegularSubset s = make_subset(space, mask, delta, 1.0);
  std::vector<double> theta(s.ids.size(), 1.0);
  parallel_chunks(s.ids.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> dist;
    std::vector<std::pair<double, PointId>> order;
    for (std::size_t k = begin; k < end; ++k) {
      sweep_regularity(space, s, s.ids[k], dist, order, [&](double r, double mu, double mu_s) {
        if (r > delta) return false;
        if (mu_s <= 0.0) throw Error("not regular at scale delta");
        theta[k] = std::max(theta[k], mu / mu_s);
        return true;
      });
    }
  });
  s.theta = *std::max_element(theta.begin(), theta.end());
  return s;
}

double auto_regularity_delta(const MetricMeasureSpace& space, const PointSet& mask, double theta_ceiling) {
  if (mask.empty()) throw Error("regularity needs a nonempty mask");
  RegularSubset s = make_subset(space, mask);
  // First radius at which each point's ratio exceeds the ceiling.
  std::vector<double> bound(s.ids.size(), std::numeric_limits<double>::infinity());
  parallel_chunks(s.ids.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> dist;
    std::vector<std::pair<double, PointId>> order;
    for (std::size_t k = begin; k < end; ++k) {
      sweep_regularity(space, s, s.ids[k], dist, order, [&](double r, double mu, double mu_s) {
        if (mu / mu_s > theta_ceiling) {
          bound[k] = r;
          return false;
        }
        return true;
      });
    }
  });
  const double limit = *std::min_element(bound.begin(), bound.end());
  if (!std::isfinite(limit)) return space.diameter() > 0.0 ? space.diameter() : 1.0;
  double best = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      const double d = space.distance(static_cast<PointId>(i), static_cast<PointId>(j));
      if (d < limit) best = std::max(best, d);
    }
  }
  if (!(best > 0.0)) throw Error("no positive scale keeps theta within the ceiling");
  return best;
}

std::vector<double> distances_to_set(const MetricMeasureSpace& space, const RegularSubset& s) {
  if (s.empty()) throw Error("distance to an empty set");
  const std::size_t n = space.size();
  std::vector<double> out(n, 0.0);
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      if (s.contains(static_cast<PointId>(x))) continue;
      double best = std::numeric_limits<double>::infinity();
      for (PointId y : s.ids) best = std::min(best, space.distance(static_cast<PointId>(x), y));
      out[x] = best;
    }
  });
  return out;
}

double set_diameter(const MetricMeasureSpace& space, std::span<const PointId> points) {
  double best = 0.0;
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) best = std::max(best, space.distance(points[a], points[b]));
  return best;
}

}  // namespace sobext
