#include "sobext/extension.hpp"

#include <algorithm>
#include <cmath>

#include "sobext/parallel.hpp"

namespace sobext {

namespace {

void require_on_s(const ExtensionContext& ctx, const ScalarField& f, const char* what) {
  if (f.point_count() != ctx.space.size() || f.domain() != ctx.s.ids) {
    throw Error(std::string(what) + " must be defined exactly on S");
  }
}

ScalarField whole_space_copy(const ExtensionContext& ctx, const ScalarField& on_s) {
  ScalarField out = ScalarField::constant(ctx.space.size(), all_points(ctx.space), 0.0);
  for (PointId x : ctx.s.ids) out.set(x, on_s.at(x));
  return out;
}

}  // namespace

std::vector<double> quasi_averages(const MetricMeasureSpace& space, const QuasiBallFamily& family,
                                   const ScalarField& f) {
  std::vector<double> avg(family.size(), 0.0);
  for (std::size_t b = 0; b < family.size(); ++b) avg[b] = average(space, f, family.sets[b]);
  return avg;
}

ScalarField extend_function(const ExtensionContext& ctx, const ScalarField& u) {
  require_on_s(ctx, u, "u");
  const std::vector<double> avg = quasi_averages(ctx.space, ctx.family, u);
  ScalarField out = whole_space_copy(ctx, u);
  const std::size_t n = ctx.space.size();
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto x = static_cast<PointId>(j);
      if (ctx.s.contains(x)) continue;
      double v = 0.0;
      for (const auto& e : ctx.partition.entries[j]) v += avg[e.ball] * e.value;
      out.set(x, v);
    }
  });
  return out;
}

ScalarField extend_gradient(const ExtensionContext& ctx, const ScalarField& u, const ScalarField& g) {
  require_on_s(ctx, u, "u");
  require_on_s(ctx, g, "g");
  for (PointId x : ctx.s.ids) {
    if (!(g.at(x) >= 0.0)) throw Error("gradient must be nonnegative (point " + std::to_string(x) + ")");
  }
  const std::vector<double> ua = quasi_averages(ctx.space, ctx.family, u);
  const std::vector<double> ga = quasi_averages(ctx.space, ctx.family, g);
  ScalarField out = whole_space_copy(ctx, g);
  const std::size_t n = ctx.space.size();
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto x = static_cast<PointId>(j);
      if (ctx.s.contains(x)) continue;
      double v = 0.0;
      for (std::size_t b : ctx.cover.stars_at[j]) v += ga[b] + std::abs(ua[b]);
      out.set(x, v);
    }
  });
  return out;
}

ScalarField extend_abs_average(const ExtensionContext& ctx, const ScalarField& f) {
  require_on_s(ctx, f, "f");
  const std::vector<double> fa = quasi_averages(ctx.space, ctx.family, f);
  ScalarField out = whole_space_copy(ctx, f);
  const std::size_t n = ctx.space.size();
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const auto x = static_cast<PointId>(j);
      if (ctx.s.contains(x)) continue;
      double v = 0.0;
      for (std::size_t b : ctx.cover.stars_at[j]) v += std::abs(fa[b]);
      out.set(x, v);
    }
  });
  return out;
}

ScalarField zero_extend(const ScalarField& f) {
  const std::size_t n = f.point_count();
  PointSet every(n);
  for (std::size_t j = 0; j < n; ++j) every[j] = static_cast<PointId>(j);
  ScalarField out = ScalarField::constant(n, std::move(every), 0.0);
  for (PointId x : f.domain()) out.set(x, f.at(x));
  return out;
}

ScalarField canonical_gradient(const MetricMeasureSpace& space, const ScalarField& u) {
  const PointSet& dom = u.domain();
  const std::size_t m = dom.size();
  std::vector<double> g(m, 0.0);
  parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      const double ua = u.at(dom[a]);
      double best = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        if (c == a) continue;
        best = std::max(best, std::abs(ua - u.at(dom[c])) / space.distance(dom[a], dom[c]));
      }
      g[a] = 0.5 * best;
    }
  });
  return ScalarField(u.point_count(), dom, std::move(g));
}

ExtensionBundle make_bundle(const ExtensionContext& ctx, const ScalarField& u, std::optional<ScalarField> g) {
  ExtensionBundle bundle;
  bundle.u = u;
  bundle.u_tilde = extend_function(ctx, u);
  bundle.averages = quasi_averages(ctx.space, ctx.family, u);
  if (g) {
    bundle.g_tilde = extend_gradient(ctx, u, *g);
    bundle.g = std::move(g);
  }
  return bundle;
}

}  // namespace sobext
