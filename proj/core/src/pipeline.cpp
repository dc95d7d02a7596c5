#include "sobext/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "sobext/io.hpp"

namespace sobext {

namespace {

using nlohmann::json;

const std::set<std::string> kTopKeys{"name",         "space",         "mask",   "p",          "alpha_order",
                                     "delta",        "epsilon",       "theta_ceiling", "comparability_ceiling",
                                     "input_function", "audits",      "output_dir", "seed",   "refine"};

double json_number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string() && (j == "inf" || j == "infinity")) return kInfinity;
  throw Error("'" + what + "' must be a number");
}

GeneratorSpec parse_generator(const json& j) {
  GeneratorSpec g;
  for (const auto& [key, val] : j.items()) {
    if (key == "generator") g.kind = val.get<std::string>();
    else if (key == "level") g.level = val.get<int>();
    else if (key == "cells") g.cells = val.get<int>();
    else if (key == "dims") {
      if (val.is_array()) g.extents = val.get<std::vector<int>>();
      else g.dims = val.get<int>();
    } else if (key == "spacing") g.spacing = val.get<double>();
    else if (key == "schedule") g.schedule = val.get<std::vector<double>>();
    else throw Error("unknown space generator key '" + key + "'");
  }
  if (g.kind != "grid" && g.kind != "fat_cantor" && g.kind != "fat_sierpinski") {
    throw Error("unknown space generator '" + g.kind + "'");
  }
  if (g.kind == "grid" && g.extents.empty()) throw Error("grid generator needs 'dims' as a list of extents");
  if (g.kind != "grid" && g.cells <= 0) throw Error("generator needs a positive 'cells'");
  return g;
}

RemovalSchedule schedule_of(const GeneratorSpec& g, RemovalSchedule fallback) {
  if (g.schedule.empty()) return fallback;
  const auto values = g.schedule;
  return [values](int step) {
    if (step < 1 || static_cast<std::size_t>(step) > values.size()) {
      throw Error("schedule has no entry for step " + std::to_string(step));
    }
    return values[static_cast<std::size_t>(step - 1)];
  };
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

bool wants(const RunConfig& cfg, const std::string& group) {
  return std::find(cfg.audits.begin(), cfg.audits.end(), "all") != cfg.audits.end() ||
         std::find(cfg.audits.begin(), cfg.audits.end(), group) != cfg.audits.end();
}

std::string dump(const auto& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

}  // namespace

const std::vector<std::string>& audit_groups() {
  static const std::vector<std::string> groups{"cover",       "family",      "partition", "gradient",
                                               "oscillation", "lp",          "sharp",     "ball_lemmas",
                                               "restriction", "trace",       "maximal_lp"};
  return groups;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, val] : j.items()) {
    if (!kTopKeys.count(key)) throw Error("unknown config key '" + key + "'");
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };

  RunConfig cfg;
  try {
    if (j.contains("name")) cfg.name = j["name"].get<std::string>();
    if (!j.contains("space")) throw Error("config needs 'space'");
    const json& sp = j["space"];
    json space_generator;
    if (sp.contains("file")) {
      cfg.space_file = resolve(sp["file"].get<std::string>());
      if (!std::filesystem::exists(cfg.space_file)) throw Error("space file not found: " + cfg.space_file.string());
    } else {
      space_generator = sp;
      cfg.generator = parse_generator(sp);
    }

    const json mask = j.value("mask", json("generator"));
    if (mask.is_string()) {
      const auto m = mask.get<std::string>();
      if (m == "generator") cfg.mask_source = RunConfig::MaskSource::generator;
      else if (m == "all") cfg.mask_source = RunConfig::MaskSource::all;
      else throw Error("mask must be \"generator\", \"all\", {\"file\": ...} or {\"ids\": [...]}");
    } else if (mask.contains("file")) {
      cfg.mask_source = RunConfig::MaskSource::file;
      cfg.mask_file = resolve(mask["file"].get<std::string>());
      if (!std::filesystem::exists(cfg.mask_file)) throw Error("mask file not found: " + cfg.mask_file.string());
    } else if (mask.contains("ids")) {
      cfg.mask_source = RunConfig::MaskSource::ids;
      cfg.mask_ids = mask["ids"].get<PointSet>();
      std::sort(cfg.mask_ids.begin(), cfg.mask_ids.end());
      cfg.mask_ids.erase(std::unique(cfg.mask_ids.begin(), cfg.mask_ids.end()), cfg.mask_ids.end());
    } else {
      throw Error("unrecognized mask source");
    }
    if (cfg.mask_source == RunConfig::MaskSource::generator && !cfg.generator) {
      throw Error("mask \"generator\" needs a generated space");
    }

    if (j.contains("p")) cfg.p = json_number(j["p"], "p");
    if (j.contains("alpha_order")) cfg.alpha_order = json_number(j["alpha_order"], "alpha_order");
    NormParams{cfg.p, cfg.alpha_order}.validate();

    if (j.contains("delta")) {
      const json& d = j["delta"];
      if (d == "auto") cfg.delta_mode = RunConfig::DeltaMode::automatic;
      else if (d == "recommended") cfg.delta_mode = RunConfig::DeltaMode::recommended;
      else {
        cfg.delta_mode = RunConfig::DeltaMode::value;
        cfg.delta = json_number(d, "delta");
        if (!(cfg.delta > 0.0)) throw Error("delta must be positive");
      }
    }
    if (cfg.delta_mode == RunConfig::DeltaMode::recommended && !cfg.generator) {
      throw Error("delta \"recommended\" needs a generated space");
    }
    if (j.contains("epsilon") && j["epsilon"] != "auto") {
      cfg.epsilon = json_number(j["epsilon"], "epsilon");
      if (!(*cfg.epsilon > 0.0 && *cfg.epsilon <= 1.0)) throw Error("epsilon must lie in (0, 1]");
    }
    if (j.contains("theta_ceiling")) cfg.theta_ceiling = json_number(j["theta_ceiling"], "theta_ceiling");
    if (j.contains("comparability_ceiling")) {
      cfg.comparability_ceiling = json_number(j["comparability_ceiling"], "comparability_ceiling");
    }

    if (j.contains("input_function")) {
      const json& f = j["input_function"];
      InputFunction in;
      in.kind = f.at("kind").get<std::string>();
      if (in.kind == "constant") in.value = f.value("value", 1.0);
      else if (in.kind == "coordinate") in.axis = f.value("axis", 0);
      else if (in.kind == "random") {
        if (f.contains("seed")) in.seed = f["seed"].get<std::uint64_t>();
      } else if (in.kind == "indicator") {
        if (f.contains("ids")) {
          in.ids = f["ids"].get<PointSet>();
          std::sort(in.ids.begin(), in.ids.end());
        } else if (f.contains("center") && f.contains("radius")) {
          in.ball = Ball{f["center"].get<PointId>(), f["radius"].get<double>()};
        } else {
          throw Error("indicator needs 'ids' or 'center' and 'radius'");
        }
      } else {
        throw Error("unknown input function '" + in.kind + "'");
      }
      cfg.input = in;
    }

    if (j.contains("audits")) {
      cfg.audits = j["audits"].get<std::vector<std::string>>();
      for (const auto& a : cfg.audits) {
        if (a != "all" && std::find(audit_groups().begin(), audit_groups().end(), a) == audit_groups().end()) {
          throw Error("unknown audit '" + a + "'");
        }
      }
    }
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("refine")) {
      if (!cfg.generator) throw Error("'refine' needs a generated space");
      json merged = space_generator;
      merged.update(j["refine"]);
      cfg.refine = parse_generator(merged);
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_file(path), path.parent_path());
}

Fixture load_fixture(const RunConfig& cfg, const std::optional<GeneratorSpec>& generator) {
  Fixture fx;
  fx.name = cfg.name;
  if (generator) {
    const GeneratorSpec& g = *generator;
    if (g.kind == "grid") {
      fx.space = gen_grid(g.extents, g.spacing);
      fx.recommended_delta = 4.0 * g.spacing * std::sqrt(static_cast<double>(g.extents.size()));
    } else if (g.kind == "fat_cantor") {
      Fixture gen = gen_fat_cantor(g.level, g.cells, g.dims, schedule_of(g, fat_cantor_default_schedule));
      fx.space = std::move(gen.space);
      fx.mask = std::move(gen.mask);
      fx.recommended_delta = gen.recommended_delta;
    } else {
      Fixture gen = gen_fat_sierpinski(g.level, g.cells, schedule_of(g, fat_sierpinski_default_schedule));
      fx.space = std::move(gen.space);
      fx.mask = std::move(gen.mask);
      fx.recommended_delta = gen.recommended_delta;
    }
  } else {
    std::ifstream in(cfg.space_file);
    if (!in) throw Error("cannot open " + cfg.space_file.string());
    fx.space = io::read_space(in);
  }
  switch (cfg.mask_source) {
    case RunConfig::MaskSource::generator:
      if (generator && generator->kind == "grid") fx.mask = all_points(fx.space);
      break;
    case RunConfig::MaskSource::all:
      fx.mask = all_points(fx.space);
      break;
    case RunConfig::MaskSource::file: {
      std::ifstream in(cfg.mask_file);
      if (!in) throw Error("cannot open " + cfg.mask_file.string());
      fx.mask = io::read_mask(in, fx.space.size());
      break;
    }
    case RunConfig::MaskSource::ids:
      for (PointId p : cfg.mask_ids) fx.space.check_id(p);
      fx.mask = cfg.mask_ids;
      break;
  }
  if (fx.mask.empty()) throw Error("mask is empty");
  return fx;
}

double resolve_delta(const RunConfig& cfg, const Fixture& fixture) {
  switch (cfg.delta_mode) {
    case RunConfig::DeltaMode::value:
      return cfg.delta;
    case RunConfig::DeltaMode::recommended:
      return fixture.recommended_delta;
    case RunConfig::DeltaMode::automatic:
      break;
  }
  return auto_regularity_delta(fixture.space, fixture.mask, cfg.theta_ceiling);
}

ScalarField make_input(const RunConfig& cfg, const MetricMeasureSpace& space, const PointSet& s) {
  const InputFunction& in = cfg.input;
  std::vector<double> v(s.size(), 0.0);
  if (in.kind == "constant") {
    std::fill(v.begin(), v.end(), in.value);
  } else if (in.kind == "coordinate") {
    if (!space.has_coordinates()) throw Error("coordinate input needs a coordinate space");
    if (in.axis < 0 || in.axis >= space.dimension()) throw Error("coordinate axis out of range");
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = space.coordinates(s[i])[static_cast<std::size_t>(in.axis)];
  } else if (in.kind == "random") {
    std::uint64_t state = in.seed.value_or(cfg.seed);
    // uniform in [-1, 1) from the top 53 bits
    for (auto& x : v) x = 2.0 * std::ldexp(static_cast<double>(splitmix(state) >> 11), -53) - 1.0;
  } else if (in.kind == "indicator") {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const PointId p = s[i];
      bool hit = false;
      if (in.ball) hit = space.distance(p, in.ball->center) < in.ball->radius;
      else hit = std::binary_search(in.ids.begin(), in.ids.end(), p);
      v[i] = hit ? 1.0 : 0.0;
    }
  } else {
    throw Error("unknown input function '" + in.kind + "'");
  }
  return ScalarField(space.size(), s, std::move(v));
}

Instance build_instance(const RunConfig& cfg, const std::optional<GeneratorSpec>& generator) {
  Instance inst;
  inst.fixture = stage("load", [&] { return load_fixture(cfg, generator); });
  const auto& space = inst.fixture.space;
  stage("validate", [&] {
    space.validate();
    return 0;
  });
  inst.params = stage("estimate", [&] { return estimate_doubling(space); });
  inst.s = stage("estimate", [&] {
    const double delta = resolve_delta(cfg, inst.fixture);
    return estimate_regularity(space, inst.fixture.mask, delta);
  });
  inst.cover = stage("cover", [&] { return build_whitney(space, inst.s); });
  inst.family = stage("quasi_balls", [&] {
    if (cfg.epsilon) return build_quasi_balls(space, inst.s, inst.cover, *cfg.epsilon, inst.s.delta);
    return tune_epsilon(space, inst.s, inst.cover, inst.s.delta).family;
  });
  inst.partition = stage("partition", [&] { return build_partition(space, inst.s, inst.cover); });
  stage("extend", [&] {
    inst.u = make_input(cfg, space, inst.s.ids);
    inst.g = canonical_gradient(space, inst.u);
    inst.bundle = make_bundle(inst.context(), inst.u, inst.g);
    return 0;
  });
  return inst;
}

std::vector<AuditReport> run_audits(const Instance& inst, const RunConfig& cfg) {
  const auto ctx = inst.context();
  const auto& space = inst.fixture.space;
  const NormParams params{cfg.p, cfg.alpha_order};
  std::vector<AuditReport> out;
  auto append = [&](std::vector<AuditReport> more) {
    for (auto& r : more) out.push_back(std::move(r));
  };

  return stage("audit", [&] {
    if (wants(cfg, "cover")) {
      append(cover_audits(verify_cover(space, inst.s, inst.cover, inst.params.doubling, cfg.comparability_ceiling)));
    }
    if (wants(cfg, "family")) append(family_audits(verify_family(space, inst.s, inst.cover, inst.family)));
    if (wants(cfg, "partition")) append(partition_audits(verify_partition(space, inst.s, inst.cover, inst.partition)));

    std::optional<double> gradient_constant;
    if (wants(cfg, "gradient") || wants(cfg, "trace")) {
      AuditReport r = audit_gradient_inequality(space, inst.bundle);
      gradient_constant = r.observed_constant;
      if (wants(cfg, "gradient")) out.push_back(std::move(r));
    }
    if (wants(cfg, "oscillation")) {
      append(audit_oscillation_lemma(space, inst.u, inst.g, family_pairs(inst.cover, inst.family),
                                     family_points(inst.s, inst.family)));
    }
    if (wants(cfg, "lp")) append(audit_lp_bounds(ctx, inst.bundle, {inst.g}, cfg.p));

    const bool need_fields = wants(cfg, "sharp") || wants(cfg, "ball_lemmas") || wants(cfg, "restriction") ||
                             wants(cfg, "trace") || wants(cfg, "maximal_lp");
    if (need_fields) {
      const MaximalFields fields = compute_maximal_fields(ctx, inst.bundle, cfg.alpha_order);
      if (wants(cfg, "sharp")) append(audit_sharp_bounds(ctx, inst.bundle, fields));
      if (wants(cfg, "ball_lemmas")) {
        append(audit_ball_lemmas(ctx, inst.bundle, fields, sample_balls(space, inst.s.ids),
                                 sample_balls(space, complement(space, inst.s))));
      }
      if (wants(cfg, "restriction")) {
        out.push_back(audit_restriction_bound(inst.s.ids, fields.u_sharp_s, fields.u_tilde_sharp,
                                              "restriction_extension"));
        const ScalarField zero_sharp =
            sharp_maximal(space, all_points(space), zero_extend(inst.u), cfg.alpha_order);
        out.push_back(audit_restriction_bound(inst.s.ids, fields.u_sharp_s, zero_sharp, "restriction_zero"));
      }
      if (wants(cfg, "trace")) {
        append(audit_trace_equivalence(ctx, inst.bundle, fields, params, gradient_constant.value_or(kInfinity)));
      }
      if (wants(cfg, "maximal_lp")) out.push_back(audit_maximal_lp(space, inst.bundle, fields, cfg.p));
    }
    sort_reports(out);
    return out;
  });
}

void attach_refinement(std::vector<AuditReport>& coarse, const std::vector<AuditReport>& fine) {
  for (auto& r : coarse) {
    for (const auto& f : fine) {
      if (f.name == r.name) {
        r.refinement_ratio = refinement_ratio(r.observed_constant, f.observed_constant);
        break;
      }
    }
  }
}

void write_instance(const Instance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_file(dir / "space.mms", dump([&](std::ostream& os) { io::write_space(os, inst.fixture.space); }));
  io::write_file(dir / "mask.txt", dump([&](std::ostream& os) { io::write_mask(os, inst.s.ids); }));
  io::write_file(dir / "cover.txt", dump([&](std::ostream& os) { io::write_cover(os, inst.cover); }));
  io::write_file(dir / "family.txt", dump([&](std::ostream& os) { io::write_family(os, inst.family); }));
  io::write_file(dir / "phi.txt", dump([&](std::ostream& os) { io::write_partition(os, inst.partition); }));
  io::write_file(dir / "u.field", dump([&](std::ostream& os) { io::write_field(os, inst.u); }));
  io::write_file(dir / "g.field", dump([&](std::ostream& os) { io::write_field(os, inst.g); }));
  io::write_file(dir / "u_tilde.field", dump([&](std::ostream& os) { io::write_field(os, inst.bundle.u_tilde); }));
  if (inst.bundle.g_tilde) {
    io::write_file(dir / "g_tilde.field", dump([&](std::ostream& os) { io::write_field(os, *inst.bundle.g_tilde); }));
  }
}

PipelineResult run_pipeline(const RunConfig& cfg, bool write_outputs) {
  PipelineResult res;
  const Instance inst = build_instance(cfg, cfg.generator);
  res.reports = run_audits(inst, cfg);
  if (cfg.refine) {
    const Instance fine = build_instance(cfg, cfg.refine);
    res.refined_reports = run_audits(fine, cfg);
    attach_refinement(res.reports, res.refined_reports);
    if (write_outputs) {
      stage("write", [&] {
        write_instance(fine, cfg.output_dir / "refined");
        io::write_file(cfg.output_dir / "refined" / "reports.json", io::reports_to_json(res.refined_reports));
        return 0;
      });
    }
  }
  if (write_outputs) {
    stage("write", [&] {
      write_instance(inst, cfg.output_dir);
      io::write_file(cfg.output_dir / "reports.json", io::reports_to_json(res.reports));
      std::ostringstream csv;
      io::write_csv(csv, io::csv_rows(cfg.name, res.reports));
      io::write_file(cfg.output_dir / "reports.csv", csv.str());
      return 0;
    });
  }
  res.exit_code = 0;
  for (const auto& r : res.reports) {
    if (!r.pass) res.exit_code = 1;
  }
  return res;
}

}  // namespace sobext
