#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "sobext/io.hpp"
#include "sobext/parallel.hpp"
#include "sobext/pipeline.hpp"

namespace sobext::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <class T, class Reader>
T read_with(const fs::path& path, Reader&& reader) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return reader(in);
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ostringstream os;
  writer(os);
  io::write_file(path, os.str());
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(io::format_double(v)); }

double number_from(const json& j) { return j.is_string() ? io::parse_double(j.get<std::string>()) : j.get<double>(); }

struct Estimate {
  SpaceParams params;
  double theta = 1.0;
  double delta = 0.0;
};

std::string estimate_to_json(const MetricMeasureSpace& space, const RegularSubset& s, const SpaceParams& params) {
  json j;
  j["points"] = space.size();
  j["subset_points"] = s.size();
  j["r_min"] = number_json(space.window().r_min);
  j["r_max"] = number_json(space.window().r_max);
  j["doubling"] = number_json(params.doubling);
  j["reverse_doubling"] = number_json(params.reverse_doubling);
  j["alpha"] = number_json(params.alpha);
  j["beta"] = number_json(params.beta);
  j["theta"] = number_json(s.theta);
  j["delta"] = number_json(s.delta);
  return j.dump(2) + "\n";
}

Estimate estimate_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Estimate e;
    e.params.doubling = number_from(j.at("doubling"));
    e.params.reverse_doubling = number_from(j.at("reverse_doubling"));
    e.params.alpha = number_from(j.at("alpha"));
    e.params.beta = number_from(j.at("beta"));
    e.theta = number_from(j.at("theta"));
    e.delta = number_from(j.at("delta"));
    return e;
  } catch (const json::exception& ex) {
    throw Error(std::string("estimate file: ") + ex.what());
  }
}

void print_reports(std::ostream& out, const std::vector<AuditReport>& reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.name.size());
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << (r.pass ? "pass" : "FAIL") << "  "
        << io::format_double(r.observed_constant);
    if (r.ceiling) out << " <= " << io::format_double(*r.ceiling);
    if (r.refinement_ratio) out << "  refinement " << io::format_double(*r.refinement_ratio);
    if (!r.pass && r.witness) {
      out << "  witness points";
      for (PointId p : r.witness->points) out << ' ' << p;
    }
    out << '\n';
  }
}

int exit_for(const std::vector<AuditReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const AuditReport& r) { return r.pass; }) ? kPass
                                                                                                  : kAuditFailure;
}

// Files shared by the post-estimate subcommands.
struct Stored {
  fs::path space, mask, estimate, cover, family, u, g;
};

Instance load_instance(const Stored& files, bool need_cover, bool need_family) {
  Instance inst;
  inst.fixture.space = read_with<MetricMeasureSpace>(files.space, [](std::istream& in) { return io::read_space(in); });
  const auto& space = inst.fixture.space;
  inst.fixture.mask = read_with<PointSet>(files.mask, [&](std::istream& in) { return io::read_mask(in, space.size()); });
  const Estimate e = estimate_from_json(io::read_file(files.estimate));
  inst.params = e.params;
  inst.s = make_subset(space, inst.fixture.mask, e.delta, e.theta);
  if (need_cover) {
    inst.cover =
        read_with<WhitneyCover>(files.cover, [&](std::istream& in) { return io::read_cover(in, space, inst.s); });
    inst.partition = build_partition(space, inst.s, inst.cover);
  }
  if (need_family) {
    inst.family = read_with<QuasiBallFamily>(
        files.family, [&](std::istream& in) { return io::read_family(in, space, inst.s, inst.cover); });
  }
  return inst;
}

void load_fields(Instance& inst, const Stored& files) {
  const std::size_t n = inst.fixture.space.size();
  inst.u = read_with<ScalarField>(files.u, [&](std::istream& in) { return io::read_field(in, n); });
  if (inst.u.domain() != inst.s.ids) throw Error("u must be defined exactly on the mask");
  if (files.g.empty()) {
    inst.g = canonical_gradient(inst.fixture.space, inst.u);
  } else {
    inst.g = read_with<ScalarField>(files.g, [&](std::istream& in) { return io::read_field(in, n); });
  }
  inst.bundle = make_bundle(inst.context(), inst.u, inst.g);
}

template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Whitney-type Sobolev extension on finite metric measure spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool sequential = false;
  app.add_option("--seed", seed, "Seed for random inputs (overrides the config)");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  app.add_flag("--sequential", sequential, "Single-threaded, bit-exact mode");

  fs::path config_path;
  fs::path out_dir;
  Stored files;
  std::string delta_arg = "auto";
  double theta_ceiling = 32.0;
  std::string epsilon_arg = "auto";
  std::string p_text;
  double alpha_arg = 1.0;
  std::vector<std::string> audit_names{"all"};
  std::vector<fs::path> csv_inputs;

  auto* run_cmd = app.add_subcommand("run", "Full pipeline from a JSON config");
  run_cmd->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");

  auto* gen_cmd = app.add_subcommand("gen-space", "Write space.mms, mask.txt and u.field from a config");
  gen_cmd->add_option("--config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* est_cmd = app.add_subcommand("estimate", "Doubling constants and the regularity certificate of the mask");
  est_cmd->add_option("--space", files.space)->required()->check(CLI::ExistingFile);
  est_cmd->add_option("--mask", files.mask)->required()->check(CLI::ExistingFile);
  est_cmd->add_option("--delta", delta_arg, "Scale for S: a number or 'auto'");
  est_cmd->add_option("--theta-ceiling", theta_ceiling, "Ceiling used by automatic delta");
  est_cmd->add_option("--out", out_dir)->required();

  auto* cover_cmd = app.add_subcommand("cover", "Whitney cover, quasi-balls and partition of unity");
  cover_cmd->add_option("--space", files.space)->required()->check(CLI::ExistingFile);
  cover_cmd->add_option("--mask", files.mask)->required()->check(CLI::ExistingFile);
  cover_cmd->add_option("--estimate", files.estimate)->required()->check(CLI::ExistingFile);
  cover_cmd->add_option("--epsilon", epsilon_arg, "Quasi-ball shrink factor: a number in (0,1] or 'auto'");
  cover_cmd->add_option("--out", out_dir)->required();

  auto* ext_cmd = app.add_subcommand("extend", "Extend u (and its gradient) from the mask to the whole space");
  ext_cmd->add_option("--space", files.space)->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--mask", files.mask)->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--estimate", files.estimate)->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--cover", files.cover)->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--family", files.family)->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--u", files.u, "Field on the mask")->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--g", files.g, "Gradient of u (default: canonical)")->check(CLI::ExistingFile);
  ext_cmd->add_option("--out", out_dir)->required();

  auto* audit_cmd = app.add_subcommand("audit", "Run audits on stored artifacts");
  audit_cmd->add_option("--space", files.space)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--mask", files.mask)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--estimate", files.estimate)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--cover", files.cover)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--family", files.family)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--u", files.u)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--g", files.g)->check(CLI::ExistingFile);
  audit_cmd->add_option("--config", config_path, "Take p, alpha_order, audits and ceilings from a config")
      ->check(CLI::ExistingFile);
  audit_cmd->add_option("--p", p_text, "Integrability exponent (> 1, or 'inf')");
  audit_cmd->add_option("--alpha", alpha_arg, "Order of the sharp maximal function");
  audit_cmd->add_option("--audits", audit_names, "Audit groups")->delimiter(',');
  audit_cmd->add_option("--out", out_dir)->required();

  auto* report_cmd = app.add_subcommand("report", "Merge reports.csv files");
  report_cmd->add_option("--in", csv_inputs, "Input CSV files")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", out_dir, "Directory for the merged reports.csv")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsageError;
  }

  set_thread_count(sequential ? 1 : threads);

  if (*run_cmd) {
    return guarded(err, [&] {
      RunConfig cfg = load_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (seed) cfg.seed = *seed;
      const PipelineResult res = run_pipeline(cfg);
      print_reports(out, res.reports);
      out << (res.exit_code == 0 ? "all audits passed" : "audit failures") << " (" << res.reports.size()
          << " reports, written to " << cfg.output_dir.string() << ")\n";
      return res.exit_code;
    });
  }

  if (*gen_cmd) {
    return guarded(err, [&] {
      RunConfig cfg = load_config(config_path);
      if (seed) cfg.seed = *seed;
      const Fixture fx = load_fixture(cfg, cfg.generator);
      fs::create_directories(out_dir);
      write_with(out_dir / "space.mms", [&](std::ostream& os) { io::write_space(os, fx.space); });
      write_with(out_dir / "mask.txt", [&](std::ostream& os) { io::write_mask(os, fx.mask); });
      const ScalarField u = make_input(cfg, fx.space, fx.mask);
      write_with(out_dir / "u.field", [&](std::ostream& os) { io::write_field(os, u); });
      json meta;
      meta["recommended_delta"] = number_json(resolve_delta(cfg, fx));
      io::write_file(out_dir / "fixture.json", meta.dump(2) + "\n");
      out << fx.space.size() << " points, " << fx.mask.size() << " in the mask\n";
      return kPass;
    });
  }

  if (*est_cmd) {
    return guarded(err, [&] {
      const auto space = read_with<MetricMeasureSpace>(files.space, [](std::istream& in) { return io::read_space(in); });
      const auto mask = read_with<PointSet>(files.mask, [&](std::istream& in) { return io::read_mask(in, space.size()); });
      space.validate();
      const double delta = delta_arg == "auto" ? auto_regularity_delta(space, mask, theta_ceiling)
                                               : io::parse_double(delta_arg);
      if (!(delta > 0.0)) throw Error("delta must be positive");
      const SpaceParams params = estimate_doubling(space);
      const RegularSubset s = estimate_regularity(space, mask, delta);
      fs::create_directories(out_dir);
      io::write_file(out_dir / "estimate.json", estimate_to_json(space, s, params));
      out << "C_d " << io::format_double(params.doubling) << "  theta " << io::format_double(s.theta) << "  delta "
          << io::format_double(s.delta) << '\n';
      return kPass;
    });
  }

  if (*cover_cmd) {
    return guarded(err, [&] {
      Instance inst = load_instance(files, false, false);
      const auto& space = inst.fixture.space;
      inst.cover = build_whitney(space, inst.s);
      if (epsilon_arg == "auto") {
        inst.family = tune_epsilon(space, inst.s, inst.cover, inst.s.delta).family;
      } else {
        inst.family = build_quasi_balls(space, inst.s, inst.cover, io::parse_double(epsilon_arg), inst.s.delta);
      }
      inst.partition = build_partition(space, inst.s, inst.cover);
      fs::create_directories(out_dir);
      write_with(out_dir / "cover.txt", [&](std::ostream& os) { io::write_cover(os, inst.cover); });
      write_with(out_dir / "family.txt", [&](std::ostream& os) { io::write_family(os, inst.family); });
      write_with(out_dir / "phi.txt", [&](std::ostream& os) { io::write_partition(os, inst.partition); });
      out << inst.cover.size() << " Whitney balls, epsilon " << io::format_double(inst.family.epsilon) << '\n';
      return kPass;
    });
  }

  if (*ext_cmd) {
    return guarded(err, [&] {
      Instance inst = load_instance(files, true, true);
      load_fields(inst, files);
      fs::create_directories(out_dir);
      write_with(out_dir / "g.field", [&](std::ostream& os) { io::write_field(os, inst.g); });
      write_with(out_dir / "u_tilde.field", [&](std::ostream& os) { io::write_field(os, inst.bundle.u_tilde); });
      write_with(out_dir / "g_tilde.field", [&](std::ostream& os) { io::write_field(os, *inst.bundle.g_tilde); });
      out << "extended to " << inst.bundle.u_tilde.domain().size() << " points\n";
      return kPass;
    });
  }

  if (*audit_cmd) {
    return guarded(err, [&] {
      RunConfig cfg;
      if (!config_path.empty()) cfg = load_config(config_path);
      if (!p_text.empty()) cfg.p = io::parse_double(p_text);
      if (audit_cmd->count("--alpha")) cfg.alpha_order = alpha_arg;
      if (audit_cmd->count("--audits")) cfg.audits = audit_names;
      NormParams{cfg.p, cfg.alpha_order}.validate();
      Instance inst = load_instance(files, true, true);
      load_fields(inst, files);
      const auto reports = run_audits(inst, cfg);
      fs::create_directories(out_dir);
      io::write_file(out_dir / "reports.json", io::reports_to_json(reports));
      write_with(out_dir / "reports.csv",
                 [&](std::ostream& os) { io::write_csv(os, io::csv_rows(cfg.name, reports)); });
      print_reports(out, reports);
      return exit_for(reports);
    });
  }

  if (*report_cmd) {
    return guarded(err, [&] {
      std::vector<io::CsvRow> rows;
      for (const auto& path : csv_inputs) {
        auto more = read_with<std::vector<io::CsvRow>>(path, [](std::istream& in) { return io::read_csv(in); });
        rows.insert(rows.end(), more.begin(), more.end());
      }
      fs::create_directories(out_dir);
      write_with(out_dir / "reports.csv", [&](std::ostream& os) { io::write_csv(os, rows); });
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const io::CsvRow& r) { return !r.pass; });
      out << rows.size() << " rows, " << failed << " failing\n";
      return failed == 0 ? kPass : kAuditFailure;
    });
  }
  return kUsageError;
}

}  // namespace sobext::cli
