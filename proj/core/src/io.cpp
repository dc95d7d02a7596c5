#include "sobext/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

namespace sobext::io {

namespace {

using nlohmann::json;

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

// Next line with content; comments start with '#'.
bool next_line(std::istream& is, std::vector<std::string>& toks) {
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    toks = tokens(line);
    if (!toks.empty()) return true;
  }
  return false;
}

std::size_t parse_index(const std::string& t) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw Error("bad integer '" + t + "'");
  return v;
}

void expect_header(std::istream& is, const std::string& magic, std::vector<std::string>& toks) {
  if (!next_line(is, toks) || toks.size() < 2 || toks[0] != magic || toks[1] != "v1") {
    throw Error("expected '" + magic + " v1' header");
  }
}

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw Error("expected a number in report JSON");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& t) {
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw Error("bad number '" + t + "'");
  return v;
}

// --- space ----------------------------------------------------------------------

void write_space(std::ostream& os, const MetricMeasureSpace& space) {
  const std::size_t n = space.size();
  os << "mms v1 " << n << (space.has_coordinates() ? " coords\n" : " matrix\n");
  os << "w " << format_double(space.window().r_min) << ' ' << format_double(space.window().r_max) << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = static_cast<PointId>(i);
    os << "p " << i;
    if (space.has_coordinates()) {
      for (double c : space.coordinates(p)) os << ' ' << format_double(c);
    }
    os << ' ' << format_double(space.weight(p)) << '\n';
  }
  if (!space.has_coordinates()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        os << "d " << i << ' ' << j << ' '
           << format_double(space.distance(static_cast<PointId>(i), static_cast<PointId>(j))) << '\n';
      }
    }
  }
}

MetricMeasureSpace read_space(std::istream& is) {
  std::vector<std::string> t;
  expect_header(is, "mms", t);
  if (t.size() != 4 || (t[3] != "coords" && t[3] != "matrix")) throw Error("space header must be 'mms v1 <n> <coords|matrix>'");
  const std::size_t n = parse_index(t[2]);
  const bool coords = t[3] == "coords";
  std::optional<ScaleWindow> window;
  std::vector<double> weights(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<double> xs;
  std::vector<double> dist;
  if (!coords) dist.assign(n * n, 0.0);
  int dim = -1;
  while (next_line(is, t)) {
    if (t[0] == "w") {
      if (t.size() != 3) throw Error("window line must be 'w <r_min> <r_max>'");
      window = ScaleWindow{parse_double(t[1]), parse_double(t[2])};
    } else if (t[0] == "p") {
      if (t.size() < 3) throw Error("short point line");
      const std::size_t id = parse_index(t[1]);
      if (id >= n) throw Error("point id " + t[1] + " out of range");
      if (seen[id]) throw Error("duplicate point " + t[1]);
      seen[id] = 1;
      weights[id] = parse_double(t.back());
      if (coords) {
        const int d = static_cast<int>(t.size()) - 3;
        if (d <= 0) throw Error("point line without coordinates");
        if (dim < 0) {
          dim = d;
          xs.assign(n * static_cast<std::size_t>(dim), 0.0);
        } else if (d != dim) {
          throw Error("inconsistent coordinate dimension at point " + t[1]);
        }
        for (int k = 0; k < d; ++k) xs[id * static_cast<std::size_t>(dim) + k] = parse_double(t[2 + k]);
      } else if (t.size() != 3) {
        throw Error("matrix-form point line must be 'p <id> <weight>'");
      }
    } else if (t[0] == "d" && !coords) {
      if (t.size() != 4) throw Error("distance line must be 'd <i> <j> <dist>'");
      const std::size_t i = parse_index(t[1]);
      const std::size_t j = parse_index(t[2]);
      if (i >= n || j >= n) throw Error("distance line references a missing point");
      const double v = parse_double(t[3]);
      dist[i * n + j] = v;
      dist[j * n + i] = v;
    } else {
      throw Error("unexpected line starting with '" + t[0] + "'");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) throw Error("point " + std::to_string(i) + " missing from space file");
  }
  if (coords) return MetricMeasureSpace::from_coordinates(dim, std::move(xs), std::move(weights), window);
  return MetricMeasureSpace::from_matrix(std::move(dist), std::move(weights), window);
}

// --- mask -----------------------------------------------------------------------

void write_mask(std::ostream& os, const PointSet& mask) {
  os << "mask v1\n";
  for (PointId p : mask) os << p << '\n';
}

PointSet read_mask(std::istream& is, std::size_t point_count) {
  std::vector<std::string> t;
  expect_header(is, "mask", t);
  PointSet out;
  while (next_line(is, t)) {
    for (const auto& tok : t) {
      const std::size_t id = parse_index(tok);
      if (id >= point_count) throw Error("mask id " + tok + " out of range");
      out.push_back(static_cast<PointId>(id));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// --- cover ----------------------------------------------------------------------

void write_cover(std::ostream& os, const WhitneyCover& cover) {
  os << "whitney v1\n";
  for (const auto& wb : cover.balls) {
    os << "b " << wb.ball.center << ' ' << format_double(wb.ball.radius) << ' ' << wb.anchor << '\n';
  }
}

WhitneyCover read_cover(std::istream& is, const MetricMeasureSpace& space, const RegularSubset& s) {
  std::vector<std::string> t;
  expect_header(is, "whitney", t);
  std::vector<WhitneyBall> balls;
  while (next_line(is, t)) {
    if (t[0] != "b" || t.size() != 4) throw Error("cover line must be 'b <center> <radius> <anchor>'");
    WhitneyBall wb;
    wb.ball.center = static_cast<PointId>(parse_index(t[1]));
    wb.ball.radius = parse_double(t[2]);
    wb.anchor = static_cast<PointId>(parse_index(t[3]));
    wb.star_radius = 9.0 / 8.0 * wb.ball.radius;
    balls.push_back(wb);
  }
  return assemble_cover(space, s, std::move(balls));
}

// --- family ---------------------------------------------------------------------

void write_family(std::ostream& os, const QuasiBallFamily& family) {
  os << "quasiballs v1 epsilon=" << format_double(family.epsilon) << " delta=" << format_double(family.delta) << '\n';
  for (std::size_t b = 0; b < family.size(); ++b) {
    if (family.sets[b].empty()) continue;
    os << "h " << b;
    for (PointId p : family.sets[b]) os << ' ' << p;
    os << '\n';
  }
}

QuasiBallFamily read_family(std::istream& is, const MetricMeasureSpace& space, const RegularSubset& s,
                            const WhitneyCover& cover) {
  std::vector<std::string> t;
  expect_header(is, "quasiballs", t);
  double eps = -1.0;
  double delta = -1.0;
  for (std::size_t i = 2; i < t.size(); ++i) {
    if (t[i].rfind("epsilon=", 0) == 0) eps = parse_double(t[i].substr(8));
    if (t[i].rfind("delta=", 0) == 0) delta = parse_double(t[i].substr(6));
  }
  if (eps <= 0.0 || delta < 0.0) throw Error("quasiballs header needs epsilon=<e> delta=<d>");
  std::vector<PointSet> sets(cover.size());
  while (next_line(is, t)) {
    if (t[0] != "h" || t.size() < 2) throw Error("family line must be 'h <ball> <ids...>'");
    const std::size_t b = parse_index(t[1]);
    if (b >= cover.size()) throw Error("family references missing ball " + t[1]);
    for (std::size_t i = 2; i < t.size(); ++i) {
      const std::size_t id = parse_index(t[i]);
      if (id >= space.size()) throw Error("family id " + t[i] + " out of range");
      sets[b].push_back(static_cast<PointId>(id));
    }
    std::sort(sets[b].begin(), sets[b].end());
  }
  return family_from_sets(space, s, cover, eps, delta, std::move(sets));
}

void write_partition(std::ostream& os, const Partition& partition) {
  os << "phi v1\n";
  for (std::size_t x = 0; x < partition.entries.size(); ++x) {
    for (const auto& e : partition.entries[x]) os << e.ball << ' ' << x << ' ' << format_double(e.value) << '\n';
  }
}

// --- fields ---------------------------------------------------------------------

void write_field(std::ostream& os, const ScalarField& field) {
  os << "field v1\n";
  for (PointId p : field.domain()) os << p << ' ' << format_double(field.at(p)) << '\n';
}

ScalarField read_field(std::istream& is, std::size_t point_count) {
  std::vector<std::string> t;
  expect_header(is, "field", t);
  std::vector<std::pair<PointId, double>> rows;
  while (next_line(is, t)) {
    if (t.size() != 2) throw Error("field line must be '<id> <value>'");
    const std::size_t id = parse_index(t[0]);
    if (id >= point_count) throw Error("field id " + t[0] + " out of range");
    rows.emplace_back(static_cast<PointId>(id), parse_double(t[1]));
  }
  std::sort(rows.begin(), rows.end());
  PointSet dom;
  std::vector<double> vals;
  for (const auto& [id, v] : rows) {
    if (!dom.empty() && dom.back() == id) throw Error("duplicate field id " + std::to_string(id));
    dom.push_back(id);
    vals.push_back(v);
  }
  return ScalarField(point_count, std::move(dom), std::move(vals));
}

// --- reports --------------------------------------------------------------------

std::string reports_to_json(const std::vector<AuditReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json o;
    o["name"] = r.name;
    o["observed_constant"] = number_or_string(r.observed_constant);
    o["ceiling"] = r.ceiling ? number_or_string(*r.ceiling) : json(nullptr);
    o["pass"] = r.pass;
    if (r.witness) {
      json w;
      w["points"] = r.witness->points;
      w["radius"] = r.witness->radius ? json(*r.witness->radius) : json(nullptr);
      w["ball"] = r.witness->ball ? json(*r.witness->ball) : json(nullptr);
      w["lhs"] = number_or_string(r.witness->lhs);
      w["rhs"] = number_or_string(r.witness->rhs);
      o["witness"] = w;
    } else {
      o["witness"] = nullptr;
    }
    o["refinement_ratio"] = r.refinement_ratio ? number_or_string(*r.refinement_ratio) : json(nullptr);
    o["instances"] = r.instances;
    o["note"] = r.note;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<AuditReport> reports_from_json(const std::string& text) {
  std::vector<AuditReport> out;
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("report JSON: ") + e.what());
  }
  if (!arr.is_array()) throw Error("report JSON must be an array");
  for (const auto& o : arr) {
    AuditReport r;
    r.name = o.at("name").get<std::string>();
    r.observed_constant = number_from(o.at("observed_constant"));
    if (!o.at("ceiling").is_null()) r.ceiling = number_from(o.at("ceiling"));
    r.pass = o.at("pass").get<bool>();
    if (o.contains("witness") && !o["witness"].is_null()) {
      const auto& w = o["witness"];
      Witness wt;
      wt.points = w.at("points").get<std::vector<PointId>>();
      if (!w.at("radius").is_null()) wt.radius = w["radius"].get<double>();
      if (!w.at("ball").is_null()) wt.ball = w["ball"].get<std::size_t>();
      wt.lhs = number_from(w.at("lhs"));
      wt.rhs = number_from(w.at("rhs"));
      r.witness = wt;
    }
    if (o.contains("refinement_ratio") && !o["refinement_ratio"].is_null()) {
      r.refinement_ratio = number_from(o["refinement_ratio"]);
    }
    if (o.contains("instances")) r.instances = o["instances"].get<std::size_t>();
    if (o.contains("note")) r.note = o["note"].get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CsvRow> csv_rows(const std::string& fixture, const std::vector<AuditReport>& reports) {
  std::vector<CsvRow> rows;
  for (const auto& r : reports) {
    rows.push_back({fixture, r.name, r.observed_constant, r.ceiling, r.pass, r.refinement_ratio});
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << "fixture,audit,observed_constant,ceiling,pass,refinement_ratio\n";
  for (const auto& r : rows) {
    os << r.fixture << ',' << r.audit << ',' << format_double(r.observed_constant) << ','
       << (r.ceiling ? format_double(*r.ceiling) : "") << ',' << (r.pass ? "true" : "false") << ','
       << (r.refinement_ratio ? format_double(*r.refinement_ratio) : "") << '\n';
  }
}

std::vector<CsvRow> read_csv(std::istream& is) {
  std::vector<CsvRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("fixture,", 0) == 0) continue;
    }
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw Error("CSV row must have 6 fields: " + line);
    CsvRow r;
    r.fixture = f[0];
    r.audit = f[1];
    r.observed_constant = parse_double(f[2]);
    if (!f[3].empty()) r.ceiling = parse_double(f[3]);
    if (f[4] != "true" && f[4] != "false") throw Error("CSV pass field must be true or false");
    r.pass = f[4] == "true";
    if (!f[5].empty()) r.refinement_ratio = parse_double(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace sobext::io
