#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sobext/audit.hpp"
#include "sobext/extension.hpp"
#include "sobext/generators.hpp"
#include "sobext/maximal.hpp"
#include "sobext/partition.hpp"
#include "sobext/quasi_balls.hpp"
#include "sobext/space.hpp"
#include "sobext/whitney.hpp"

namespace sobext {

struct GeneratorSpec {
  std::string kind;  // grid | fat_cantor | fat_sierpinski
  int level = 0;
  int cells = 0;
  int dims = 1;
  std::vector<int> extents;       // grid only
  double spacing = 1.0;           // grid only
  std::vector<double> schedule;   // removed fraction per step; empty = default
};

struct InputFunction {
  std::string kind = "coordinate";  // constant | coordinate | random | indicator
  double value = 1.0;               // constant
  int axis = 0;                     // coordinate
  std::optional<std::uint64_t> seed;  // random; falls back to the run seed
  PointSet ids;                     // indicator of a sub-mask
  std::optional<Ball> ball;         // indicator of S cap ball
};

struct RunConfig {
  std::string name = "run";
  std::optional<GeneratorSpec> generator;
  std::filesystem::path space_file;

  enum class MaskSource { generator, file, all, ids };
  MaskSource mask_source = MaskSource::generator;
  std::filesystem::path mask_file;
  PointSet mask_ids;

  double p = 2.0;
  double alpha_order = 1.0;
  enum class DeltaMode { automatic, recommended, value };
  DeltaMode delta_mode = DeltaMode::automatic;
  double delta = 0.0;
  std::optional<double> epsilon;  // nullopt = tuned
  double theta_ceiling = 32.0;
  double comparability_ceiling = 64.0;

  InputFunction input;
  std::vector<std::string> audits{"all"};
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  /// Generator of the next refinement level (same geometry, finer cells).
  std::optional<GeneratorSpec> refine;
};

/// Parses a JSON run configuration; relative file paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Every audit group name accepted in "audits".
const std::vector<std::string>& audit_groups();

/// Space plus mask from a generator, a file pair, or both.
Fixture load_fixture(const RunConfig& cfg, const std::optional<GeneratorSpec>& generator);

/// The scale used for S: explicit, four cell diameters, or the automatic choice.
double resolve_delta(const RunConfig& cfg, const Fixture& fixture);

ScalarField make_input(const RunConfig& cfg, const MetricMeasureSpace& space, const PointSet& s);

/// One fully built extension problem.
struct Instance {
  Fixture fixture;
  SpaceParams params;
  RegularSubset s;
  WhitneyCover cover;
  QuasiBallFamily family;
  Partition partition;
  ScalarField u;
  ScalarField g;
  ExtensionBundle bundle;

  ExtensionContext context() const { return {fixture.space, s, cover, family, partition}; }
};

Instance build_instance(const RunConfig& cfg, const std::optional<GeneratorSpec>& generator);

/// Runs the configured audit groups; sorted by name.
std::vector<AuditReport> run_audits(const Instance& inst, const RunConfig& cfg);

/// Attaches fine / coarse ratios to `coarse` by audit name.
void attach_refinement(std::vector<AuditReport>& coarse, const std::vector<AuditReport>& fine);

struct PipelineResult {
  int exit_code = 0;
  std::vector<AuditReport> reports;
  std::vector<AuditReport> refined_reports;
};

/// Thrown with the failing stage's name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Writes space/mask/cover/family/partition/field dumps of an instance into `dir`.
void write_instance(const Instance& inst, const std::filesystem::path& dir);

/// Full chain; writes dumps and reports.json / reports.csv under output_dir
/// when `write_outputs` is set. Exit code 0 iff every report passes.
PipelineResult run_pipeline(const RunConfig& cfg, bool write_outputs = true);

}  // namespace sobext
