#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sobext/audit.hpp"
#include "sobext/partition.hpp"
#include "sobext/quasi_balls.hpp"
#include "sobext/space.hpp"
#include "sobext/whitney.hpp"

namespace sobext::io {

/// Shortest decimal that reads back to the same double; "inf"/"-inf"/"nan"
/// for non-finite values.
std::string format_double(double v);
double parse_double(const std::string& token);

// mms v1 <n> <coords|matrix>
void write_space(std::ostream& os, const MetricMeasureSpace& space);
MetricMeasureSpace read_space(std::istream& is);

// mask v1
void write_mask(std::ostream& os, const PointSet& mask);
PointSet read_mask(std::istream& is, std::size_t point_count);

// whitney v1
void write_cover(std::ostream& os, const WhitneyCover& cover);
WhitneyCover read_cover(std::istream& is, const MetricMeasureSpace& space, const RegularSubset& s);

// quasiballs v1 epsilon=<e> delta=<d>
void write_family(std::ostream& os, const QuasiBallFamily& family);
QuasiBallFamily read_family(std::istream& is, const MetricMeasureSpace& space, const RegularSubset& s,
                            const WhitneyCover& cover);

// phi v1
void write_partition(std::ostream& os, const Partition& partition);

// field v1
void write_field(std::ostream& os, const ScalarField& field);
ScalarField read_field(std::istream& is, std::size_t point_count);

/// JSON array of report objects.
std::string reports_to_json(const std::vector<AuditReport>& reports);
std::vector<AuditReport> reports_from_json(const std::string& text);

struct CsvRow {
  std::string fixture;
  std::string audit;
  double observed_constant = 0.0;
  std::optional<double> ceiling;
  bool pass = true;
  std::optional<double> refinement_ratio;
};

std::vector<CsvRow> csv_rows(const std::string& fixture, const std::vector<AuditReport>& reports);
void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);
std::vector<CsvRow> read_csv(std::istream& is);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sobext::io
