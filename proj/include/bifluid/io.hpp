#pragma once

#include <string>
#include <vector>

#include "bifluid/diagnostics.hpp"

namespace bifluid {

/// %.17g: enough digits to round-trip any double.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

/// Rows of comma-separated cells behind a header line.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long v);
  CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(bool v);
  CsvWriter& empty();
  void end_row();

  const std::string& str() const { return text_; }

 private:
  void separator();

  std::string text_;
  bool row_open_ = false;
};

std::string fields_csv(const std::vector<State>& states);
std::string energy_csv(const std::vector<EnergyRecord>& records);
std::string estimates_csv(const EstimateReport& report);

/// One aligned line per entry, for reading rather than parsing.
std::string estimates_text(const EstimateReport& report);

/// Snapshots on the uniform mass grids of both components
/// (columns coordinate, t, y, rho1, rho2, u1, u2).
std::string mass_fields_csv(const std::vector<State>& states);

}  // namespace bifluid
