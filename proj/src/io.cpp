#include "bifluid/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bifluid/lagrangian.hpp"

namespace bifluid {

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // print -0 as 0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename '" + tmp.string() + "': " + ec.message());
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (row_open_) text_ += ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  text_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(long v) {
  separator();
  text_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  separator();
  if (v.find_first_of(",\"\n") == std::string::npos) {
    text_ += v;
  } else {
    text_ += '"';
    for (char c : v) {
      if (c == '"') text_ += '"';
      text_ += c;
    }
    text_ += '"';
  }
  return *this;
}

CsvWriter& CsvWriter::cell(bool v) { return cell(std::string(v ? "true" : "false")); }

CsvWriter& CsvWriter::empty() {
  separator();
  return *this;
}

void CsvWriter::end_row() {
  text_ += '\n';
  row_open_ = false;
}

std::string fields_csv(const std::vector<State>& states) {
  CsvWriter csv({"t", "x", "rho1", "rho2", "u1", "u2"});
  for (const auto& s : states) {
    const int cells = s.cells();
    for (std::size_t k = 0; k < s.size(); ++k) {
      csv.cell(s.t).cell(static_cast<double>(k) / cells);
      csv.cell(s.rho[0][k]).cell(s.rho[1][k]).cell(s.u[0][k]).cell(s.u[1][k]);
      csv.end_row();
    }
  }
  return csv.str();
}

std::string energy_csv(const std::vector<EnergyRecord>& records) {
  CsvWriter csv({"t", "E", "D", "D_int"});
  for (const auto& r : records) {
    csv.cell(r.t).cell(r.E).cell(r.D).cell(r.D_int);
    csv.end_row();
  }
  return csv.str();
}

std::string estimates_csv(const EstimateReport& report) {
  CsvWriter csv({"name", "bound", "observed", "slack", "pass"});
  for (const auto& e : report.entries) {
    csv.cell(e.name);
    if (e.bound) csv.cell(*e.bound);
    else csv.empty();
    csv.cell(e.observed);
    if (e.slack) csv.cell(*e.slack);
    else csv.empty();
    csv.cell(e.pass);
    csv.end_row();
  }
  return csv.str();
}

std::string estimates_text(const EstimateReport& report) {
  std::size_t width = 4;
  for (const auto& e : report.entries) width = std::max(width, e.name.size());
  std::string out;
  char buf[256];
  for (const auto& e : report.entries) {
    const std::string bound = e.bound ? format_double(*e.bound) : "-";
    std::snprintf(buf, sizeof buf, "%-*s  %-4s  observed %-24s  bound %-24s", static_cast<int>(width), e.name.c_str(),
                  e.pass ? "ok" : "FAIL", format_double(e.observed).c_str(), bound.c_str());
    out += buf;
    if (!e.note.empty()) out += "  " + e.note;
    out += '\n';
  }
  return out;
}

std::string mass_fields_csv(const std::vector<State>& states) {
  CsvWriter csv({"coordinate", "t", "y", "rho1", "rho2", "u1", "u2"});
  for (int m = 0; m < 2; ++m) {
    const std::string name = "y" + std::to_string(m + 1);
    for (const auto& s : states) {
      const MassChart chart = build_chart(s, m);
      const int n_y = s.cells();
      const Field y = mass_grid(chart, n_y);
      const std::array<Field, 4> f{resample(s.rho[0], chart, n_y), resample(s.rho[1], chart, n_y),
                                   resample(s.u[0], chart, n_y), resample(s.u[1], chart, n_y)};
      for (std::size_t j = 0; j < y.size(); ++j) {
        csv.cell(name).cell(s.t).cell(y[j]);
        for (const auto& col : f) csv.cell(col[j]);
        csv.end_row();
      }
    }
  }
  return csv.str();
}

}  // namespace bifluid
