#include "epivax/report.hpp"

#include <fstream>
#include <sstream>

#include "epivax/io.hpp"

namespace epivax {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io-open", "cannot write " + path.string());
  out << text;
}

}  // namespace

void write_sensitivity_table(const std::vector<SensitivityRow>& rows,
                             const std::filesystem::path& path) {
  std::ostringstream os;
  os << "Parameter\tAmount\tInfections (cases)\tVaccination (persons)\tCenters Opened(No.)\t"
        "Infections Change(%)\tVaccination Change(%)\tStatus\n";
  for (const auto& r : rows) {
    os << to_string(r.parameter) << '\t' << format_double(r.multiplier) << '\t'
       << format_double(r.infections) << '\t' << format_double(r.vaccinations) << '\t'
       << r.centers_opened << '\t' << format_double(r.infections_change_pct) << '\t'
       << format_double(r.vaccinations_change_pct) << '\t' << (r.failed ? r.error : "ok") << '\n';
  }
  write_text(path, os.str());
}

std::vector<SensitivityRow> parse_sensitivity_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("io-open", "cannot open " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<SensitivityRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f;
    std::vector<std::string> fields;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() != 8) fail("tsv-schema", "malformed sensitivity row");
    SensitivityRow r;
    auto p = sensitivity_parameter_from(fields[0]);
    if (!p) fail("tsv-schema", "unknown parameter " + fields[0]);
    r.parameter = *p;
    r.multiplier = std::stod(fields[1]);
    r.infections = std::stod(fields[2]);
    r.vaccinations = std::stod(fields[3]);
    r.centers_opened = std::stoi(fields[4]);
    r.infections_change_pct = std::stod(fields[5]);
    r.vaccinations_change_pct = std::stod(fields[6]);
    r.failed = fields[7] != "ok";
    if (r.failed) r.error = fields[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_validation_report(const ValidationReport& rep, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "scope\tregion\tt_statistic\tdof\tp_value\tdegenerate\n";
  os << "national\t-1\t" << format_double(rep.national.t) << '\t' << rep.national.dof << '\t'
     << format_double(rep.national.p_value) << '\t' << (rep.national.degenerate ? 1 : 0) << '\n';
  for (std::size_t j = 0; j < rep.per_region.size(); ++j)
    os << "region\t" << j << '\t' << format_double(rep.per_region[j].t) << '\t'
       << rep.per_region[j].dof << '\t' << format_double(rep.per_region[j].p_value) << '\t'
       << (rep.per_region[j].degenerate ? 1 : 0) << '\n';
  os << "model_total\t-1\t" << format_double(rep.model_total) << "\t0\t0\t0\n";
  os << "actual_total\t-1\t" << format_double(rep.actual_total) << "\t0\t0\t0\n";
  os << "infections_averted\t-1\t" << format_double(rep.actual_total - rep.model_total)
     << "\t0\t0\t0\n";
  write_text(path, os.str());
}

void write_forecast_table(const Forecast& fc, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "period\tpoint\tlower\tupper\n";
  for (int h = 0; h < fc.horizon; ++h)
    os << h + 1 << '\t' << format_double(fc.point[h]) << '\t' << format_double(fc.lower[h]) << '\t'
       << format_double(fc.upper[h]) << '\n';
  write_text(path, os.str());
}

}  // namespace epivax
