#include "twomode_cli/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "twomode/error.hpp"

namespace twomode::cli {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

json to_json(const Momentum& k) { return json::array({k.x(), k.y(), k.z()}); }

Momentum momentum_from_json(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) throw ParameterError("report", "momentum must be an array of 1-3 numbers");
  Momentum k;
  for (std::size_t i = 0; i < j.size(); ++i) k.v[i] = j[i].get<double>();
  return k;
}

namespace {

json quantity(const StatQuantity& q) { return {{"value", q.value}, {"uncertainty", q.uncertainty}}; }

StatQuantity quantity_from(const json& j, const char* name) {
  if (!j.contains(name)) throw ParameterError("report", std::string("point is missing ") + name);
  const auto& q = j.at(name);
  return {q.at("value").get<double>(), q.at("uncertainty").get<double>()};
}

Provenance provenance_from(const std::string& s) {
  if (s == "closed") return Provenance::closed;
  if (s == "exact") return Provenance::exact;
  if (s == "montecarlo") return Provenance::montecarlo;
  throw ParameterError("report", "unknown provenance '" + s + "'");
}

}  // namespace

json to_json(const StatReport& report) {
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"k", to_json(p.k)},
                      {"mean", quantity(p.mean)},
                      {"ensemble_cov", quantity(p.ensemble_cov)},
                      {"quantum_cov_avg", quantity(p.quantum_cov_avg)},
                      {"total_cov", quantity(p.total_cov)}});
  }
  return {{"provenance", std::string(to_string(report.provenance))},
          {"N", report.spec.total()},
          {"n", report.spec.dim()},
          {"samples", report.samples},
          {"points", points}};
}

StatReport stat_report_from_json(const json& j) {
  try {
    StatReport r{SubspaceSpec(j.at("N").get<int>(), j.at("n").get<int>()),
                 provenance_from(j.at("provenance").get<std::string>()),
                 {},
                 j.value("samples", std::size_t{0})};
    for (const auto& p : j.at("points")) {
      StatPoint sp;
      sp.k = momentum_from_json(p.at("k"));
      sp.mean = quantity_from(p, "mean");
      sp.ensemble_cov = quantity_from(p, "ensemble_cov");
      sp.quantum_cov_avg = quantity_from(p, "quantum_cov_avg");
      sp.total_cov = quantity_from(p, "total_cov");
      r.points.push_back(sp);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParameterError("report", std::string("malformed report: ") + e.what());
  }
}

namespace {

json deviation(const Deviation& d) {
  return {{"index", d.index},
          {"quantity", d.quantity},
          {"absolute", d.absolute},
          {"normalized", d.normalized},
          {"within", d.within}};
}

}  // namespace

json to_json(const ComparisonVerdict& verdict) {
  json devs = json::array();
  for (const auto& d : verdict.deviations) devs.push_back(deviation(d));
  return {{"pass", verdict.pass}, {"worst", deviation(verdict.worst)}, {"deviations", devs}};
}

json to_json(const CovReport& report) {
  json j = {{"k", report.k.x()},
            {"mean", report.mean},
            {"ensemble_cov", report.ensemble_cov},
            {"quantum_cov_avg", report.quantum_cov_avg},
            {"provenance", std::string(to_string(report.provenance))}};
  if (report.breakdown) {
    const auto& b = *report.breakdown;
    j["breakdown"] = {{"diag", b.diag},  {"off", b.off},   {"c30", b.c.c30},
                      {"c12", b.c.c12}, {"c04", b.c.c04}, {"c03", b.c.c03}};
  }
  return j;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CSV row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    if (!f.flush()) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParameterError("path", "cannot read " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace twomode::cli
