#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "twomode/analytics.hpp"
#include "twomode/ensemble.hpp"

namespace twomode::cli {

using json = nlohmann::ordered_json;

/// %.12g, the CSV number format.
std::string format_number(double value);

json to_json(const Momentum& k);
Momentum momentum_from_json(const json& j);

json to_json(const StatReport& report);
/// Throws ParameterError("report", ...) on malformed input.
StatReport stat_report_from_json(const json& j);

json to_json(const ComparisonVerdict& verdict);
json to_json(const CovReport& report);

/// One header line, comma separated, numbers via format_number.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Cells are already formatted; the width must match the header.
  void add_row(std::vector<std::string> cells);

  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace twomode::cli
