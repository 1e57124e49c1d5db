#include "edgectl/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "edgectl/types.hpp"

namespace edgectl {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << quote(cells[i]);
  }
  out << '\n';
}

}  // namespace

CsvTable::RowBuilder& CsvTable::RowBuilder::add(double v) {
  cells_.push_back(format_number(v));
  return *this;
}

CsvTable::RowBuilder& CsvTable::RowBuilder::add(std::optional<double> v) {
  cells_.push_back(v ? format_number(*v) : std::string());
  return *this;
}

CsvTable::RowBuilder& CsvTable::RowBuilder::add(std::size_t v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::RowBuilder& CsvTable::RowBuilder::add(const std::string& v) {
  cells_.push_back(v);
  return *this;
}

void CsvTable::RowBuilder::done() {
  if (cells_.size() != table_.header_.size())
    throw ConfigError("CSV row has " + std::to_string(cells_.size()) + " cells, header has " +
                      std::to_string(table_.header_.size()));
  table_.rows_.push_back(std::move(cells_));
  cells_.clear();
}

void CsvTable::write(std::ostream& out) const {
  write_line(out, header_);
  for (const auto& r : rows_) write_line(out, r);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void CsvTable::save(const std::string& path) const {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  write(file);
  if (!file) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace edgectl
