#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace edgectl {

/// Shortest round-trip decimal, locale independent ("nan"/"inf" spelled out).
std::string format_number(double value);

/// RFC-4180 style table with a header row. Absent values are empty fields.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  class RowBuilder {
   public:
    explicit RowBuilder(CsvTable& table) : table_(table) {}
    RowBuilder& add(double v);
    RowBuilder& add(std::optional<double> v);
    RowBuilder& add(std::size_t v);
    RowBuilder& add(const std::string& v);
    void done();

   private:
    CsvTable& table_;
    std::vector<std::string> cells_;
  };

  RowBuilder row() { return RowBuilder(*this); }

  void write(std::ostream& out) const;
  std::string str() const;
  /// Writes to `path`; "-" means stdout.
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace edgectl
