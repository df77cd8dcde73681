#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace qiso {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  template <class... Cells>
  void add(const Cells&... cells) {
    add_row({cell(cells)...});
  }
  void add_row(std::vector<std::string> row);

  void write(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;
  std::string str() const;

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const char* v) { return v; }
  static std::string cell(const std::string& v) { return v; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace qiso
