#include "qiso/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qiso {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " cells, expected " +
                                std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace qiso
