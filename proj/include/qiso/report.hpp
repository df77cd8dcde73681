#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qiso/csv.hpp"

namespace qiso {

struct Assertion {
  std::string invariant;  // module invariant the check instantiates
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct NamedTable {
  std::string description;  // column meanings
  CsvTable table;
};

class Report {
 public:
  std::string experiment;
  nlohmann::json config;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Assertion> assertions;
  std::map<std::string, NamedTable> tables;
  std::map<std::string, std::string> scripts;  // file name -> contents
  std::vector<std::string> notes;
  std::vector<std::string> errors;
  double seconds = 0.0;

  /// Records a pass/fail check with the measured value and the threshold it was held to.
  bool check(std::string invariant, bool passed, double value, double threshold, std::string detail = {});
  void add_table(const std::string& name, CsvTable table, std::string description);
  void note(std::string text) { notes.push_back(std::move(text)); }

  /// Folds another report in, prefixing its invariants and table names.
  void merge(const Report& other, const std::string& prefix);

  bool passed() const;
  std::size_t failures() const;

  nlohmann::json to_json() const;
  std::string summary() const;

  /// report.json, summary.txt, one CSV per table and the plotting scripts.
  void write(const std::filesystem::path& dir) const;
};

}  // namespace qiso
