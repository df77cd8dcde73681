#include "qiso/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace qiso {

namespace {

std::string substitute_prefix(std::string script, const std::string& prefix) {
  const std::string token = "@PREFIX@";
  for (auto pos = script.find(token); pos != std::string::npos; pos = script.find(token, pos + prefix.size())) {
    script.replace(pos, token.size(), prefix);
  }
  return script;
}

}  // namespace

bool Report::check(std::string invariant, bool passed, double value, double threshold,
                   std::string detail) {
  assertions.push_back({std::move(invariant), passed, value, threshold, std::move(detail)});
  return passed;
}

void Report::add_table(const std::string& name, CsvTable table, std::string description) {
  tables[name] = NamedTable{std::move(description), std::move(table)};
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (auto a : other.assertions) {
    a.invariant = prefix + ": " + a.invariant;
    assertions.push_back(std::move(a));
  }
  for (const auto& [name, t] : other.tables) tables[prefix + "_" + name] = t;
  for (const auto& [name, s] : other.scripts) scripts[name] = substitute_prefix(s, prefix + "_");
  for (const auto& n : other.notes) notes.push_back(prefix + ": " + n);
  for (const auto& e : other.errors) errors.push_back(prefix + ": " + e);
  results[prefix] = other.results;
}

bool Report::passed() const { return errors.empty() && failures() == 0; }

std::size_t Report::failures() const {
  return static_cast<std::size_t>(
      std::count_if(assertions.begin(), assertions.end(), [](const Assertion& a) { return !a.passed; }));
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config"] = config;
  j["passed"] = passed();
  j["seconds"] = seconds;
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : assertions) {
    j["assertions"].push_back({{"invariant", a.invariant},
                               {"passed", a.passed},
                               {"value", a.value},
                               {"threshold", a.threshold},
                               {"detail", a.detail}});
  }
  j["tables"] = nlohmann::json::object();
  for (const auto& [name, t] : tables) {
    j["tables"][name] = {{"file", name + ".csv"}, {"columns", t.table.columns()}, {"description", t.description}};
  }
  j["results"] = results;
  j["notes"] = notes;
  j["errors"] = errors;
  return j;
}

std::string Report::summary() const {
  std::ostringstream os;
  os << "experiment " << experiment << ": " << (passed() ? "PASS" : "FAIL") << " ("
     << assertions.size() - failures() << "/" << assertions.size() << " assertions)\n";
  for (const auto& a : assertions) {
    os << (a.passed ? "  PASS " : "  FAIL ") << a.invariant;
    if (!a.detail.empty()) os << " | " << a.detail;
    os << '\n';
  }
  for (const auto& n : notes) os << "  note: " << n << '\n';
  for (const auto& e : errors) os << "  error: " << e << '\n';
  return os.str();
}

void Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    out << to_json().dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "summary.txt");
    out << summary();
  }
  for (const auto& [name, t] : tables) t.table.save(dir / (name + ".csv"));
  for (const auto& [name, body] : scripts) {
    std::ofstream out(dir / name);
    out << substitute_prefix(body, "");
  }
}

}  // namespace qiso
