#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qiso/config.hpp"
#include "qiso/csv.hpp"
#include "qiso/error.hpp"
#include "qiso/experiments.hpp"

using namespace qiso;

namespace {
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}
}  // namespace

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CsvTable t({"a", "b", "c"});
  t.add(1.5, std::size_t{2}, "x");
  CHECK(t.str() == "a,b,c\n1.5,2,x\n");
  CHECK_THROWS(t.add(1.0));
}

TEST_CASE("defaults are valid and round trip through json") {
  const ExperimentConfig c;
  CHECK(c.problems().empty());
  const nlohmann::json j = c;
  const ExperimentConfig back = j.get<ExperimentConfig>();
  CHECK(nlohmann::json(back) == j);
  CHECK(back.grid.fine().n == 15999);
  CHECK(j.at("sweep").at("count") == 12);
}

TEST_CASE("partial configs fill in defaults") {
  const auto c = nlohmann::json::parse(R"({"experiment": "spectrum", "potential": {"t": 0.0, "eps": 0.0}, "h_list": [0.5]})")
                     .get<ExperimentConfig>();
  CHECK(c.experiment == "spectrum");
  CHECK(c.potential.t == 0.0);
  CHECK(c.h_list == std::vector<double>{0.5});
  CHECK(c.grid.L == 8.0);
}

TEST_CASE("validation lists every problem before running") {
  ExperimentConfig c;
  c.experiment = "nonsense";
  c.grid.n = 2;
  c.h_list = {-1.0};
  c.potential.t = 1e6;
  c.E_window = 100.0;
  const auto p = c.problems();
  CHECK(p.size() >= 4);
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  CHECK_THROWS_AS(run(c), PreconditionError);
}

TEST_CASE("spectrum experiment on the harmonic oscillator") {
  ExperimentConfig c;
  c.experiment = "spectrum";
  c.potential = PotentialSpec::harmonic();
  c.grid.n = 1999;
  c.h_list = {1.0};
  c.E_window = 10.0;
  const Report r = run(c);
  CHECK(r.errors.empty());
  REQUIRE(r.tables.count("spectrum") == 1);
  const CsvTable& t = r.tables.at("spectrum").table;
  CHECK(t.size() == 5);
  CHECK(std::stod(t.rows()[2][2]) == doctest::Approx(5.0).epsilon(1e-7));
  for (const auto& a : r.assertions) CHECK_FALSE(a.invariant.empty());

  const auto dir = std::filesystem::temp_directory_path() / "qiso_cli_test";
  std::filesystem::remove_all(dir);
  r.write(dir / "a");
  run(c).write(dir / "b");
  CHECK(slurp(dir / "a" / "spectrum.csv") == slurp(dir / "b" / "spectrum.csv"));
  CHECK(std::filesystem::exists(dir / "a" / "report.json"));
  CHECK(std::filesystem::exists(dir / "a" / "plot_spectrum.py"));
  const auto j = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
  CHECK(j.at("tables").at("spectrum").at("columns").size() == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reflection pair sweep flags all gaps below the floor") {
  ExperimentConfig c;
  c.experiment = "gap-sweep";
  c.potential.t = 0.0;
  c.grid.n = 1999;
  c.sweep.count = 4;
  c.sweep.diagnostic_E.clear();
  const Report r = run(c);
  CHECK(r.passed());
  bool flagged = false;
  for (const auto& a : r.assertions) flagged |= a.invariant.find("below noise floor") != std::string::npos && a.passed;
  CHECK(flagged);
}

TEST_CASE("report status") {
  Report r;
  r.check("x", true, 1.0, 0.0);
  CHECK(r.passed());
  r.check("y", false, 1.0, 0.0);
  CHECK_FALSE(r.passed());
  CHECK(r.failures() == 1);
  Report e;
  e.errors.push_back("boom");
  CHECK_FALSE(e.passed());
  Report m;
  m.merge(r, "sub");
  CHECK(m.assertions.size() == 2);
  CHECK(m.assertions[0].invariant == "sub: x");
}
