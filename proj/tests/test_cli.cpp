#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oddgeo/cli.hpp"

using namespace oddgeo;
using cli::Json;

namespace {

std::string scenario_path(const std::string& name) { return std::string(ODDGEO_SOURCE_DIR) + "/scenarios/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json structured(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("structured");
  return Json::parse(run(args).out);
}

// Writes `text` to a fresh temporary scenario file.
std::string temp_scenario(const std::string& text) {
  static int counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("oddgeo_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".json");
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("classify exit codes follow --expect") {
  auto ok = run({"classify", scenario_path("contact_darboux.json"), "--expect", "contact"});
  CHECK(ok.code == 0);
  auto mismatch = run({"classify", scenario_path("contact_darboux.json"), "--expect", "cosymplectic"});
  CHECK(mismatch.code == 2);
  CHECK(mismatch.out.find("d(omega): 0.5") != std::string::npos);
  Json rep = structured({"classify", scenario_path("contact_darboux.json"), "--expect", "cosymplectic"});
  CHECK(rep["status"] == "mismatch");
  CHECK(rep["results"]["covariant"]["residuals"]["d(omega)"].get<double>() > 0.1);
  CHECK(run({"classify", scenario_path("contact_darboux.json"), "--expect", "nonsense"}).code == 1);
}

TEST_CASE("classify labels for the bundled scenarios") {
  auto labels = [](const std::string& file) {
    return structured({"classify", scenario_path(file)})["results"]["labels"].get<std::vector<std::string>>();
  };
  auto has = [](const std::vector<std::string>& v, const std::string& l) {
    return std::find(v.begin(), v.end(), l) != v.end();
  };
  auto cos = labels("cosymplectic.json");
  CHECK(has(cos, "cosymplectic"));
  CHECK_FALSE(has(cos, "contact"));
  auto cop = labels("copoisson_flat.json");
  CHECK(has(cop, "coPoisson"));
  CHECK_FALSE(has(cop, "Jacobi"));
  auto acc = labels("acc_darboux.json");
  CHECK(has(acc, "almost-cosymplectic-contact"));
  CHECK(has(acc, "almost-coPoisson-Jacobi"));
  CHECK_FALSE(has(acc, "contact"));
  CHECK_FALSE(has(acc, "cosymplectic"));
}

TEST_CASE("input errors exit with 1 and name the location") {
  auto bad = run({"classify", scenario_path("malformed.json")});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("$.covariant.omega[2]") != std::string::npos);
  CHECK(bad.err.find("offset 4") != std::string::npos);

  const std::vector<std::string> broken{
      "{",                                                                   // not JSON
      R"({"chart": ["t","x","y"], "covariant": {"omega": ["1","0","0"]}})",  // no version
      R"({"version": 2, "darboux": {"n": 1}})",
      R"({"version": 1, "darboux": {"n": 1}, "galilei": {}})",
      R"({"version": 1, "chart": ["t","x"], "covariant": {"omega": ["1","0"], "Omega": [["0","1"],["","0"]]}})",
      R"({"version": 1, "chart": ["t","x","y"], "covariant": {"omega": ["1","0"], "Omega": [["0","0","0"],["","0","1"],["","","0"]]}})",
      R"({"version": 1, "chart": ["t","x","y"], "covariant": {"omega": ["1","0","z"], "Omega": [["0","0","0"],["","0","1"],["","","0"]]}})",
      R"({"version": 1, "darboux": {"n": 1, "s": 2}})",
      R"({"version": 1, "darboux": {"n": 1, "omega_funcs": ["x2"]}})",
      R"({"version": 1, "darboux": {"n": 1}, "domain": [[0, 1]]})",
      R"({"version": 1, "galilei": {"g": [["1","0","0"],["","1","0"],["","","1"]], "m": 0}})",
      R"({"version": 1, "galilei": {"g": [["x10","0","0"],["","1","0"],["","","1"]]}})",
      R"({"version": 1, "einstein": {"g": [["-1","0","0","0"],["","1","0","0"],["","","1","0"],["","","","1"]]}, "domain": [-1, 1]})",
  };
  for (const auto& text : broken) {
    CAPTURE(text);
    auto r = run({"classify", temp_scenario(text)});
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
  }
  CHECK(run({"classify", "/nonexistent/file.json"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"classify", scenario_path("cosymplectic.json"), "--samples", "0"}).code == 1);
  CHECK(run({"classify", scenario_path("cosymplectic.json"), "--format", "xml"}).code == 1);
}

TEST_CASE("structured error reports") {
  Json rep = structured({"classify", scenario_path("malformed.json")});
  CHECK(rep["status"] == "error");
  CHECK(rep["error"].get<std::string>().find("offset 4") != std::string::npos);
}

TEST_CASE("non-regular pairs cannot be dualized") {
  // Omega = 0 has rank 0 < n = 1
  auto path = temp_scenario(
      R"({"version": 1, "chart": ["t","x","y"], "covariant": {"omega": ["1","0","0"], "Omega": [["0","0","0"],["","0","0"],["","","0"]]}})");
  CHECK(run({"dualize", path}).code == 1);
}

TEST_CASE("bracket command") {
  Json rep = structured({"bracket", scenario_path("copoisson_flat.json"), "--f", "t", "--g", "x1", "--jacobi"});
  CHECK(rep["results"]["value"] == "x1");
  CHECK(rep["results"]["sampled"]["values"].size() == 32);
  Json self = structured({"bracket", scenario_path("acc_darboux.json"), "--f", "t*x1 + x3", "--g", "t*x1 + x3"});
  CHECK(self["results"]["sampled"]["max |value|"].get<double>() == 0.0);
  Json jac = structured(
      {"bracket", scenario_path("contact_darboux.json"), "--f", "t*x1", "--g", "x2^2", "--h", "x1 + t", "--jacobi"});
  CHECK(jac["results"]["jacobiator"]["max |value|"].get<double>() <= 1e-9);
  CHECK(jac["results"]["([X_f,X_g] - X_[f,g]).h"]["max |value|"].get<double>() <= 1e-9);
  Json wit = structured(
      {"bracket", scenario_path("copoisson_flat.json"), "--f", "t", "--g", "x1", "--h", "x2", "--jacobi"});
  CHECK(wit["results"]["jacobiator"]["min |value|"].get<double>() == doctest::Approx(1.0));
  CHECK(run({"bracket", scenario_path("cosymplectic.json"), "--f", "t", "--g", "x1"}).code == 1);
  CHECK(run({"bracket", scenario_path("copoisson_flat.json"), "--f", "t +", "--g", "x1"}).code == 1);
  auto no_omega = temp_scenario(
      R"({"version": 1, "chart": ["t","x","y"], "contravariant": {"E": ["1","0","0"], "Lambda": [["0","0","0"],["","0","1"],["","","0"]]}})");
  CHECK(run({"bracket", no_omega, "--f", "t", "--g", "x"}).code == 0);
  CHECK(run({"bracket", no_omega, "--f", "t", "--g", "x", "--omega-defect"}).code == 1);
}

TEST_CASE("dualize command") {
  Json rep = structured({"dualize", scenario_path("cosymplectic.json"), "--roundtrip"});
  CHECK(rep["results"]["dual"]["E"]["t"] == "1");
  CHECK(rep["results"]["roundtrip"].get<double>() <= 1e-12);
  CHECK(rep["results"]["table"]["rows"].size() == 32);
  Json c = structured({"dualize", scenario_path("contact_darboux.json"), "--roundtrip"});
  CHECK(c["results"]["dual - Darboux (E, Lambda)"].get<double>() <= 1e-12);
  Json g = structured({"dualize", scenario_path("galilei_force.json"), "--roundtrip", "--samples", "8"});
  CHECK(g["status"] == "ok");
  CHECK(g["results"]["dual - (E, Lambda)"].get<double>() <= 1e-9);
  Json e = structured({"dualize", scenario_path("einstein_rindler.json"), "--roundtrip", "--samples", "8"});
  CHECK(e["status"] == "ok");
}

TEST_CASE("scenario command") {
  CHECK(run({"scenario", "galilei"}).code == 0);
  Json e = structured({"scenario", "einstein", "--metric", "flat"});
  CHECK(e["status"] == "ok");
  auto cov = e["results"]["covariant labels"].get<std::vector<std::string>>();
  auto con = e["results"]["contravariant labels"].get<std::vector<std::string>>();
  CHECK(std::find(cov.begin(), cov.end(), "contact") != cov.end());
  CHECK(std::find(con.begin(), con.end(), "Jacobi") != con.end());
  CHECK(run({"scenario", "einstein", "--metric", "rindler"}).code == 0);
  CHECK(run({"scenario", "einstein", "--metric", scenario_path("einstein_rindler.json")}).code == 0);
  CHECK(run({"scenario", "galilei", "--metric", scenario_path("galilei_force.json")}).code == 0);
  auto euclid = run({"scenario", "einstein", "--metric", scenario_path("einstein_euclidean.json")});
  CHECK(euclid.code == 1);
  CHECK(euclid.err.find("signature") != std::string::npos);
  CHECK(run({"scenario", "galilei", "--metric", "rindler"}).code == 1);
  CHECK(run({"scenario", "galilei", "--metric", scenario_path("einstein_rindler.json")}).code == 1);
  CHECK(run({"scenario", "minkowski"}).code == 1);
}

TEST_CASE("a failing theorem check exits with 2") {
  // phi not closed: K is not a Galilei connection, d(Omega) != 0
  auto path = temp_scenario(R"({"version": 1, "galilei": {"g": [["1","0","0"],["","1","0"],["","","1"]],
      "phi": [["0","x2","0","0"],["","0","0","0"],["","","0","0"],["","","","0"]]}})");
  Json rep = structured({"scenario", "galilei", "--metric", path});
  CHECK(rep["status"] == "failed");
  CHECK(run({"scenario", "galilei", "--metric", path}).code == 2);
}

TEST_CASE("reports are deterministic and both renderings agree") {
  const std::vector<std::vector<std::string>> commands{
      {"classify", scenario_path("acc_darboux.json"), "--format", "structured"},
      {"dualize", scenario_path("contact_darboux.json"), "--roundtrip", "--format", "structured"},
      {"bracket", scenario_path("copoisson_flat.json"), "--f", "t*x1", "--g", "x2", "--format", "structured"},
      {"scenario", "einstein", "--metric", "rindler", "--seed", "7", "--format", "structured"},
  };
  for (const auto& c : commands) {
    CAPTURE(c[0]);
    auto a = run(c), b = run(c);
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);
    // the text rendering is generated from the same document
    auto text_cmd = c;
    text_cmd.resize(text_cmd.size() - 2);
    CHECK(run(text_cmd).out == cli::render_text(Json::parse(a.out)));
  }
  auto s1 = run({"classify", scenario_path("acc_darboux.json"), "--seed", "1", "--format", "structured"});
  auto s2 = run({"classify", scenario_path("acc_darboux.json"), "--seed", "2", "--format", "structured"});
  CHECK(s1.out != s2.out);
}

TEST_CASE("sampler flags are echoed") {
  Json rep = structured({"classify", scenario_path("cosymplectic.json"), "--samples", "5", "--seed", "9", "--tol", "1e-7"});
  CHECK(rep["sampler"]["samples"] == 5);
  CHECK(rep["sampler"]["seed"] == 9);
  CHECK(rep["sampler"]["tol"].get<double>() == 1e-7);
  CHECK(rep["tool"]["name"] == "oddgeo");
}
