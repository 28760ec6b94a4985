#include <doctest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("bsfwm_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + BSFWM_EXE + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return (scratch() / name).string(); }

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& file, bool comments) {
  std::vector<std::string> out;
  std::istringstream in(slurp(file));
  for (std::string l; std::getline(in, l);) {
    if ((l.rfind("#", 0) == 0) == comments) out.push_back(l);
  }
  return out;
}

// The embedded config of a CSV output, as an INI file.
std::string csv_config(const std::string& file) {
  std::string ini;
  for (const auto& l : lines(file, true)) {
    if (l.rfind("#@ ", 0) == 0) ini += l.substr(3) + "\n";
  }
  return ini;
}

void write(const std::string& file, const std::string& text) { std::ofstream(file, std::ios::binary) << text; }

}  // namespace

TEST_CASE("successful run writes a self-describing table") {
  const auto out = path("map.csv");
  REQUIRE(run("phasematch --q-min 900 --q-max 1000 --q-step 100 --s-min 1100 --s-max 1200 --s-step 100 --out " +
              out) == 0);
  const auto header = lines(out, true);
  const auto body = lines(out, false);
  REQUIRE(body.size() == 5);
  CHECK(body[0].rfind("lambda_q_nm,lambda_s_nm,", 0) == 0);
  CHECK(header.at(0) == "# schema = bsfwm.phasematch/1");
  CHECK(header.at(1).rfind("# tool_version = ", 0) == 0);
  CHECK(header.at(2).find("nm") != std::string::npos);
  CHECK(slurp(out).find("# resolved.pump_nm = ") != std::string::npos);
  CHECK(fs::exists(path("map.loci.json")));
}

TEST_CASE("domain and config errors exit 2 without output") {
  const auto out = path("bad.csv");
  fs::remove(out);
  CHECK(run("dispersion --ratio 0.9 --out " + out) == 2);
  CHECK(run("dispersion --lambda-min 900 --lambda-max 800 --out " + out) == 2);
  CHECK(run("envelope --target 5000 --out " + out) == 2);
  CHECK(run("dispersion --seedless --out " + out) == 2);
  CHECK(run("dispersion --format xml --out " + out) == 2);
  CHECK(run("compensate --fractions=0.5 --out " + out) == 2);
  CHECK(run("symmetry-map --pitch-min 0.8 --pitch-max 0.8 --ratio-min 0.9 --ratio-max 0.9 --out " + out) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("solver failure exits 3 without output") {
  const auto out = path("nosol.csv");
  fs::remove(out);
  CHECK(run("compensate --pitch 0.8 --ratio 0.7 --fractions=0 --out " + out) == 3);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("compensation curve has one row per fraction") {
  const auto out = path("comp.csv");
  REQUIRE(run("compensate --fractions=-0.01,0,0.01 --out " + out) == 0);
  const auto body = lines(out, false);
  REQUIRE(body.size() == 4);
  CHECK(body[2].rfind("0,pitch,1.78,0.437,", 0) == 0);
  CHECK(body[2].find(",0,ok") != std::string::npos);
}

TEST_CASE("single-cell sweep") {
  const auto out = path("cell.csv");
  REQUIRE(run("symmetry-map --pitch-min 1.39 --pitch-max 1.39 --ratio-min 0.55 --ratio-max 0.55 --out " + out) ==
          0);
  const auto body = lines(out, false);
  REQUIRE(body.size() == 2);
  CHECK(body[0] == "pitch_um,d_over_pitch,zdw_um,bandwidth_um,status");
  CHECK(body[1].rfind("1.39,0.55,", 0) == 0);
}

TEST_CASE("contour sidecar follows the requested levels") {
  const auto out = path("sweep.json");
  REQUIRE(run("symmetry-map --format json --pitch-min 1.6 --pitch-max 2.0 --pitch-step 0.1 --ratio-min 0.4 "
              "--ratio-max 0.5 --ratio-step 0.025 --threshold 1000 --levels 0.85,0.9,0.95 --out " +
              out) == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc.at("schema") == "bsfwm.symmetry-map/1");
  CHECK(doc.at("data").at("cells").size() == 25);
  const auto contours = nlohmann::json::parse(slurp(path("sweep.contours.json")));
  CHECK(contours.at("data").at("levels").size() == 3);
}

TEST_CASE("embedded config reproduces the output byte for byte") {
  SUBCASE("csv") {
    const auto first = path("env1.csv");
    REQUIRE(run("envelope --s-min 900 --s-max 1000 --s-step 25 --fwhm 3 --out " + first) == 0);
    write(path("env.ini"), csv_config(first));
    const auto second = path("env2.csv");
    REQUIRE(run("--config " + path("env.ini") + " envelope --out " + second) == 0);
    CHECK(slurp(first) == slurp(second));
  }
  SUBCASE("json") {
    const auto first = path("comp1.json");
    REQUIRE(run("compensate --format json --axis ratio --fractions=-0.01,0.01 --out " + first) == 0);
    const auto doc = nlohmann::json::parse(slurp(first));
    write(path("comp.ini"), doc.at("config_ini").get<std::string>());
    const auto second = path("comp2.json");
    REQUIRE(run("compensate --config " + path("comp.ini") + " --format json --out " + second) == 0);
    CHECK(slurp(first) == slurp(second));
  }
  SUBCASE("flags override the file") {
    write(path("over.ini"), "[dispersion]\nlambda-min = 800\nlambda-max = 900\nlambda-step = 50\n");
    const auto out = path("over.csv");
    REQUIRE(run("--config " + path("over.ini") + " dispersion --lambda-max 850 --out " + out) == 0);
    CHECK(lines(out, false).size() == 3);
  }
}
