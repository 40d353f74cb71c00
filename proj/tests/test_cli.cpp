#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "geoobs/cli.hpp"
#include "geoobs/harness.hpp"
#include "geoobs/surface_io.hpp"

using namespace geoobs;
namespace fs = std::filesystem;

namespace {

struct Tmp {
  fs::path dir;
  Tmp() {
    dir = fs::temp_directory_path() / "geoobs_test_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Tmp() { fs::remove_all(dir); }
  std::string put(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name, std::ios::binary) << text;
    return (dir / name).string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "geoobs");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kG = R"({"g":{"order":12,"terms":[{"i":0,"j":1,"c":0.5},{"i":2,"j":0,"c":1.0}]}})";
const char* kH = R"({"g":{"order":12,"terms":[{"i":0,"j":1,"c":-0.5},{"i":2,"j":0,"c":1.0},{"i":3,"j":0,"c":1.0}]}})";
const char* kSaddle =
    R"({"g":{"order":12,"terms":[{"i":2,"j":0,"c":1.0},{"i":0,"j":2,"c":-1.0},{"i":3,"j":0,"c":0.3}]}})";

}  // namespace

TEST_CASE("classify two surfaces prints JSON") {
  Tmp t;
  auto r = cli({"classify", "--surface", t.put("g.json", kG), "--surface2", t.put("h.json", kH)});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["kind"] == "two_surface");
  CHECK(j["M"] == 3);
  CHECK(j["N"] == 2);
  CHECK(j["N_tilde"] == 2);
  CHECK(j["aM"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(j["case_label"] == "MainAlternating");
  CHECK(j["run"]["subcommand"] == "classify");
}

TEST_CASE("classify one saddle reports theta0 and a2 samples") {
  Tmp t;
  auto r = cli({"classify", "--surface", t.put("s.json", kSaddle), "--delta", "0.1"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["shape"] == "Saddle");
  CHECK(j["theta0"].get<double>() == doctest::Approx(std::atan(1.0)));
  CHECK(j["saddle"]["a2_samples"].size() == 9);
  CHECK(j["wedge"]["sectors"].size() == 4);
  CHECK(j["run"]["delta"] == 0.1);
}

TEST_CASE("negative eps is a validation error naming eps") {
  Tmp t;
  auto r = cli({"trace", "--surface", t.put("g.json", kG), "--dir", "0.0", "--eps", "-1"});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  auto e = nlohmann::json::parse(r.err);
  CHECK(e["error"]["message"].get<std::string>().find("eps") != std::string::npos);
  CHECK(e["error"]["exit_code"] == 1);
}

TEST_CASE("other validation failures exit 1") {
  Tmp t;
  const auto g = t.put("g.json", kG);
  CHECK(cli({"sweep", "--surface", g, "--n-dirs", "2"}).code == 1);
  CHECK(cli({"trace", "--surface", g, "--ds", "0"}).code == 1);
  CHECK(cli({"cascade", "--surface", g, "--eps-list", "0.1,0.2,0.05"}).code == 1);
  CHECK(cli({"trace", "--surface", g, "--on", "2"}).code == 1);
  CHECK(cli({"trace", "--surface", g, "--bogus"}).code == 1);
  CHECK(cli({"trace", "--surface", t.put("bad.json", "{\"g\":3}")}).code == 1);
  CHECK(cli({}).code == 1);
}

TEST_CASE("computation failures exit 2 with error JSON") {
  Tmp t;
  const auto g = t.put("g.json", kG);
  // unwritable output
  auto w = cli({"trace", "--surface", g, "--out", t.path("missing/x.json")});
  CHECK(w.code == 2);
  auto e = nlohmann::json::parse(w.err);
  CHECK(e["error"]["exit_code"] == 2);
  CHECK(e["error"]["code"] == "IoFailure");
  // missing surface file
  CHECK(cli({"trace", "--surface", t.path("absent.json")}).code == 2);
}

TEST_CASE("sweep writes a report and prints the summary line") {
  Tmp t;
  const auto s = t.put("saddle.json", kSaddle);
  const auto out = t.path("report.json");
  auto r = cli({"sweep", "--surface", s, "--n-dirs", "360", "--eps", "0.05", "--out", out});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(slurp(out));
  const int m = j["max_interval_count"];
  CHECK(r.out.find("max_intervals=" + std::to_string(m)) == 0);
  CHECK(m <= 2);

  // independent run through the library
  SweepConfig cfg;
  auto ref = sweep_directions({load_surface(s)}, Vec3::Zero(), cfg);
  CHECK(m == ref.max_interval_count);
  CHECK(j["records"].size() == ref.records.size());
  CHECK(j["run"]["n_dirs"] == 360);
  CHECK(j["run"]["eps"] == 0.05);

  // byte-identical rerun
  const auto first = slurp(out);
  REQUIRE(cli({"sweep", "--surface", s, "--n-dirs", "360", "--eps", "0.05", "--out", out}).code == 0);
  CHECK(slurp(out) == first);

  auto csv = cli({"sweep", "--surface", s, "--n-dirs", "36", "--format", "csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("direction,intervals,switches,termination\n", 0) == 0);
}

TEST_CASE("trace JSON schema and plot") {
  Tmp t;
  const auto g = t.put("bowl.json", R"({"g":{"order":12,"terms":[{"i":2,"j":0,"c":1.0},{"i":0,"j":2,"c":1.0}]}})");
  const auto out = t.path("trace.json");
  REQUIRE(cli({"trace", "--surface", g, "--dir", "0.3", "--eps", "0.05", "--ds", "1e-4", "--max-segments", "64",
               "--out", out})
              .code == 0);
  auto j = nlohmann::json::parse(slurp(out));
  REQUIRE(j["segments"].size() >= 1);
  const auto& s0 = j["segments"][0];
  CHECK(s0["kind"] == "boundary");
  CHECK(s0["surface"] == 1);
  for (const char* k : {"s0", "s1", "p0", "p1"}) CHECK(s0.contains(k));
  CHECK(j["termination"] == "exited_ball");
  REQUIRE(j["samples"].size() > 2);
  CHECK(j["samples"][0].size() == 4);
  CHECK(j["run"]["dir"] == 0.3);

  const auto csv = t.path("trace.csv");
  REQUIRE(cli({"plot", "--in", out, "--out", csv}).code == 0);
  const auto text = slurp(csv);
  CHECK(text.rfind("s,x,y,z,kind\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(j["samples"].size()) + 1);
  CHECK(text.find(",boundary\n") != std::string::npos);

  CHECK(cli({"plot", "--in", t.put("junk.json", "not json")}).code == 1);
  CHECK(cli({"plot", "--in", t.path("nothing.json")}).code == 2);
}

TEST_CASE("TOML config supplies defaults and flags override") {
  Tmp t;
  const auto s = t.put("saddle.json", kSaddle);
  const auto cfg = t.put("run.toml", "[sweep]\nsurface = \"" + s + "\"\nn-dirs = 24\neps = 0.02\n");
  auto a = cli({"--config", cfg, "sweep", "--no-refine"});
  REQUIRE(a.code == 0);
  auto j = nlohmann::json::parse(a.out.substr(0, a.out.rfind("max_intervals=")));
  CHECK(j["run"]["n_dirs"] == 24);
  CHECK(j["run"]["eps"] == 0.02);
  CHECK(j["records"].size() == 24);

  auto b = cli({"--config", cfg, "sweep", "--no-refine", "--eps", "0.03"});
  REQUIRE(b.code == 0);
  auto k = nlohmann::json::parse(b.out.substr(0, b.out.rfind("max_intervals=")));
  CHECK(k["run"]["eps"] == 0.03);
  CHECK(k["run"]["n_dirs"] == 24);
}

TEST_CASE("cascade and shoot subcommands") {
  Tmp t;
  const auto g = t.put("g.json", kG), h = t.put("h.json", kH);
  auto c = cli({"cascade", "--surface", g, "--surface2", h, "--dir", "-2.0"});
  REQUIRE(c.code == 0);
  auto j = nlohmann::json::parse(c.out);
  CHECK(j["counts"].size() == 5);
  CHECK(j["stabilized"] == true);

  const auto plane = t.put("plane.json", R"({"g":{"order":4,"terms":[]}})");
  auto s = cli({"shoot", "--surface", plane, "--from", "-0.1,0,-0.05", "--to", "0.1,0,-0.05"});
  REQUIRE(s.code == 0);
  auto k = nlohmann::json::parse(s.out);
  CHECK(k["length"].get<double>() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(k["termination"] == "reached_target");
}

#ifdef GEOOBS_CLI_PATH
TEST_CASE("installed binary exit codes") {
  Tmp t;
  const auto g = t.put("g.json", kG);
  const std::string bin = GEOOBS_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status(bin + " classify --surface " + g) == 0);
  CHECK(status(bin + " trace --surface " + g + " --dir 0.0 --eps -1") == 1);
  CHECK(status(bin + " trace --surface " + g + " --out " + t.path("no/x.json")) == 2);
}
#endif
