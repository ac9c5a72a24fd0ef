// End-to-end checks of the chlab binary: exit codes, report/CSV artifacts,
// determinism, and error surfaces. The binary path is injected by the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#ifndef CHLAB_CLI_PATH
#error "CHLAB_CLI_PATH must point at the built chlab binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_root() {
  static fs::path p = [] {
    fs::path root = fs::temp_directory_path() / "chlab-cli-tests";
    fs::remove_all(root);
    fs::create_directories(root);
    return root;
  }();
  return p;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  fs::path cap = scratch_root() / "capture.txt";
  std::string cmd =
      std::string(CHLAB_CLI_PATH) + " " + args + " > " + cap.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(cap);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const std::string& name, const json& doc) {
  fs::path p = scratch_root() / name;
  std::ofstream f(p);
  f << doc.dump(2) << "\n";
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("list prints the full registry") {
  std::string out;
  CHECK(run_cli("list", &out) == 0);
  std::vector<std::string> lines;
  std::stringstream ss(out);
  for (std::string l; std::getline(ss, l);)
    if (!l.empty()) lines.push_back(l);
  CHECK(lines.size() == 17);
  bool found = false;
  for (const std::string& l : lines)
    if (l.rfind("profile-identities\t", 0) == 0) found = true;
  CHECK(found);
}

TEST_CASE("run: pass path, config echo, deterministic CSVs") {
  json doc{{"experiment", "invariant-closed-forms"},
           {"config", {{"c", 4.0}, {"omega", 1.0}}}};
  fs::path cfg = write_config("inv.json", doc);
  fs::path d1 = scratch_root() / "inv-run1";
  fs::path d2 = scratch_root() / "inv-run2";

  std::string out;
  CHECK(run_cli("run " + cfg.string() + " --output " + d1.string(), &out) == 0);
  REQUIRE(fs::exists(d1 / "report.json"));
  json report = json::parse(slurp(d1 / "report.json"));
  CHECK(report["experiment"] == "invariant-closed-forms");
  CHECK(report["config"]["c"] == 4.0);
  CHECK(report["config"]["omega"] == 1.0);
  CHECK(report["pass"] == true);
  CHECK(report["assertions"].size() >= 6);
  CHECK(report["wall_seconds"].get<double>() > 0.0);
  for (const json& a : report["assertions"]) {
    CHECK(a.contains("tolerance"));
    CHECK(a.contains("measured"));
  }

  CHECK(run_cli("run " + cfg.string() + " --output " + d2.string()) == 0);
  CHECK(slurp(d1 / "invariants.csv") == slurp(d2 / "invariants.csv"));
  CHECK(!slurp(d1 / "invariants.csv").empty());
}

TEST_CASE("export flattens a report") {
  json doc{{"experiment", "invariant-closed-forms"}};
  fs::path cfg = write_config("inv-export.json", doc);
  fs::path dir = scratch_root() / "inv-export";
  REQUIRE(run_cli("run " + cfg.string() + " --output " + dir.string()) == 0);
  std::string out;
  CHECK(run_cli("export " + dir.string(), &out) == 0);
  REQUIRE(fs::exists(dir / "assertions.csv"));
  std::ifstream csv(dir / "assertions.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "id,description,tolerance,measured,pass");
  int rows = 0;
  for (std::string l; std::getline(csv, l);)
    if (!l.empty()) ++rows;
  json report = json::parse(slurp(dir / "report.json"));
  CHECK(rows == (int)report["assertions"].size());
}

TEST_CASE("schema rejections exit 2 with structured JSON") {
  {  // no smooth wave at c <= 2w
    fs::path cfg = write_config(
        "bad-speed.json",
        json{{"experiment", "invariant-closed-forms"},
             {"config", {{"c", 1.0}, {"omega", 1.0}}}});
    std::string out;
    CHECK(run_cli("run " + cfg.string(), &out) == 2);
    json err = json::parse(out);
    CHECK(err["error"] == "config");
    CHECK(err["message"].get<std::string>().find("2*omega") != std::string::npos);
  }
  {  // unknown experiment name: nearest matches are suggested
    fs::path cfg = write_config(
        "typo.json", json{{"experiment", "invariant-closed-form"}});
    std::string out;
    CHECK(run_cli("run " + cfg.string(), &out) == 2);
    json err = json::parse(out);
    CHECK(err["message"].get<std::string>().find("invariant-closed-forms") !=
          std::string::npos);
  }
  {  // unknown config key
    fs::path cfg = write_config(
        "stray-key.json", json{{"experiment", "invariant-closed-forms"},
                               {"config", {{"sea", 1.0}}}});
    std::string out;
    CHECK(run_cli("run " + cfg.string(), &out) == 2);
    json err = json::parse(out);
    CHECK(err["message"].get<std::string>().find("sea") != std::string::npos);
  }
  {  // unparseable file
    fs::path p = scratch_root() / "garbage.json";
    std::ofstream(p) << "{not json";
    std::string out;
    CHECK(run_cli("run " + p.string(), &out) == 2);
  }
  {  // missing file
    CHECK(run_cli("run " + (scratch_root() / "absent.json").string()) == 2);
  }
}

TEST_CASE("a failing assertion exits 1 but still writes the report") {
  // the normal-form potential experiment contains a deliberate check against
  // a printed variant that does not hold; the run must fail honestly
  fs::path cfg = write_config(
      "liou.json", json{{"experiment", "liouville-potential"}});
  fs::path dir = scratch_root() / "liou";
  std::string out;
  CHECK(run_cli("run " + cfg.string() + " --output " + dir.string(), &out) == 1);
  json report = json::parse(slurp(dir / "report.json"));
  CHECK(report["pass"] == false);
  bool normal_ok = false, printed_fails = false;
  for (const json& a : report["assertions"]) {
    if (a["id"] == "liouville/normal-form" && a["pass"] == true) normal_ok = true;
    if (a["id"] == "liouville/printed-example" && a["pass"] == false)
      printed_fails = true;
  }
  CHECK(normal_ok);
  CHECK(printed_fails);
}

TEST_CASE("output root environment variable") {
  fs::path root = scratch_root() / "env-root";
  setenv("CHLAB_OUTPUT_ROOT", root.string().c_str(), 1);
  fs::path cfg = write_config(
      "env.json", json{{"experiment", "invariant-closed-forms"}});
  int rc = run_cli("run " + cfg.string());
  unsetenv("CHLAB_OUTPUT_ROOT");
  CHECK(rc == 0);
  CHECK(fs::exists(root / "invariant-closed-forms" / "report.json"));
}

TEST_CASE("bad invocations do not crash") {
  CHECK(run_cli("run") != 0);           // missing required argument
  CHECK(run_cli("frobnicate") != 0);    // unknown subcommand
  std::string out;
  CHECK(run_cli("export " + (scratch_root() / "nowhere").string(), &out) == 2);
}
