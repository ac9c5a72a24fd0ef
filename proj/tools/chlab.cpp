// chlab: run registered experiments from JSON configs, list the registry,
// export run reports to CSV.
//
// Exit codes: 0 all assertions passed; 1 at least one assertion failed;
// 2 config/schema problem; 3 runtime failure inside an experiment.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "chlab/experiments.hpp"

namespace fs = std::filesystem;
using chlab::json;

namespace {

// Output directory precedence: --output flag, "output" config key,
// $CHLAB_OUTPUT_ROOT/<experiment>, ./runs/<experiment>. Deterministic on
// purpose: reruns overwrite, and identical configs give identical trees.
std::string resolve_outdir(const std::string& flag, const json& doc,
                           const std::string& experiment) {
  if (!flag.empty()) return flag;
  if (doc.contains("output")) return doc["output"].get<std::string>();
  if (const char* root = std::getenv("CHLAB_OUTPUT_ROOT"))
    return std::string(root) + "/" + experiment;
  return "runs/" + experiment;
}

void print_error(const std::string& kind, const std::string& message) {
  json err{{"error", kind}, {"message", message}};
  std::cout << err.dump(2) << "\n";
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int cmd_run(const std::string& config_path, const std::string& outdir_flag) {
  json doc;
  try {
    std::ifstream in(config_path);
    if (!in) throw chlab::ConfigError("cannot open config " + config_path);
    doc = json::parse(in);
    if (!doc.is_object() || !doc.contains("experiment"))
      throw chlab::ConfigError("config must be an object with an 'experiment' key");
  } catch (const json::parse_error& e) {
    print_error("config", e.what());
    return 2;
  } catch (const chlab::ConfigError& e) {
    print_error("config", e.what());
    return 2;
  }

  std::string name = doc["experiment"].get<std::string>();
  std::string outdir = resolve_outdir(outdir_flag, doc, name);
  json user_cfg = doc.contains("config") ? doc["config"] : json(nullptr);

  chlab::RunReport report;
  try {
    fs::create_directories(outdir);
    report = chlab::run_experiment(name, user_cfg, outdir);
  } catch (const chlab::ConfigError& e) {
    print_error("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 3;
  }

  json out = report.to_json();
  std::ofstream rf(outdir + "/report.json");
  rf << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";
  return report.pass() ? 0 : 1;
}

int cmd_list() {
  for (const chlab::Experiment& e : chlab::experiment_registry())
    std::cout << e.name << "\t" << e.description << "\n";
  return 0;
}

int cmd_export(const std::string& rundir) {
  json report;
  try {
    std::ifstream in(rundir + "/report.json");
    if (!in) throw chlab::ConfigError("no report.json under " + rundir);
    report = json::parse(in);
  } catch (const std::exception& e) {
    print_error("config", e.what());
    return 2;
  }
  std::ofstream out(rundir + "/assertions.csv");
  out << "id,description,tolerance,measured,pass\n";
  char buf[32];
  for (const json& a : report["assertions"]) {
    out << csv_quote(a["id"].get<std::string>()) << ","
        << csv_quote(a["description"].get<std::string>()) << ",";
    std::snprintf(buf, sizeof buf, "%.17g", a["tolerance"].get<double>());
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", a["measured"].get<double>());
    out << buf << "," << (a["pass"].get<bool>() ? "true" : "false") << "\n";
  }
  std::cout << rundir + "/assertions.csv" << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for smooth shallow-water solitary waves"};
  app.require_subcommand(1);

  std::string config_path, outdir_flag, rundir;
  CLI::App* run = app.add_subcommand("run", "run one experiment from a JSON config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--output", outdir_flag, "output directory (overrides config)");

  app.add_subcommand("list", "list registered experiments");

  CLI::App* exp = app.add_subcommand("export", "flatten a run report to CSV");
  exp->add_option("rundir", rundir, "directory holding report.json")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, outdir_flag);
  if (exp->parsed()) return cmd_export(rundir);
  return cmd_list();
}
