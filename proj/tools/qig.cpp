// qig - command-line driver for the information-geometry experiments
//
//   qig <command> [--dim N] [--samples S] [--trials T] [--seed K]
//       [--f name,...] [--tolerance key=val]... [--out path] [--csv]
//
// Exit status: 0 verdict pass, 1 verdict fail, 2 usage error, 3 I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qig/run.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::pair<std::string, double> parse_tolerance(const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw qig::UsageError("--tolerance expects key=value, got \"" + item + "\"");
  try {
    std::size_t used = 0;
    const std::string value = item.substr(eq + 1);
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return {item.substr(0, eq), v};
  } catch (const std::logic_error&) {
    throw qig::UsageError("--tolerance value for \"" + item.substr(0, eq) + "\" is not a number");
  }
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) return false;
  out << text;
  out.flush();
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical workbench for monotone metrics and the +/-1 connections on density matrices"};
  qig::RunConfig config;
  std::vector<std::string> tolerances;
  std::string commands_help = "one of:";
  for (const auto& c : qig::known_commands()) commands_help += " " + c;

  app.add_option("command", config.command, commands_help)->required();
  app.add_option("--dim", config.dim, "Hilbert space dimension N (>= 2)");
  app.add_option("--samples", config.samples, "sample points / random draws");
  app.add_option("--trials", config.trials, "monotonicity trials per function");
  app.add_option("--seed", config.seed, "random seed");
  app.add_option("--f", config.functions, "functions: bkm|sld|rld|wy|bad, optionally c*name")->delimiter(',');
  app.add_option("--tolerance", tolerances, "override a tolerance, key=value (repeatable)");
  std::string out;
  app.add_option("--out", out, "write the JSON report here instead of stdout");
  app.add_flag("--csv", config.csv, "also write witness tables as CSV (<out>.csv, or stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (!out.empty()) config.out = out;

  qig::ExperimentReport report;
  try {
    for (const auto& t : tolerances) config.tolerance_overrides.insert(parse_tolerance(t));
    report = qig::run(config);
  } catch (const qig::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const qig::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }

  const std::string text = report.to_json().dump(2) + "\n";
  if (config.out) {
    if (!write_file(*config.out, text)) {
      std::cerr << "I/O error: cannot write " << *config.out << "\n";
      return kExitIo;
    }
    if (config.csv && !write_file(*config.out + ".csv", report.csv())) {
      std::cerr << "I/O error: cannot write " << *config.out << ".csv\n";
      return kExitIo;
    }
  } else {
    std::cout << text;
    if (config.csv) std::cout << report.csv();
  }
  std::cerr << report.config.command << ": " << (report.pass() ? "pass" : "fail") << "\n";
  return report.pass() ? 0 : kExitFail;
}
