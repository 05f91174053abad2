#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "evsim/error.hpp"
#include "evsim/reports.hpp"
#include "evsim/scenario.hpp"
#include "evsim/standards.hpp"

namespace {

enum Exit : int { kOk = 0, kPredicateFailed = 1, kUsage = 2, kMalformed = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

evsim::StandardId standard_arg(const std::string& name) {
  const auto id = evsim::parse_standard(name);
  if (!id) throw UsageError("unknown standard '" + name + "' (see list-standards)");
  return *id;
}

bool looks_like_file(const std::string& arg) {
  return arg.ends_with(".json") || arg.find('/') != std::string::npos;
}

bool report_run(const evsim::Scenario& sc, const evsim::ScenarioRun& run) {
  std::cout << sc.name << " on " << evsim::to_string(sc.standard) << ": "
            << evsim::describe(run.outcome.final_evse)
            << ", gun " << (run.outcome.gun_removable ? "removable" : "locked")
            << ", " << run.outcome.delivered_wh << " Wh, BMS " << run.outcome.bms_temp_c << " C\n";
  for (const auto& p : run.predicates) {
    std::cout << "  [" << (p.pass ? "PASS" : "FAIL") << "] " << p.name << " (" << p.detail << ")\n";
  }
  return run.passed;
}

int cmd_run(const std::string& target, const std::optional<std::string>& standard,
            std::uint64_t seed, const std::optional<std::string>& trace_path) {
  std::vector<evsim::Scenario> batch;
  if (looks_like_file(target)) {
    auto sc = evsim::scenario_from_json(read_file(target));
    if (standard) sc.standard = standard_arg(*standard);
    batch.push_back(std::move(sc));
  } else if (standard) {
    batch.push_back(evsim::library_scenario(target, standard_arg(*standard)));
  } else {
    for (const auto id : evsim::kAllStandards) batch.push_back(evsim::library_scenario(target, id));
  }
  if (trace_path && batch.size() != 1) throw UsageError("--trace needs a single standard");

  bool all = true;
  for (const auto& sc : batch) {
    const auto run = evsim::run_scenario(sc, seed);
    all = report_run(sc, run) && all;
    if (trace_path) write_file(*trace_path, evsim::to_jsonl(run.outcome.trace));
  }
  return all ? kOk : kPredicateFailed;
}

int cmd_list_standards() {
  std::printf("%-13s %-28s %10s %10s %5s %4s\n", "id", "name", "unpressed", "pressed", "lock", "CAN");
  for (const auto id : evsim::kAllStandards) {
    const auto& p = evsim::profile_of(id);
    std::printf("%-13s %-28s %10.0f %10.0f %5s %4s\n", std::string(evsim::to_string(id)).c_str(),
                std::string(evsim::display_name(id)).c_str(), p.unpressed_ohm, p.pressed_ohm,
                p.has_lock ? "yes" : "no", p.exposes_can ? "yes" : "no");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EV charging physical-layer attack simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::string> standard;
  std::uint64_t seed = 0;
  std::optional<std::string> trace_path;
  auto* run = app.add_subcommand("run", "run a library scenario or a scenario file");
  run->add_option("scenario", scenario, "scenario name or JSON file")->required();
  run->add_option("--standard", standard, "standard id; omitted runs all standards");
  run->add_option("--seed", seed, "seed");
  run->add_option("--trace", trace_path, "write the JSONL trace here");

  auto* table1 = app.add_subcommand("verify-table1", "spoof every CC cell and check deviations");
  auto* grid = app.add_subcommand("matrix", "run every attack family on every standard");

  int trials = 1000;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval-countermeasure", "detection and false-positive rates");
  eval->add_option("--trials", trials, "trials")->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "seed");

  auto* list = app.add_subcommand("list-standards", "print the standard profiles");

  std::string export_path;
  auto* exp = app.add_subcommand("export-profiles", "write the standard profiles as JSON");
  exp->add_option("file", export_path, "output file")->required();

  std::string show_name;
  std::string show_standard = "sae-j1772";
  auto* show = app.add_subcommand("show-scenario", "print a library scenario as JSON");
  show->add_option("scenario", show_name, "scenario name")->required();
  show->add_option("--standard", show_standard, "standard id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario, standard, seed, trace_path);
    if (*table1) {
      const auto report = evsim::verify_table1();
      std::cout << evsim::render(report);
      return report.all_passed() ? kOk : kPredicateFailed;
    }
    if (*grid) {
      const auto report = evsim::matrix();
      std::cout << evsim::render(report);
      return report.matches_expected ? kOk : kPredicateFailed;
    }
    if (*eval) {
      const auto report = evsim::eval_countermeasure(trials, eval_seed);
      std::cout << evsim::render(report);
      return report.spoof_detected == report.spoof_cases && report.false_positives == 0
                 ? kOk
                 : kPredicateFailed;
    }
    if (*list) return cmd_list_standards();
    if (*exp) {
      write_file(export_path, evsim::export_profiles_json());
      return kOk;
    }
    if (*show) {
      std::cout << evsim::scenario_to_json(evsim::library_scenario(show_name, standard_arg(show_standard)));
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const evsim::UnknownScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const evsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  }
  return kUsage;
}
