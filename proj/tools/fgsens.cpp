#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "fgsens/fgsens.hpp"
#include "fgsens/report.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forensic likelihood ratios and founder-sensitivity bounds"};
  app.require_subcommand(1);

  std::string case_path, freq_path, population = "Caucasian", format = "text";
  std::string markers_arg, scenarios_arg;
  double floor = 0.001;
  bool strict = false, no_coarsen = false, serial = false;
  double posterior_prior = -1.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--case", case_path, "case file (JSON)")->required();
    cmd->add_option("--freq", freq_path, "frequency database (CSV)")->required();
    cmd->add_option("--population", population, "baseline population name");
    cmd->add_option("--markers", markers_arg, "comma-separated marker subset");
    cmd->add_flag("--strict", strict, "reject evidence alleles missing from the database");
    cmd->add_option("--floor", floor, "frequency floor for missing alleles (lenient mode)");
    cmd->add_flag("--no-coarsen", no_coarsen, "keep the full allele domain");
    cmd->add_flag("--serial", serial, "disable marker-level parallelism");
  };

  auto* analyze = app.add_subcommand("analyze", "per-marker and overall likelihood ratios");
  add_common(analyze);
  analyze->add_option("--scenario", scenarios_arg, "comma-separated scenario labels");
  analyze->add_option("--format", format, "text|csv")->check(CLI::IsMember({"text", "csv"}));
  analyze->add_option("--prior", posterior_prior, "target prior for posterior reporting");

  auto* bounds = app.add_subcommand("bounds", "sensitivity bounds for one scenario");
  add_common(bounds);
  std::string bounds_scenario, marker_arg, eps_mode_arg;
  double epsilon_override = -1.0;
  bounds->add_option("--scenario", bounds_scenario, "scenario label (uaf, coancestry, or ibd kind)")
      ->required();
  bounds->add_option("--marker", marker_arg, "single marker (default: all)");
  bounds->add_option("--eps-mode", eps_mode_arg, "lfp-rel|csd-rel|csd-abs (default: all three)")
      ->check(CLI::IsMember({"lfp-rel", "csd-rel", "csd-abs"}));
  bounds->add_option("--epsilon", epsilon_override, "override the scenario-derived epsilon");
  bounds->add_option("--format", format, "text|csv")->check(CLI::IsMember({"text", "csv"}));

  auto* validate = app.add_subcommand("validate", "schema and consistency checks");
  validate->add_option("--case", case_path, "case file (JSON)")->required();
  validate->add_option("--freq", freq_path, "frequency database (CSV)");
  validate->add_option("--population", population, "baseline population name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      auto cf = fgsens::load_case(case_path);
      std::vector<std::string> problems;
      if (!freq_path.empty()) {
        std::vector<std::string> warnings;
        auto db = fgsens::load_frequency_db_file(freq_path, &warnings);
        print_warnings(warnings);
        problems = fgsens::validate_case(cf, &db, population);
      } else {
        problems = fgsens::validate_case(cf);
      }
      if (problems.empty()) {
        std::cout << "ok\n";
        return 0;
      }
      for (const auto& p : problems) std::cout << "problem: " << p << "\n";
      return kExitInput;
    }

    auto cf = fgsens::load_case(case_path);
    std::vector<std::string> db_warnings;
    auto db = fgsens::load_frequency_db_file(freq_path, &db_warnings);
    print_warnings(db_warnings);

    fgsens::RunConfig cfg;
    cfg.population = population;
    cfg.markers = split_list(markers_arg);
    cfg.coarsen = !no_coarsen;
    cfg.strict_alleles = strict;
    cfg.allele_floor = floor;
    cfg.parallel = !serial;

    if (analyze->parsed()) {
      cfg.scenario_labels = split_list(scenarios_arg);
      if (posterior_prior > 0.0) cfg.posterior_prior = posterior_prior;
      auto report = fgsens::run_analysis(cf, db, cfg);
      print_warnings(report.warnings);
      std::cout << (format == "csv" ? fgsens::render_report_csv(report)
                                    : fgsens::render_report_text(report));
      return 0;
    }

    if (bounds->parsed()) {
      if (!marker_arg.empty()) cfg.markers = {marker_arg};
      std::vector<fgsens::EpsMode> modes;
      if (eps_mode_arg == "lfp-rel")
        modes = {fgsens::EpsMode::lfp_rel};
      else if (eps_mode_arg == "csd-rel")
        modes = {fgsens::EpsMode::csd_rel};
      else if (eps_mode_arg == "csd-abs")
        modes = {fgsens::EpsMode::csd_abs};
      else
        modes = {fgsens::EpsMode::lfp_rel, fgsens::EpsMode::csd_rel, fgsens::EpsMode::csd_abs};
      std::optional<double> eps;
      if (epsilon_override >= 0.0) eps = epsilon_override;
      auto report = fgsens::run_bounds(cf, db, cfg, bounds_scenario, modes, eps);
      print_warnings(report.warnings);
      std::cout << (format == "csv" ? fgsens::render_bounds_csv(report)
                                    : fgsens::render_bounds_text(report));
      return 0;
    }
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
