// kerrpol: null-geodesic integration and gravitational Faraday rotation in
// the Kerr exterior, driven by scenario files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kerrpol/scenario.hpp"
#include "kerrpol/transport_oracle.hpp"

namespace {

using nlohmann::json;

constexpr int kExitPrecondition = 2;
constexpr int kExitVerification = 3;
constexpr int kExitNumerical = 4;

void print_error(const std::string& kind, const std::string& message) {
  json err{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = "out";
  double tol = -1.0;    // <0: keep scenario value
  double s_max = -1.0;  // <0: keep scenario value
  bool verify = false;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_scenario = true) {
  auto* opt = cmd->add_option("--scenario", args.scenario_path, "scenario file (TOML)");
  if (needs_scenario) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--tol", args.tol, "integrator tolerance override");
  cmd->add_option("--s-max", args.s_max, "affine-parameter span override");
  cmd->add_flag("--verify", args.verify, "run oracle comparisons and gate the exit code");
  cmd->add_option("--format", args.format, "data file format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
}

kerrpol::Scenario load_with_overrides(const CommonArgs& args) {
  kerrpol::Scenario s = kerrpol::load_scenario(args.scenario_path);
  if (args.tol > 0.0) s.tol = args.tol;
  if (args.s_max >= 0.0) s.s_max = args.s_max;
  return s;
}

int run_single(const CommonArgs& args, bool force_verify, bool plots) {
  const kerrpol::Scenario scenario = load_with_overrides(args);
  kerrpol::RunOptions options;
  options.out_dir = args.out_dir;
  options.verify = force_verify || args.verify;
  options.write_plots = plots;
  options.format = args.format;
  const kerrpol::RunResult result = kerrpol::run_scenario(scenario, options);
  for (const std::string& path : result.artifacts) std::cout << path << "\n";
  if (result.exit_code != 0)
    print_error("verification", "one or more verification thresholds failed");
  return result.exit_code;
}

int run_critical_points(const CommonArgs& args) {
  const kerrpol::Scenario scenario = load_with_overrides(args);
  const kerrpol::KerrParams params = scenario.params();
  const kerrpol::ConservedSet c = scenario.conserved();

  kerrpol::IntegrationControl ctl;
  ctl.s_max = scenario.s_max;
  ctl.tol = scenario.tol;
  const kerrpol::Trajectory traj =
      kerrpol::integrate(scenario.initial_state(), c, params, ctl);

  const std::vector<double> roots =
      kerrpol::locate_critical_points(traj, scenario.sample_count);

  std::filesystem::create_directories(args.out_dir);
  const std::string path =
      (std::filesystem::path(args.out_dir) / "critical_points.csv").string();
  std::string out = "s,r,theta,chi\n";
  for (const double s : roots) {
    const kerrpol::GeodesicState st = traj.state(s);
    const double chi =
        kerrpol::faraday_angle(traj.initial_state().point, st.point, params);
    out += kerrpol::format_g17(s) + "," + kerrpol::format_g17(st.point.r) + "," +
           kerrpol::format_g17(st.point.theta) + "," + kerrpol::format_g17(chi) + "\n";
  }
  std::ofstream file(path, std::ios::binary);
  file << out;
  std::cout << path << "\n";
  std::cout << "critical points: " << roots.size() << "\n";
  return 0;
}

int run_batch(const std::vector<std::string>& paths, const CommonArgs& args) {
  // Scenarios are independent; run them concurrently, each into its own
  // subdirectory.
  std::vector<std::future<int>> futures;
  futures.reserve(paths.size());
  for (const std::string& path : paths) {
    futures.push_back(std::async(std::launch::async, [path, &args]() -> int {
      try {
        CommonArgs one = args;
        one.scenario_path = path;
        one.out_dir = (std::filesystem::path(args.out_dir) /
                       std::filesystem::path(path).stem().string())
                          .string();
        const kerrpol::Scenario scenario = load_with_overrides(one);
        kerrpol::RunOptions options;
        options.out_dir = one.out_dir;
        options.verify = args.verify;
        options.format = args.format;
        return kerrpol::run_scenario(scenario, options).exit_code;
      } catch (const kerrpol::precondition_error& e) {
        print_error("precondition", std::string(path) + ": " + e.what());
        return kExitPrecondition;
      } catch (const kerrpol::stalled_orbit_error& e) {
        print_error("numerical", std::string(path) + ": " + e.what());
        return kExitNumerical;
      }
    }));
  }
  int worst = 0;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    const int code = futures[i].get();
    std::cout << paths[i] << ": " << (code == 0 ? "ok" : "failed") << "\n";
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gravitational Faraday rotation along Kerr null geodesics"};
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<std::string> batch_paths;

  auto* cmd_integrate =
      app.add_subcommand("integrate", "integrate a null geodesic and export the trajectory");
  add_common(cmd_integrate, args);
  auto* cmd_faraday =
      app.add_subcommand("faraday", "trajectory plus closed-form rotation curve");
  add_common(cmd_faraday, args);
  auto* cmd_verify = app.add_subcommand(
      "verify", "full run with brute-force transport verification (exit 3 on failure)");
  add_common(cmd_verify, args);
  auto* cmd_critical =
      app.add_subcommand("critical-points", "locate the critical points of chi(s)");
  add_common(cmd_critical, args);
  auto* cmd_batch = app.add_subcommand("batch", "run many scenarios in parallel");
  add_common(cmd_batch, args, /*needs_scenario=*/false);
  cmd_batch->add_option("scenarios", batch_paths, "scenario files")->required();
  auto* cmd_plots =
      app.add_subcommand("emit-plots", "run and emit plot-ready orbit/rotation datasets");
  add_common(cmd_plots, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_integrate->parsed()) return run_single(args, false, false);
    if (cmd_faraday->parsed()) return run_single(args, false, false);
    if (cmd_verify->parsed()) return run_single(args, true, false);
    if (cmd_critical->parsed()) return run_critical_points(args);
    if (cmd_batch->parsed()) return run_batch(batch_paths, args);
    if (cmd_plots->parsed()) return run_single(args, false, true);
  } catch (const kerrpol::precondition_error& e) {
    print_error("precondition", e.what());
    return kExitPrecondition;
  } catch (const kerrpol::stalled_orbit_error& e) {
    print_error("numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
