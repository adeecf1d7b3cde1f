#include "kerrpol/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kerrpol/transport_oracle.hpp"

namespace kerrpol {

namespace {

using nlohmann::json;

struct RawValue {
  std::string text;
  int line;
};

struct ParsedFile {
  std::map<std::string, RawValue> entries;  // "section.key" -> value
  std::string name;
};

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  std::ostringstream os;
  os << name << ":" << line << ": " << msg;
  throw precondition_error(os.str());
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

ParsedFile parse_toml_subset(std::istream& in, const std::string& name) {
  ParsedFile out;
  out.name = name;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(name, lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(name, lineno, "empty section name");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(name, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(name, lineno, "empty key");
    if (value.empty()) fail(name, lineno, "empty value for key '" + key + "'");

    const std::string full = section.empty() ? key : section + "." + key;
    if (out.entries.count(full)) fail(name, lineno, "duplicate key '" + full + "'");
    out.entries[full] = {value, lineno};
  }
  return out;
}

double parse_double(const ParsedFile& f, const RawValue& rv, const std::string& key) {
  const std::string& t = rv.text;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v))
    fail(f.name, rv.line, "key '" + key + "': not a finite number: '" + t + "'");
  return v;
}

long parse_int(const ParsedFile& f, const RawValue& rv, const std::string& key) {
  const std::string& t = rv.text;
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    fail(f.name, rv.line, "key '" + key + "': not an integer: '" + t + "'");
  return v;
}

std::string parse_string(const ParsedFile& f, const RawValue& rv, const std::string& key) {
  const std::string& t = rv.text;
  if (t.size() < 2 || t.front() != '"' || t.back() != '"')
    fail(f.name, rv.line, "key '" + key + "': expected a double-quoted string");
  return t.substr(1, t.size() - 2);
}

}  // namespace

GeodesicState Scenario::initial_state() const {
  return GeodesicState{SpacetimePoint(params(), t0, r0, theta0, phi0), sign_r, sign_theta, 0.0};
}

bool Scenario::axial() const {
  return angular_momentum == 0.0 &&
         (theta0 < 1e-12 || M_PI - theta0 < 1e-12) && carter <= 1e-12;
}

Scenario load_scenario(std::istream& in, const std::string& name) {
  const ParsedFile f = parse_toml_subset(in, name);
  Scenario s;
  std::map<std::string, bool> seen;

  auto take = [&](const std::string& key) -> const RawValue* {
    const auto it = f.entries.find(key);
    if (it == f.entries.end()) return nullptr;
    seen[key] = true;
    return &it->second;
  };
  auto req_double = [&](const std::string& key) -> std::pair<double, int> {
    const RawValue* rv = take(key);
    if (!rv) fail(f.name, 0, "missing required key '" + key + "'");
    return {parse_double(f, *rv, key), rv->line};
  };
  auto opt_double = [&](const std::string& key, double def, double& dst) {
    const RawValue* rv = take(key);
    if (rv)
      dst = parse_double(f, *rv, key);
    else {
      dst = def;
      s.defaults_applied.push_back(key);
    }
  };

  if (const RawValue* rv = take("note")) s.note = parse_string(f, *rv, "note");

  opt_double("params.M", 1.0, s.mass);
  const auto [a_val, a_line] = req_double("params.a");
  s.spin = a_val;
  opt_double("conserved.E", 1.0, s.energy);
  const auto [phi_val, phi_line] = req_double("conserved.Phi");
  s.angular_momentum = phi_val;
  const auto [kap_val, kap_line] = req_double("conserved.kappa");
  s.carter = kap_val;

  opt_double("initial.t0", 0.0, s.t0);
  const auto [r0_val, r0_line] = req_double("initial.r0");
  s.r0 = r0_val;
  const auto [th0_val, th0_line] = req_double("initial.theta0");
  s.theta0 = th0_val;
  opt_double("initial.phi0", 0.0, s.phi0);

  auto req_sign = [&](const std::string& key) -> std::pair<int, int> {
    const RawValue* rv = take(key);
    if (!rv) fail(f.name, 0, "missing required key '" + key + "'");
    const long v = parse_int(f, *rv, key);
    if (v != 1 && v != -1) fail(f.name, rv->line, "key '" + key + "': must be +1 or -1");
    return {static_cast<int>(v), rv->line};
  };
  const auto [sr, sr_line] = req_sign("initial.sign_r");
  s.sign_r = sr;
  const auto [sth, sth_line] = req_sign("initial.sign_theta");
  s.sign_theta = sth;

  opt_double("polarization.c1", 1.0, s.c1);
  opt_double("polarization.c2", 0.0, s.c2);

  opt_double("run.s_max", 100.0, s.s_max);
  opt_double("run.tol", 1e-10, s.tol);
  if (const RawValue* rv = take("run.sample_count")) {
    const long n = parse_int(f, *rv, "run.sample_count");
    if (n < 2) fail(f.name, rv->line, "run.sample_count must be at least 2");
    s.sample_count = static_cast<std::size_t>(n);
  } else {
    s.defaults_applied.push_back("run.sample_count");
  }

  for (const auto& [key, rv] : f.entries)
    if (!seen.count(key)) fail(f.name, rv.line, "unknown key '" + key + "'");

  // Precondition checks with line-precise attribution.
  if (!(s.mass > 0.0)) fail(f.name, 0, "params.M must be positive");
  if (!(s.spin >= 0.0)) fail(f.name, a_line, "params.a must be non-negative");
  if (!(s.mass > s.spin))
    fail(f.name, a_line, "extreme or super-extreme case M <= a is out of scope");
  if (!(s.energy > 0.0)) fail(f.name, 0, "conserved.E must be positive");
  if (!(s.carter >= 0.0)) fail(f.name, kap_line, "conserved.kappa must be non-negative");
  const KerrParams params = s.params();
  if (!(s.r0 > params.horizon_outer()))
    fail(f.name, r0_line, "initial.r0 must exceed the outer horizon radius");
  if (!(s.theta0 >= 0.0 && s.theta0 <= M_PI))
    fail(f.name, th0_line, "initial.theta0 outside [0, pi]");
  const double sin0 = std::sin(s.theta0);
  if (sin0 == 0.0 && s.angular_momentum != 0.0)
    fail(f.name, th0_line, "initial data on the axis requires Phi = 0");
  if (!(s.tol > 0.0)) fail(f.name, 0, "run.tol must be positive");
  if (!(s.s_max >= 0.0)) fail(f.name, 0, "run.s_max must be non-negative");
  if (s.c1 == 0.0 && s.c2 == 0.0) fail(f.name, 0, "polarization (c1, c2) must be nonzero");

  const ConservedSet c = s.conserved();
  const Potentials pot = potentials(c, params, s.r0, s.theta0);
  if (pot.radial < -1e-12 * radial_potential_scale(c, params, s.r0))
    fail(f.name, r0_line, "R(r0) < 0: initial point outside the allowed region");
  if (pot.polar < -1e-12 * polar_potential_scale(c, params, s.theta0))
    fail(f.name, th0_line, "Theta(theta0) < 0: initial point outside the allowed region");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw precondition_error("cannot open scenario file: " + path);
  return load_scenario(in, path);
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string dump_scenario(const Scenario& s) {
  std::ostringstream os;
  if (!s.note.empty()) os << "note = \"" << s.note << "\"\n\n";
  os << "[params]\n"
     << "M = " << format_g17(s.mass) << "\n"
     << "a = " << format_g17(s.spin) << "\n\n"
     << "[conserved]\n"
     << "E = " << format_g17(s.energy) << "\n"
     << "Phi = " << format_g17(s.angular_momentum) << "\n"
     << "kappa = " << format_g17(s.carter) << "\n\n"
     << "[initial]\n"
     << "t0 = " << format_g17(s.t0) << "\n"
     << "r0 = " << format_g17(s.r0) << "\n"
     << "theta0 = " << format_g17(s.theta0) << "\n"
     << "phi0 = " << format_g17(s.phi0) << "\n"
     << "sign_r = " << s.sign_r << "\n"
     << "sign_theta = " << s.sign_theta << "\n\n"
     << "[polarization]\n"
     << "c1 = " << format_g17(s.c1) << "\n"
     << "c2 = " << format_g17(s.c2) << "\n\n"
     << "[run]\n"
     << "s_max = " << format_g17(s.s_max) << "\n"
     << "tol = " << format_g17(s.tol) << "\n"
     << "sample_count = " << s.sample_count << "\n";
  return os.str();
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string csv_or_json(const std::string& format, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  if (format == "json") {
    json j = json::array();
    for (const auto& row : rows) {
      json obj;
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
      j.push_back(obj);
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::ReachedSMax: return "s_max";
    case StopReason::ReachedHorizon: return "horizon";
    case StopReason::Escaped: return "escaped";
  }
  return "unknown";
}

}  // namespace

std::vector<std::string> emit_plot_data(const Trajectory& trajectory,
                                        const std::vector<RotationSample>& rotation,
                                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  std::vector<std::vector<std::string>> polar, orbit3d, chi;
  for (const RotationSample& smp : rotation) {
    const double x2 = smp.r * std::cos(smp.phi), y2 = smp.r * std::sin(smp.phi);
    polar.push_back({format_g17(x2), format_g17(y2)});
    const double sn = std::sin(smp.theta);
    orbit3d.push_back({format_g17(smp.r * std::cos(smp.phi) * sn),
                       format_g17(smp.r * std::sin(smp.phi) * sn),
                       format_g17(smp.r * std::cos(smp.theta))});
    chi.push_back({format_g17(smp.s), format_g17(smp.chi)});
  }

  std::vector<std::vector<std::string>> ergo;
  const KerrParams& params = trajectory.params();
  const int n_ergo = 721;
  for (int i = 0; i < n_ergo; ++i) {
    const double th = M_PI * static_cast<double>(i) / (n_ergo - 1);
    ergo.push_back({format_g17(th), format_g17(params.ergosphere_radius(th))});
  }

  const auto emit = [&](const std::string& file, const std::vector<std::string>& hdr,
                        const std::vector<std::vector<std::string>>& rows) {
    const std::string path = (fs::path(out_dir) / file).string();
    write_file(path, csv_or_json("csv", hdr, rows));
    written.push_back(path);
  };
  emit("polar.csv", {"x", "y"}, polar);
  emit("orbit3d.csv", {"x", "y", "z"}, orbit3d);
  emit("chi.csv", {"s", "chi"}, chi);
  emit("ergosphere.csv", {"theta", "r_s"}, ergo);
  return written;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  namespace fs = std::filesystem;
  const KerrParams params = scenario.params();
  const ConservedSet c = scenario.conserved();
  const VerificationThresholds thresholds;

  IntegrationControl ctl;
  ctl.s_max = scenario.s_max;
  ctl.tol = scenario.tol;

  const Trajectory traj = integrate(scenario.initial_state(), c, params, ctl);

  RunResult result;
  result.stop_reason = traj.stop_reason();
  VerificationSummary& v = result.verification;

  // Trajectory table at accepted steps, with recomputed-conservation columns.
  std::vector<std::vector<std::string>> traj_rows;
  for (const GeodesicState& st : traj.accepted_states()) {
    const StateDiagnostics d = diagnostics(st, c, params);
    const double e_drift = std::abs(d.energy - c.energy) / std::max(1.0, std::abs(c.energy));
    const double phi_drift = std::abs(d.angular_momentum - c.angular_momentum) /
                             std::max(1.0, std::abs(c.angular_momentum));
    const double kap_drift = std::abs(d.carter - c.carter) / std::max(1.0, std::abs(c.carter));
    v.max_null_residual = std::max(v.max_null_residual, std::abs(d.null_residual));
    v.max_conserved_drift =
        std::max({v.max_conserved_drift, e_drift, phi_drift, kap_drift});
    traj_rows.push_back({format_g17(st.s), format_g17(st.point.t), format_g17(st.point.r),
                         format_g17(st.point.theta), format_g17(st.point.phi),
                         std::to_string(st.sign_r), std::to_string(st.sign_theta),
                         format_g17(d.null_residual), format_g17(e_drift),
                         format_g17(phi_drift), format_g17(kap_drift)});
  }

  // Rotation table on the uniform sample grid.
  std::vector<RotationSample> rotation = faraday_curve(traj, scenario.sample_count);
  std::vector<double> chi_oracle(rotation.size(), 0.0);
  const bool axial = scenario.axial();
  v.chi_protocol = axial ? "axis-transport" : "closed-form";
  v.samples = rotation.size();

  if (axial) {
    // Axis protocol: Eq.-level closed form is not applicable; chi comes from
    // the regular-chart transport for both columns.
    const auto curve = axis_rotation_curve(traj, scenario.tol);
    std::size_t j = 0;
    for (std::size_t i = 0; i < rotation.size(); ++i) {
      while (j + 1 < curve.size() && curve[j].first < rotation[i].s) ++j;
      rotation[i].chi = curve[j].second;
      chi_oracle[i] = curve[j].second;
      v.max_chi_diff = 0.0;
    }
  } else if (options.verify) {
    const std::vector<double> sample_s = uniform_samples(traj, scenario.sample_count);
    chi_oracle = faraday_numeric(scenario.c1, scenario.c2, traj, scenario.tol, sample_s);
    for (std::size_t i = 0; i < rotation.size(); ++i)
      v.max_chi_diff = std::max(v.max_chi_diff, std::abs(rotation[i].chi - chi_oracle[i]));

    // Frame oracle: transport all four closed-form legs from s_begin and
    // compare with the closed forms at the samples.
    const GeodesicState init = traj.initial_state();
    const ParallelFrame L0 = parallel_frame(init, c, params);
    const Mat4 fr0 = frame(params, init.point);
    const FrameVector* legs0[4] = {&L0.L0, &L0.L1, &L0.L2, &L0.L3};
    for (int leg = 0; leg < 4; ++leg) {
      const CoordVector v0 = to_coord_components(fr0, *legs0[leg]);
      const TransportRun run = transport(v0, traj, scenario.tol, sample_s);
      v.norm_drift = std::max(v.norm_drift, run.max_norm_drift);
      for (std::size_t i = 0; i < sample_s.size(); ++i) {
        const GeodesicState st = traj.state(sample_s[i]);
        const ParallelFrame Ls = parallel_frame(st, c, params);
        const FrameVector* legs_s[4] = {&Ls.L0, &Ls.L1, &Ls.L2, &Ls.L3};
        const CoordVector closed = to_coord_components(frame(params, st.point), *legs_s[leg]);
        for (int k = 0; k < 4; ++k)
          v.max_frame_residual =
              std::max(v.max_frame_residual, std::abs(run.v[i][k] - closed[k]));
      }
    }

    // Product-matrix deviation at the samples.
    for (const double s : sample_s) {
      const Mat4 m = product_matrix(traj.state(s), c, params);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double target = 0.0;
          if ((i == 0 && j == 1) || (i == 1 && j == 0)) target = 1.0;
          if (i == j && i >= 2) target = -1.0;
          v.max_product_matrix_deviation =
              std::max(v.max_product_matrix_deviation, std::abs(m[i][j] - target));
        }
    }
  }

  std::vector<std::vector<std::string>> rot_rows;
  for (std::size_t i = 0; i < rotation.size(); ++i) {
    const RotationSample& smp = rotation[i];
    const double diff = (axial || options.verify) ? std::abs(smp.chi - chi_oracle[i]) : 0.0;
    rot_rows.push_back({format_g17(smp.s), format_g17(smp.r), format_g17(smp.theta),
                        format_g17(smp.phi), format_g17(smp.chi),
                        format_g17(smp.critical_residual),
                        (axial || options.verify) ? format_g17(chi_oracle[i]) : "nan",
                        (axial || options.verify) ? format_g17(diff) : "nan"});
  }

  v.passed = v.max_null_residual < thresholds.null_residual &&
             v.max_conserved_drift < thresholds.conserved_drift;
  if (options.verify && !axial)
    v.passed = v.passed && v.max_product_matrix_deviation < thresholds.product_matrix &&
               v.max_frame_residual < thresholds.frame_residual &&
               v.max_chi_diff < thresholds.chi_diff && v.norm_drift < thresholds.norm_drift;
  if (axial) {
    double max_axis = 0.0;
    for (const RotationSample& smp : rotation) max_axis = std::max(max_axis, std::abs(smp.chi));
    v.max_chi_diff = max_axis;  // deviation from the theorem value 0
    v.passed = v.passed && max_axis < thresholds.chi_diff;
  }

  fs::create_directories(options.out_dir);
  const std::string ext = options.format == "json" ? ".json" : ".csv";
  const std::string traj_path = (fs::path(options.out_dir) / ("trajectory" + ext)).string();
  write_file(traj_path,
             csv_or_json(options.format,
                         {"s", "t", "r", "theta", "phi", "sign_r", "sign_theta",
                          "null_residual", "E_drift", "Phi_drift", "kappa_drift"},
                         traj_rows));
  result.artifacts.push_back(traj_path);

  const std::string rot_path = (fs::path(options.out_dir) / ("rotation" + ext)).string();
  write_file(rot_path,
             csv_or_json(options.format,
                         {"s", "r", "theta", "phi", "chi", "residual_critical", "chi_oracle",
                          "chi_diff"},
                         rot_rows));
  result.artifacts.push_back(rot_path);

  json report;
  report["scenario"] = {{"note", scenario.note},
                        {"M", scenario.mass},
                        {"a", scenario.spin},
                        {"E", scenario.energy},
                        {"Phi", scenario.angular_momentum},
                        {"kappa", scenario.carter},
                        {"t0", scenario.t0},
                        {"r0", scenario.r0},
                        {"theta0", scenario.theta0},
                        {"phi0", scenario.phi0},
                        {"sign_r", scenario.sign_r},
                        {"sign_theta", scenario.sign_theta},
                        {"c1", scenario.c1},
                        {"c2", scenario.c2},
                        {"s_max", scenario.s_max},
                        {"tol", scenario.tol},
                        {"sample_count", scenario.sample_count}};
  report["defaults_applied"] = scenario.defaults_applied;
  report["stop_reason"] = stop_reason_name(traj.stop_reason());
  report["s_end"] = traj.s_end();
  report["events"] = json::array();
  for (const TurningEvent& e : traj.events())
    report["events"].push_back(
        {{"s", e.s}, {"kind", e.kind == TurningKind::Radial ? "radial" : "polar"}});
  report["verification"] = {{"max_null_residual", v.max_null_residual},
                            {"max_conserved_drift", v.max_conserved_drift},
                            {"max_product_matrix_deviation", v.max_product_matrix_deviation},
                            {"max_frame_residual", v.max_frame_residual},
                            {"max_chi_diff", v.max_chi_diff},
                            {"norm_drift", v.norm_drift},
                            {"samples", v.samples},
                            {"chi_protocol", v.chi_protocol},
                            {"verify_enabled", options.verify},
                            {"passed", v.passed}};
  report["thresholds"] = {{"null_residual", thresholds.null_residual},
                          {"conserved_drift", thresholds.conserved_drift},
                          {"product_matrix", thresholds.product_matrix},
                          {"frame_residual", thresholds.frame_residual},
                          {"chi_diff", thresholds.chi_diff},
                          {"norm_drift", thresholds.norm_drift}};

  const std::string ver_path = (fs::path(options.out_dir) / "verification.json").string();
  write_file(ver_path, report.dump(2) + "\n");
  result.artifacts.push_back(ver_path);

  if (options.write_plots) {
    const auto plots = emit_plot_data(traj, rotation, options.out_dir);
    result.artifacts.insert(result.artifacts.end(), plots.begin(), plots.end());
  }

  result.exit_code = v.passed ? 0 : 3;
  if (!options.verify && !axial)
    result.exit_code = (v.max_null_residual < thresholds.null_residual &&
                        v.max_conserved_drift < thresholds.conserved_drift)
                           ? 0
                           : 3;
  return result;
}

}  // namespace kerrpol
