#ifndef KERRPOL_SCENARIO_HPP_
#define KERRPOL_SCENARIO_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "kerrpol/geodesic.hpp"
#include "kerrpol/polarization.hpp"

namespace kerrpol {

// A fully specified run: parameters, conserved quantities, initial data,
// polarization, and run controls. Loaded from a TOML-style text file; every
// module precondition is checked at load time with line-precise messages.
struct Scenario {
  std::string note;

  double mass = 1.0;
  double spin = 0.0;

  double energy = 1.0;
  double angular_momentum = 0.0;
  double carter = 0.0;

  double t0 = 0.0;
  double r0 = 0.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  int sign_r = -1;
  int sign_theta = -1;

  double c1 = 1.0;
  double c2 = 0.0;

  double s_max = 100.0;
  double tol = 1e-10;
  std::size_t sample_count = 2000;

  // Names of keys that were filled from defaults, echoed for provenance.
  std::vector<std::string> defaults_applied;

  KerrParams params() const { return KerrParams(mass, spin); }
  ConservedSet conserved() const { return {energy, angular_momentum, carter}; }
  GeodesicState initial_state() const;
  bool axial() const;
};

Scenario load_scenario(const std::string& path);
Scenario load_scenario(std::istream& in, const std::string& name);

// Canonical text form; load(dump(s)) reproduces s field for field.
std::string dump_scenario(const Scenario& s);

// Verification thresholds, pinned once; all runs use the same gates.
struct VerificationThresholds {
  double null_residual = 1e-10;
  double conserved_drift = 1e-8;
  double product_matrix = 1e-8;
  double frame_residual = 1e-6;
  double chi_diff = 1e-6;
  double norm_drift = 1e-8;
};

struct VerificationSummary {
  double max_null_residual = 0.0;
  double max_conserved_drift = 0.0;
  double max_product_matrix_deviation = 0.0;
  double max_frame_residual = 0.0;
  double max_chi_diff = 0.0;
  double norm_drift = 0.0;
  std::size_t samples = 0;
  std::string chi_protocol;  // "closed-form" or "axis-transport"
  bool passed = false;
};

struct RunOptions {
  std::string out_dir = ".";
  bool verify = false;         // run oracle comparisons and gate the exit code
  bool write_plots = false;    // also emit plot-ready CSVs
  std::string format = "csv";  // csv | json data files
};

struct RunResult {
  VerificationSummary verification;
  StopReason stop_reason = StopReason::ReachedSMax;
  int exit_code = 0;
  std::vector<std::string> artifacts;  // paths written
};

// integrate -> frames -> polarization -> (verify) -> artifact files.
// Writes trajectory.(csv|json), rotation.(csv|json), verification.json.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

// Plot-ready datasets: polar.csv (x,y), orbit3d.csv (x,y,z), chi.csv (s,chi),
// ergosphere.csv (theta,r_s). Returns the paths written.
std::vector<std::string> emit_plot_data(const Trajectory& trajectory,
                                        const std::vector<RotationSample>& rotation,
                                        const std::string& out_dir);

// 17-significant-digit formatting used by every data file.
std::string format_g17(double v);

}  // namespace kerrpol

#endif  // KERRPOL_SCENARIO_HPP_
