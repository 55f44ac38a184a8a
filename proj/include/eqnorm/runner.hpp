#pragma once

// Config-driven experiments: certificate, dynamics and parameter scans, with
// a key: value report and CSV artifacts.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eqnorm/config.hpp"
#include "eqnorm/spectral.hpp"

namespace eqnorm {

enum class Verdict { kPass, kFail, kNotApplicable };
const char* verdict_name(Verdict v);

struct DegeneracySummary {
  double tolerance = 0.0;
  std::size_t groups = 0;
  std::size_t max_group_size = 0;
};

struct RunReport {
  std::string model;
  std::string observable;
  std::size_t window_size = 0;
  double e_min = 0.0;  // window bounds actually used
  double e_max = 0.0;
  NormalityReport certificate;
  bool per_state_complete = true;  // false: only the worst state is listed
  double zeta_required = 0.0;
  Verdict precondition = Verdict::kNotApplicable;  // zeta <= zeta_required
  DegeneracySummary degeneracy;

  bool dynamics_run = false;
  double t_max = 0.0;
  std::size_t n_points = 0;
  double threshold = 0.0;
  std::optional<double> good_set_fraction;
  Verdict good_set = Verdict::kNotApplicable;  // fraction >= 1 - delta
  double grid_time_average = 0.0;   // mean of the deviation series
  double infinite_time_average = 0.0;
  double predicted_average = 0.0;   // sum |c|^2 f
  double chebyshev_tail = 0.0;

  std::vector<std::string> notes;
  double wall_seconds = 0.0;
};

// Runs the certificate and, if requested, the dynamics. Writes report.txt,
// certificate.csv and (with dynamics) timeseries.csv into out_dir.
RunReport run_experiment(const ExperimentConfig& config,
                         const std::filesystem::path& out_dir,
                         bool with_dynamics);

void write_report(const RunReport& report, const ExperimentConfig& config,
                  const std::filesystem::path& path);

// kind: degeneracy | theta | volume. Writes scan_<kind>.csv and returns its
// path.
std::filesystem::path run_scan(const std::string& kind,
                               const ExperimentConfig& config,
                               const std::filesystem::path& out_dir);

}  // namespace eqnorm
