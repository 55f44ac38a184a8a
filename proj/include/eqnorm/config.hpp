#pragma once

// Experiment configuration: flat `section.key = value` lines, '#' starts a
// comment, strings unquoted, lists comma separated.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqnorm/contact.hpp"
#include "eqnorm/dynamics.hpp"
#include "eqnorm/fermions.hpp"
#include "eqnorm/spins.hpp"

namespace eqnorm {

enum class ModelKind { kSpins, kHeisenberg, kFermions, kContact };
enum class InitialKind { kUniform, kBasisIndex, kCustom };

const char* model_name(ModelKind m);

struct WindowConfig {
  bool set = false;
  double e = 0.0;
  double delta_e = 0.0;
};

struct ObservableConfig {
  std::string name;
  int site = 0;
  double scale = 0.0;
  double k_slack = 10.0;  // h_ell second-moment slack constant
};

struct DynamicsConfig {
  std::optional<double> t_max;  // default 50 / minimum level spacing
  std::size_t n_points = 1000;
  TheoremParams params;
  std::uint64_t seed = 1;
  InitialKind initial = InitialKind::kUniform;
  std::size_t basis_index = 0;  // position inside the window
  std::vector<cplx> coefficients;
  std::optional<double> degeneracy_tol;
};

struct ScanConfig {
  std::size_t theta_points = 1000;
  double theta_tol = 1e-10;
  std::vector<double> volumes{4.0, 8.0, 12.0};
  std::vector<double> tolerances{1e-14, 1e-12, 1e-10, 1e-8, 1e-6};
};

struct ExperimentConfig {
  ModelKind model = ModelKind::kSpins;
  spins::SpinModelSpec spins;
  fermions::FermionModelSpec fermions;
  contact::ContactModelSpec contact;
  WindowConfig window;
  ObservableConfig observable;
  DynamicsConfig dynamics;
  ScanConfig scan;
  std::string output_dir;  // empty: caller decides
  // Assignments in file order, for the report echo.
  std::vector<std::pair<std::string, std::string>> echo;

  // Replaces every seed (field disorder and state sampling).
  void override_seed(std::uint64_t seed);
  // Re-runs every model and observable precondition.
  void validate() const;
};

// Throws ValidationError with "line N:" context for syntax errors, unknown or
// repeated keys and malformed values, and naming the field for failed
// preconditions.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace eqnorm
