#include "eqnorm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "eqnorm/error.hpp"

namespace eqnorm {
namespace {

struct Entry {
  std::string value;
  int line = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail_at(int line, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line << ": " << what;
  throw ValidationError(msg.str());
}

double to_double(const std::string& key, const Entry& e) {
  double x = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  if (!e.value.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
    fail_at(e.line, key + " expects a number, got '" + e.value + "'");
  }
  return x;
}

long long to_int(const std::string& key, const Entry& e) {
  long long x = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) {
    fail_at(e.line, key + " expects an integer, got '" + e.value + "'");
  }
  return x;
}

std::uint64_t to_u64(const std::string& key, const Entry& e) {
  std::uint64_t x = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) {
    fail_at(e.line, key + " expects a non-negative integer, got '" + e.value + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail_at(e.line, key + " expects true or false, got '" + e.value + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& key, const Entry& e) {
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) {
    out.push_back(to_double(key, Entry{item, e.line}));
  }
  return out;
}

// "re" or "re:im" per entry.
std::vector<cplx> to_complex_list(const std::string& key, const Entry& e) {
  std::vector<cplx> out;
  for (const auto& item : split_list(e.value)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.emplace_back(to_double(key, Entry{item, e.line}), 0.0);
    } else {
      out.emplace_back(to_double(key, Entry{trim(item.substr(0, colon)), e.line}),
                       to_double(key, Entry{trim(item.substr(colon + 1)), e.line}));
    }
  }
  return out;
}

int to_int_checked(const std::string& key, const Entry& e) {
  const long long x = to_int(key, e);
  if (x < -1'000'000'000LL || x > 1'000'000'000LL) fail_at(e.line, key + " is out of range");
  return static_cast<int>(x);
}

[[noreturn]] void invalid(const std::string& what) { throw ValidationError(what); }

}  // namespace

const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::kSpins:
      return "spins";
    case ModelKind::kHeisenberg:
      return "heisenberg";
    case ModelKind::kFermions:
      return "fermions";
    case ModelKind::kContact:
      return "contact";
  }
  return "?";
}

void ExperimentConfig::override_seed(std::uint64_t seed) {
  spins.seed = seed;
  dynamics.seed = seed;
}

void ExperimentConfig::validate() const {
  switch (model) {
    case ModelKind::kSpins:
    case ModelKind::kHeisenberg:
      spins.validate();
      if (observable.name != "sx_total" && observable.name != "sz_total" &&
          observable.name != "sz_site") {
        invalid("observable.name must be sx_total, sz_total or sz_site for spin models");
      }
      if (observable.name == "sz_site" && (observable.site < 0 || observable.site >= spins.n)) {
        invalid("observable.site must be in 0..spins.n-1");
      }
      break;
    case ModelKind::kFermions:
      fermions.validate();
      if (observable.name != "n_ell" && observable.name != "h_ell") {
        invalid("observable.name must be n_ell or h_ell for fermions");
      }
      break;
    case ModelKind::kContact:
      contact.validate();
      if (observable.name != "h1") invalid("observable.name must be h1 for contact");
      break;
  }
  if (model != ModelKind::kContact && !window.set) {
    invalid("window.e and window.delta_e are required for this model");
  }
  if (window.set && !(window.delta_e > 0.0)) invalid("window.delta_e must be > 0");
  if (!(observable.scale > 0.0)) invalid("observable.scale must be > 0");
  if (!(observable.k_slack >= 0.0)) invalid("observable.k_slack must be >= 0");
  dynamics.params.validate();
  if (dynamics.t_max && !(*dynamics.t_max > 0.0)) invalid("dynamics.t_max must be > 0");
  if (dynamics.n_points < 1) invalid("dynamics.n_points must be >= 1");
  if (dynamics.degeneracy_tol && !(*dynamics.degeneracy_tol >= 0.0)) {
    invalid("dynamics.degeneracy_tol must be >= 0");
  }
  if (dynamics.initial == InitialKind::kCustom && dynamics.coefficients.empty()) {
    invalid("dynamics.coefficients is required for a custom initial state");
  }
  if (scan.theta_points < 1) invalid("scan.theta_points must be >= 1");
  if (!(scan.theta_tol >= 0.0)) invalid("scan.theta_tol must be >= 0");
  if (scan.volumes.empty()) invalid("scan.volumes must not be empty");
  if (scan.tolerances.empty()) invalid("scan.tolerances must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_at(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_at(line_no, "missing key");
    if (value.empty()) fail_at(line_no, "missing value for " + key);
    if (entries.count(key)) fail_at(line_no, "repeated key '" + key + "'");
    entries[key] = Entry{value, line_no};
    cfg.echo.emplace_back(key, value);
  }

  std::optional<std::uint64_t> seed;
  bool theta_set = false;
  bool spins_seed_set = false;
  bool dyn_seed_set = false;
  bool have_e = false;
  bool have_de = false;
  bool have_scale = false;

  using Handler = std::function<void(const std::string&, const Entry&)>;
  const std::map<std::string, Handler> handlers{
      {"model",
       [&](const std::string& k, const Entry& e) {
         if (e.value == "spins") cfg.model = ModelKind::kSpins;
         else if (e.value == "heisenberg") cfg.model = ModelKind::kHeisenberg;
         else if (e.value == "fermions") cfg.model = ModelKind::kFermions;
         else if (e.value == "contact") cfg.model = ModelKind::kContact;
         else fail_at(e.line, k + " must be spins, heisenberg, fermions or contact");
       }},
      {"seed", [&](const std::string& k, const Entry& e) { seed = to_u64(k, e); }},
      {"output.dir", [&](const std::string&, const Entry& e) { cfg.output_dir = e.value; }},
      {"spins.n", [&](const std::string& k, const Entry& e) { cfg.spins.n = to_int_checked(k, e); }},
      {"spins.h_max", [&](const std::string& k, const Entry& e) { cfg.spins.h_max = to_double(k, e); }},
      {"spins.seed",
       [&](const std::string& k, const Entry& e) {
         cfg.spins.seed = to_u64(k, e);
         spins_seed_set = true;
       }},
      {"heisenberg.j", [&](const std::string& k, const Entry& e) { cfg.spins.coupling = to_double(k, e); }},
      {"heisenberg.periodic", [&](const std::string& k, const Entry& e) { cfg.spins.periodic = to_bool(k, e); }},
      {"heisenberg.field_operator",
       [&](const std::string& k, const Entry& e) {
         if (e.value == "sz") cfg.spins.field_operator = spins::FieldOperator::kSz;
         else if (e.value == "pauli") cfg.spins.field_operator = spins::FieldOperator::kPauli;
         else fail_at(e.line, k + " must be sz or pauli");
       }},
      {"heisenberg.field_sign", [&](const std::string& k, const Entry& e) { cfg.spins.field_sign = to_double(k, e); }},
      {"fermions.L", [&](const std::string& k, const Entry& e) { cfg.fermions.L = to_int_checked(k, e); }},
      {"fermions.N", [&](const std::string& k, const Entry& e) { cfg.fermions.N = to_int_checked(k, e); }},
      {"fermions.ell", [&](const std::string& k, const Entry& e) { cfg.fermions.ell = to_int_checked(k, e); }},
      {"fermions.theta",
       [&](const std::string& k, const Entry& e) {
         cfg.fermions.theta = to_double(k, e);
         theta_set = true;
       }},
      {"contact.eps0", [&](const std::string& k, const Entry& e) { cfg.contact.eps0 = to_double(k, e); }},
      {"contact.eps", [&](const std::string& k, const Entry& e) { cfg.contact.eps = to_double(k, e); }},
      {"contact.V", [&](const std::string& k, const Entry& e) { cfg.contact.V = to_double(k, e); }},
      {"contact.m", [&](const std::string& k, const Entry& e) { cfg.contact.m = to_int_checked(k, e); }},
      {"contact.entropy",
       [&](const std::string& k, const Entry& e) {
         if (e.value == "log") cfg.contact.entropy = contact::Entropy::kLog;
         else if (e.value == "sqrt") cfg.contact.entropy = contact::Entropy::kSqrt;
         else fail_at(e.line, k + " must be log or sqrt");
       }},
      {"window.e",
       [&](const std::string& k, const Entry& e) {
         cfg.window.e = to_double(k, e);
         have_e = true;
       }},
      {"window.delta_e",
       [&](const std::string& k, const Entry& e) {
         cfg.window.delta_e = to_double(k, e);
         have_de = true;
       }},
      {"observable.name", [&](const std::string&, const Entry& e) { cfg.observable.name = e.value; }},
      {"observable.site", [&](const std::string& k, const Entry& e) { cfg.observable.site = to_int_checked(k, e); }},
      {"observable.scale",
       [&](const std::string& k, const Entry& e) {
         cfg.observable.scale = to_double(k, e);
         have_scale = true;
       }},
      {"observable.k_slack", [&](const std::string& k, const Entry& e) { cfg.observable.k_slack = to_double(k, e); }},
      {"dynamics.t_max", [&](const std::string& k, const Entry& e) { cfg.dynamics.t_max = to_double(k, e); }},
      {"dynamics.n_points",
       [&](const std::string& k, const Entry& e) { cfg.dynamics.n_points = to_u64(k, e); }},
      {"dynamics.eta", [&](const std::string& k, const Entry& e) { cfg.dynamics.params.eta = to_double(k, e); }},
      {"dynamics.delta", [&](const std::string& k, const Entry& e) { cfg.dynamics.params.delta = to_double(k, e); }},
      {"dynamics.s", [&](const std::string& k, const Entry& e) { cfg.dynamics.params.s = to_double(k, e); }},
      {"dynamics.seed",
       [&](const std::string& k, const Entry& e) {
         cfg.dynamics.seed = to_u64(k, e);
         dyn_seed_set = true;
       }},
      {"dynamics.initial_state",
       [&](const std::string& k, const Entry& e) {
         if (e.value == "uniform") cfg.dynamics.initial = InitialKind::kUniform;
         else if (e.value == "basis_index") cfg.dynamics.initial = InitialKind::kBasisIndex;
         else if (e.value == "custom") cfg.dynamics.initial = InitialKind::kCustom;
         else fail_at(e.line, k + " must be uniform, basis_index or custom");
       }},
      {"dynamics.basis_index",
       [&](const std::string& k, const Entry& e) { cfg.dynamics.basis_index = to_u64(k, e); }},
      {"dynamics.coefficients",
       [&](const std::string& k, const Entry& e) { cfg.dynamics.coefficients = to_complex_list(k, e); }},
      {"dynamics.degeneracy_tol",
       [&](const std::string& k, const Entry& e) { cfg.dynamics.degeneracy_tol = to_double(k, e); }},
      {"scan.theta_points", [&](const std::string& k, const Entry& e) { cfg.scan.theta_points = to_u64(k, e); }},
      {"scan.theta_tol", [&](const std::string& k, const Entry& e) { cfg.scan.theta_tol = to_double(k, e); }},
      {"scan.volumes", [&](const std::string& k, const Entry& e) { cfg.scan.volumes = to_doubles(k, e); }},
      {"scan.tolerances", [&](const std::string& k, const Entry& e) { cfg.scan.tolerances = to_doubles(k, e); }},
  };

  if (!entries.count("model")) throw ValidationError("missing required key 'model'");
  for (const auto& [key, entry] : entries) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) fail_at(entry.line, "unknown key '" + key + "'");
    it->second(key, entry);
  }

  if (seed) {
    if (!spins_seed_set) cfg.spins.seed = *seed;
    if (!dyn_seed_set) cfg.dynamics.seed = *seed;
  }
  if (!theta_set) cfg.fermions.theta = fermions::FermionModelSpec::default_theta(cfg.fermions.L);
  if (have_e != have_de) throw ValidationError("window.e and window.delta_e must be given together");
  cfg.window.set = have_e && have_de;
  if (cfg.observable.name.empty()) throw ValidationError("missing required key 'observable.name'");
  if (!have_scale) throw ValidationError("missing required key 'observable.scale'");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace eqnorm
