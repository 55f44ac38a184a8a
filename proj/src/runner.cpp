#include "eqnorm/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>

#include "eqnorm/contact.hpp"
#include "eqnorm/csv.hpp"
#include "eqnorm/dynamics.hpp"
#include "eqnorm/error.hpp"
#include "eqnorm/fermions.hpp"
#include "eqnorm/parallel.hpp"
#include "eqnorm/simd.hpp"
#include "eqnorm/spins.hpp"

namespace eqnorm {

inline constexpr const char* kVersion = "0.1.0";

namespace {

constexpr std::size_t kMaxDynamicsWindow = 4096;
constexpr std::uint64_t kFermionSetBudget = 2'000'000;

// Everything the certificate and the dynamics need from one model.
struct Prepared {
  std::vector<double> energies;    // window, ascending
  std::vector<std::size_t> ids;    // label per window state
  NormalityReport certificate;
  bool complete = true;
  double e_min = 0.0;
  double e_max = 0.0;
  std::function<ComplexMatrix()> block;
  std::function<ComplexMatrix(double)> deviation;
  // Window coefficients of the basis state selected by dynamics.basis_index.
  std::function<std::vector<cplx>(std::size_t)> basis_state;
  std::vector<std::string> notes;
};

HermitianOperator spin_observable(const ExperimentConfig& cfg) {
  const int n = cfg.spins.n;
  if (cfg.observable.name == "sx_total") return spins::sx_total(n);
  if (cfg.observable.name == "sz_total") return spins::sz_total(n);
  return spins::sz_site(n, cfg.observable.site);
}

Prepared prepare_dense(std::shared_ptr<const SpectralDecomposition> sd,
                       std::shared_ptr<const HermitianOperator> op, const EnergyWindow& w,
                       double scale) {
  Prepared p;
  p.energies = window_energies(*sd, w);
  p.ids = w.indices;
  p.e_min = w.e_min;
  p.e_max = w.e_max;
  const ObservableSpec obs(*op, scale);
  const auto mom = window_moments(obs, *sd, w);
  p.certificate = certificate_from_moments(w.indices, mom.mean, mom.second, scale);
  p.block = [sd, op, w] { return window_block(*op, *sd, w); };
  p.deviation = [sd, op, w](double mc) { return deviation_block(*op, mc, *sd, w); };
  p.basis_state = [sd, w](std::size_t k) {
    if (k >= static_cast<std::size_t>(sd->dim())) {
      throw ValidationError("dynamics.basis_index exceeds the Hilbert space dimension");
    }
    std::vector<cplx> c(w.size());
    for (std::size_t a = 0; a < w.size(); ++a) {
      c[a] = std::conj(sd->eigenvectors(static_cast<Eigen::Index>(k),
                                        static_cast<Eigen::Index>(w.indices[a])));
    }
    return c;
  };
  return p;
}

Prepared prepare_spins(const ExperimentConfig& cfg) {
  const auto h = cfg.model == ModelKind::kSpins ? spins::build_free_hamiltonian(cfg.spins)
                                                : spins::build_heisenberg(cfg.spins);
  auto sd = std::make_shared<const SpectralDecomposition>(eigendecompose(h));
  const auto w = select_window(*sd, cfg.window.e, cfg.window.delta_e);
  auto op = std::make_shared<const HermitianOperator>(spin_observable(cfg));
  return prepare_dense(sd, op, w, cfg.observable.scale);
}

Prepared prepare_contact(const ExperimentConfig& cfg) {
  const auto& spec = cfg.contact;
  const std::uint64_t d = contact::block_dimension(spec);
  if (d <= static_cast<std::uint64_t>(kDefaultDenseCap)) {
    auto sd = std::make_shared<SpectralDecomposition>();
    const auto n = static_cast<Eigen::Index>(d);
    sd->eigenvalues.resize(n);
    sd->eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto pair = contact::analytic_eigenpair(d - static_cast<std::uint64_t>(i), spec);
      sd->eigenvalues(i) = pair.energy;
      sd->eigenvectors.col(i) = pair.vector.cast<cplx>();
    }
    sd->real_vectors = true;
    const auto diag = contact::h1_diagonal(spec);
    auto op = std::make_shared<const HermitianOperator>(HermitianOperator::diagonal(diag));
    EnergyWindow w;
    if (cfg.window.set) {
      w = select_window(*sd, cfg.window.e, cfg.window.delta_e);
    } else {
      w.e_min = spec.m * spec.eps0 - spec.eps;
      w.e_max = spec.m * spec.eps0 + spec.eps;
      w.indices.resize(d);
      std::iota(w.indices.begin(), w.indices.end(), std::size_t{0});
    }
    return prepare_dense(sd, op, w, cfg.observable.scale);
  }

  if (cfg.window.set) {
    throw CapacityError("a sub-window of the contact block needs block dimension <= 4096");
  }
  const auto ex = contact::h1_extremes(spec, cfg.observable.scale);
  const auto sb = contact::sub_blocks(spec);
  Prepared p;
  p.complete = false;
  p.e_min = spec.m * spec.eps0 - spec.eps;
  p.e_max = spec.m * spec.eps0 + spec.eps;
  const std::size_t worst = static_cast<std::size_t>(d - ex.max_variance.ell);
  const auto weights = contact::sub_block_weights(ex.max_variance.ell, spec);
  double mean = 0.0;
  double window_var = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double e1 = static_cast<double>(i + 1) * spec.eps0;
    mean += weights[i] * e1;
    const double dev = e1 - ex.mc_average;
    window_var += dev * dev * static_cast<double>(sb.size[i]) / static_cast<double>(d);
  }
  NormalityReport& c = p.certificate;
  c.mc_average = ex.mc_average;
  c.scale = ex.scale;
  c.indices = {worst};
  c.per_state_mean = {mean};
  c.per_state_variance = {ex.max_variance.value};
  c.zeta = ex.zeta;
  c.worst_index = worst;
  c.window_variance = window_var;
  p.energies = {contact::analytic_energy(ex.max_variance.ell, spec)};
  p.ids = {worst};
  if (!ex.max_variance.exact) {
    p.notes.push_back("maximum search stopped at its budget; zeta is a lower estimate");
  }
  return p;
}

Prepared prepare_fermions(const ExperimentConfig& cfg) {
  const auto& spec = cfg.fermions;
  const auto sets = fermions::enumerate_sets(spec.L, spec.N, kFermionSetBudget);
  const auto eps = fermions::single_particle_energies(spec.L, spec.theta);
  std::vector<double> energy(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) {
    double e = 0.0;
    for (int n = 1; n <= spec.L; ++n) {
      if ((sets[i] >> (n - 1)) & 1U) e += eps[static_cast<std::size_t>(n - 1)];
    }
    energy[i] = e;
  });
  std::vector<std::size_t> order(sets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return energy[a] < energy[b]; });
  std::vector<double> sorted(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = energy[order[i]];
  const auto w = select_window(sorted, cfg.window.e, cfg.window.delta_e);

  auto window_sets = std::make_shared<std::vector<std::uint64_t>>();
  for (std::size_t i : w.indices) window_sets->push_back(sets[order[i]]);
  auto qt = std::make_shared<const ComplexMatrix>(
      cfg.observable.name == "n_ell" ? fermions::partial_number_mode_kernel(spec)
                                     : fermions::partial_hopping_mode_kernel(spec));

  Prepared p;
  p.ids = w.indices;
  p.e_min = w.e_min;
  p.e_max = w.e_max;
  for (std::size_t i : w.indices) p.energies.push_back(sorted[i]);
  std::vector<double> means(w.size());
  std::vector<double> seconds(w.size());
  parallel_for(w.size(), [&](std::size_t a) {
    const auto m = fermions::mode_moments(*qt, (*window_sets)[a], spec.L);
    means[a] = m.mean;
    seconds[a] = m.second;
  });
  p.certificate = certificate_from_moments(w.indices, means, seconds, cfg.observable.scale);

  const int L = spec.L;
  auto fill = [window_sets, qt, L](bool squared, double mc, bool shifted) {
    const std::size_t n = window_sets->size();
    if (n > kMaxDynamicsWindow) throw CapacityError("window too large for dynamics (> 4096 states)");
    const auto ni = static_cast<Eigen::Index>(n);
    ComplexMatrix b = ComplexMatrix::Zero(ni, ni);
    parallel_for(n, [&](std::size_t a) {
      for (std::size_t c = a; c < n; ++c) {
        const auto bra = (*window_sets)[a];
        const auto ket = (*window_sets)[c];
        cplx v = fermions::mode_matrix_element(*qt, bra, ket, L, squared);
        if (shifted) {
          v -= 2.0 * mc * fermions::mode_matrix_element(*qt, bra, ket, L, false);
          if (a == c) v += mc * mc;
        }
        b(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = v;
      }
    });
    for (Eigen::Index a = 0; a < ni; ++a) {
      for (Eigen::Index c = 0; c < a; ++c) b(a, c) = std::conj(b(c, a));
      b(a, a) = b(a, a).real();
    }
    return b;
  };
  p.block = [fill] { return fill(false, 0.0, false); };
  p.deviation = [fill](double mc) { return fill(true, mc, true); };
  p.basis_state = [n = w.size()](std::size_t k) {
    if (k >= n) throw ValidationError("dynamics.basis_index exceeds the window size");
    std::vector<cplx> c(n, 0.0);
    c[k] = 1.0;
    return c;
  };
  if (!(spec.theta > 0.0)) p.notes.push_back("theta is not generic");
  return p;
}

Prepared prepare(const ExperimentConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::kSpins:
    case ModelKind::kHeisenberg:
      return prepare_spins(cfg);
    case ModelKind::kFermions:
      return prepare_fermions(cfg);
    case ModelKind::kContact:
      return prepare_contact(cfg);
  }
  throw Error("unknown model");
}

WindowState initial_state(const ExperimentConfig& cfg, const Prepared& p) {
  const std::size_t n = p.energies.size();
  switch (cfg.dynamics.initial) {
    case InitialKind::kUniform:
      return sample_uniform(n, cfg.dynamics.seed);
    case InitialKind::kBasisIndex: {
      auto c = p.basis_state(cfg.dynamics.basis_index);
      if (simd::norm2(c) < 1e-20) {
        throw ValidationError("dynamics.basis_index has no weight inside the window");
      }
      return WindowState::normalized(std::move(c));
    }
    case InitialKind::kCustom:
      if (cfg.dynamics.coefficients.size() != n) {
        std::ostringstream msg;
        msg << "dynamics.coefficients has " << cfg.dynamics.coefficients.size()
            << " entries but the window holds " << n << " states";
        throw ValidationError(msg.str());
      }
      return WindowState::normalized(cfg.dynamics.coefficients);
  }
  throw Error("unknown initial state kind");
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw NumericalError(std::string("report field ") + what + " is not finite");
  }
}

std::string eigen_version() {
  std::ostringstream s;
  s << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  return s.str();
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kNotApplicable:
      return "not-applicable";
  }
  return "?";
}

RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         bool with_dynamics) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  Prepared p = prepare(cfg);
  RunReport r;
  r.model = model_name(cfg.model);
  r.observable = cfg.observable.name;
  r.window_size = p.complete ? p.energies.size() : static_cast<std::size_t>(
                                                       contact::block_dimension(cfg.contact));
  r.e_min = p.e_min;
  r.e_max = p.e_max;
  r.certificate = p.certificate;
  r.per_state_complete = p.complete;
  r.notes = p.notes;
  r.zeta_required = cfg.dynamics.params.zeta_required();
  r.precondition = r.certificate.zeta <= r.zeta_required ? Verdict::kPass : Verdict::kFail;
  r.chebyshev_tail = chebyshev_tail(cfg.dynamics.params);

  const double deg_tol = cfg.dynamics.degeneracy_tol.value_or(
      p.energies.empty() ? 0.0 : default_degeneracy_tolerance(p.energies));
  if (p.complete) {
    const auto groups = detect_degeneracies(p.energies, deg_tol);
    r.degeneracy = {deg_tol, groups.groups.size(), groups.max_group_size()};
  } else {
    // Closed-form block spectrum: cos(pi l / (D + 1)) is strictly monotone.
    r.degeneracy = {deg_tol, r.window_size, 1};
  }

  {
    CsvWriter csv(out_dir / "certificate.csv", {"state_index", "energy", "mean", "variance"});
    const auto& c = r.certificate;
    for (std::size_t a = 0; a < c.indices.size(); ++a) {
      csv.field(static_cast<std::uint64_t>(c.indices[a]))
          .field(p.energies[a])
          .field(c.per_state_mean[a])
          .field(c.per_state_variance[a])
          .end_row();
    }
  }

  if (with_dynamics) {
    if (!p.complete) {
      throw CapacityError("dynamics needs the contact block within the dense cap (4096)");
    }
    if (p.energies.size() > kMaxDynamicsWindow) {
      throw CapacityError("window too large for dynamics (> 4096 states)");
    }
    const WindowState state = initial_state(cfg, p);
    const double t_max = cfg.dynamics.t_max.value_or(default_t_max(p.energies, deg_tol));
    const auto grid = TimeGrid::uniform(t_max, cfg.dynamics.n_points);
    const double mc = r.certificate.mc_average;
    const ComplexMatrix b = p.block();
    const ComplexMatrix dev = p.deviation(mc);
    const auto expect = expectation_series(state, b, p.energies, grid);
    const auto dsq = expectation_series(state, dev, p.energies, grid);
    const double scale = cfg.observable.scale;
    r.threshold = (scale * cfg.dynamics.params.eta) * (scale * cfg.dynamics.params.eta);
    const auto gs = good_set_from_series(dsq, r.threshold);
    r.dynamics_run = true;
    r.t_max = t_max;
    r.n_points = grid.points.size();
    r.good_set_fraction = gs.fraction;
    r.good_set =
        gs.fraction >= 1.0 - cfg.dynamics.params.delta ? Verdict::kPass : Verdict::kFail;
    r.grid_time_average = simd::sum(dsq) / static_cast<double>(dsq.size());
    r.infinite_time_average = long_time_average(state, dev, p.energies, deg_tol);
    r.predicted_average =
        simd::weighted_norm2(state.coefficients(), r.certificate.per_state_variance);

    CsvWriter csv(out_dir / "timeseries.csv", {"t", "expectation", "deviation_sq", "below_threshold"});
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
      csv.field(grid.points[k]).field(expect[k]).field(dsq[k]).field(dsq[k] <= r.threshold).end_row();
    }
  }

  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_report(r, cfg, out_dir / "report.txt");
  return r;
}

void write_report(const RunReport& r, const ExperimentConfig& cfg,
                  const std::filesystem::path& path) {
  const auto& c = r.certificate;
  for (double x : {c.mc_average, c.zeta, c.window_variance, r.zeta_required, r.e_min, r.e_max,
                   r.threshold, r.t_max, r.grid_time_average, r.infinite_time_average,
                   r.predicted_average, r.chebyshev_tail, r.wall_seconds}) {
    require_finite(x, "numeric");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  auto kv = [&](const std::string& k, const std::string& v) { out << k << ": " << v << '\n'; };
  auto kd = [&](const std::string& k, double v) { kv(k, format_double(v)); };

  for (const auto& [k, v] : cfg.echo) kv("config." + k, v);
  kv("model", r.model);
  kv("observable", r.observable);
  kd("observable.scale", cfg.observable.scale);
  if (cfg.model == ModelKind::kFermions) kd("fermions.theta", cfg.fermions.theta);
  kd("window.e_min", r.e_min);
  kd("window.e_max", r.e_max);
  kv("window.size", std::to_string(r.window_size));
  kd("certificate.mc_average", c.mc_average);
  kd("certificate.zeta", c.zeta);
  kv("certificate.worst_state", std::to_string(c.worst_index));
  kd("certificate.window_variance", c.window_variance);
  kv("certificate.per_state_complete", r.per_state_complete ? "true" : "false");
  kd("theorem.zeta_required", r.zeta_required);
  kv("theorem.precondition", verdict_name(r.precondition));
  kd("theorem.chebyshev_tail", r.chebyshev_tail);
  kd("degeneracy.tolerance", r.degeneracy.tolerance);
  kv("degeneracy.groups", std::to_string(r.degeneracy.groups));
  kv("degeneracy.max_group_size", std::to_string(r.degeneracy.max_group_size));
  kv("dynamics.run", r.dynamics_run ? "true" : "false");
  if (r.dynamics_run) {
    kd("dynamics.t_max", r.t_max);
    kv("dynamics.n_points", std::to_string(r.n_points));
    kd("dynamics.threshold", r.threshold);
    kd("dynamics.good_set_fraction", *r.good_set_fraction);
    kd("dynamics.grid_time_average", r.grid_time_average);
    kd("dynamics.infinite_time_average", r.infinite_time_average);
    kd("dynamics.predicted_average", r.predicted_average);
  }
  kv("theorem.good_set", verdict_name(r.good_set));
  for (std::size_t i = 0; i < r.notes.size(); ++i) kv("note." + std::to_string(i), r.notes[i]);
  kd("wall_seconds", r.wall_seconds);
  kv("threads", std::to_string(thread_budget()));
  kv("versions.eqnorm", kVersion);
  kv("versions.eigen", eigen_version());
  kv("simd.kernels", std::string(simd::active_name()));
  if (!out) throw Error("failed writing " + path.string());
}

std::filesystem::path run_scan(const std::string& kind, const ExperimentConfig& cfg,
                               const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / ("scan_" + kind + ".csv");

  if (kind == "theta") {
    if (cfg.model != ModelKind::kFermions) throw ValidationError("theta scan needs model = fermions");
    const auto grid = fermions::theta_grid(cfg.fermions.L, cfg.scan.theta_points);
    const auto s = fermions::degeneracy_scan(cfg.fermions.L, cfg.fermions.N, grid, cfg.scan.theta_tol);
    const bool pairs = !s.pair_min_gap.empty();
    if (pairs) {
      CsvWriter csv(path, {"theta", "min_gap", "flagged", "pair_min_gap", "pair_flagged"});
      for (std::size_t k = 0; k < grid.size(); ++k) {
        csv.field(s.thetas[k]).field(s.min_gap[k]).field(static_cast<bool>(s.flagged[k]))
            .field(s.pair_min_gap[k]).field(static_cast<bool>(s.pair_flagged[k])).end_row();
      }
    } else {
      CsvWriter csv(path, {"theta", "min_gap", "flagged"});
      for (std::size_t k = 0; k < grid.size(); ++k) {
        csv.field(s.thetas[k]).field(s.min_gap[k]).field(static_cast<bool>(s.flagged[k])).end_row();
      }
    }
    return path;
  }

  if (kind == "volume") {
    if (cfg.model != ModelKind::kContact) throw ValidationError("volume scan needs model = contact");
    CsvWriter csv(path, {"V", "block_dim", "kappa", "max_variance", "zeta", "min_peq", "dim_ratio",
                         "ratio_r1", "bound_r1", "ratios_within", "exact"});
    for (double v : cfg.scan.volumes) {
      auto spec = cfg.contact;
      spec.V = v;
      spec.validate();
      const auto ex = contact::h1_extremes(spec, cfg.observable.scale);
      const auto peq = contact::peq_quantities(spec);
      double ratio = 1.0;
      double bound = 1.0;
      bool within = true;
      if (spec.m >= 4) {
        const auto rs = contact::ratio_scan(spec);
        ratio = rs.rows.front().ratio;
        bound = rs.rows.front().bound;
        within = rs.all_within && rs.monotone;
      }
      csv.field(v).field(ex.dim).field(ex.kappa).field(ex.max_variance.value).field(ex.zeta)
          .field(peq.min_peq.value).field(peq.dim_ratio).field(ratio).field(bound).field(within)
          .field(ex.max_variance.exact && peq.min_peq.exact).end_row();
    }
    return path;
  }

  if (kind == "degeneracy") {
    const Prepared p = prepare(cfg);
    if (!p.complete) throw CapacityError("degeneracy scan needs the window spectrum in memory");
    CsvWriter csv(path, {"tolerance", "groups", "max_group_size", "nondegenerate"});
    for (double tol : cfg.scan.tolerances) {
      if (!(tol >= 0.0)) throw ValidationError("scan.tolerances entries must be >= 0");
      const auto g = detect_degeneracies(p.energies, tol);
      csv.field(tol).field(static_cast<std::uint64_t>(g.groups.size()))
          .field(static_cast<std::uint64_t>(g.max_group_size())).field(g.nondegenerate()).end_row();
    }
    return path;
  }

  throw ValidationError("scan kind must be degeneracy, theta or volume");
}

}  // namespace eqnorm
