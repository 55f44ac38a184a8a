#include "eqnorm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "eqnorm/error.hpp"
#include "eqnorm/parallel.hpp"
#include "eqnorm/simd.hpp"

namespace eqnorm {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": length mismatch (" << a << " vs " << b << ")";
    throw ValidationError(msg.str());
  }
}

void require_block(const ComplexMatrix& block, std::size_t n) {
  if (block.rows() != static_cast<Eigen::Index>(n) ||
      block.cols() != static_cast<Eigen::Index>(n)) {
    throw ValidationError("window block does not match the state size");
  }
  const double bound = 1e-10 * std::max(1.0, block.cwiseAbs().maxCoeff());
  if ((block - block.adjoint()).cwiseAbs().maxCoeff() > bound) {
    throw ValidationError("window block is not Hermitian");
  }
}

void phase_into(std::span<const cplx> c, std::span<const double> e, double t,
                std::vector<cplx>& out) {
  out.resize(c.size());
  for (std::size_t a = 0; a < c.size(); ++a) {
    const double phi = -e[a] * t;
    out[a] = c[a] * cplx(std::cos(phi), std::sin(phi));
  }
}

// Uniform double in (0, 1) from the top 53 bits.
double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

WindowState::WindowState(std::vector<cplx> coefficients)
    : c_(std::move(coefficients)) {
  if (c_.empty()) throw ValidationError("window state must be non-empty");
  const double n = norm();
  if (std::abs(n * n - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "window state is not normalized (norm^2 = " << n * n << ")";
    throw ValidationError(msg.str());
  }
}

WindowState WindowState::normalized(std::vector<cplx> coefficients) {
  const double n2 = simd::norm2(coefficients);
  if (!(n2 > 0.0)) throw ValidationError("cannot normalize a zero state");
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& x : coefficients) x *= inv;
  return WindowState(std::move(coefficients));
}

double WindowState::norm() const { return std::sqrt(simd::norm2(c_)); }

TimeGrid TimeGrid::uniform(double t_max, std::size_t n_points) {
  if (n_points == 0) throw ValidationError("time grid needs at least one point");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw ValidationError("time grid t_max must be finite and >= 0");
  }
  if (n_points > 1 && !(t_max > 0.0)) {
    throw ValidationError("time grid with several points needs t_max > 0");
  }
  TimeGrid g;
  g.t_max = t_max;
  g.points.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    g.points[k] = n_points == 1 ? 0.0
                                : t_max * static_cast<double>(k) /
                                      static_cast<double>(n_points - 1);
  }
  return g;
}

void TheoremParams::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("dynamics.eta must be in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("dynamics.delta must be in (0, 1)");
  if (!(s > 0.0)) throw ValidationError("dynamics.s must be > 0");
}

WindowState evolve(const WindowState& state, std::span<const double> energies,
                   double t) {
  require_same_length(state.size(), energies.size(), "evolve");
  std::vector<cplx> out;
  phase_into(state.coefficients(), energies, t, out);
  return WindowState(std::move(out));
}

std::vector<double> expectation_series(const WindowState& state0,
                                       const ComplexMatrix& block,
                                       std::span<const double> energies,
                                       const TimeGrid& grid) {
  const std::size_t n = state0.size();
  require_same_length(n, energies.size(), "expectation_series");
  require_block(block, n);
  const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
  // A common energy offset is a global phase; removing it keeps E t small.
  std::vector<double> shifted(energies.begin(), energies.end());
  if (n > 0) {
    const double ref = *std::min_element(shifted.begin(), shifted.end());
    for (auto& e : shifted) e -= ref;
  }
  std::vector<double> series(grid.points.size());
  parallel_for(grid.points.size(), [&](std::size_t k) {
    std::vector<cplx> y;
    phase_into(state0.coefficients(), shifted, grid.points[k], y);
    const cplx v = simd::hermitian_form(block.data(), n, y);
    if (std::abs(v.imag()) > 1e-9 * scale) {
      std::ostringstream msg;
      msg << "expectation at t=" << grid.points[k] << " has imaginary residue "
          << v.imag();
      throw NumericalError(msg.str());
    }
    series[k] = v.real();
  });
  return series;
}

double long_time_average(const WindowState& state0, const ComplexMatrix& block,
                         std::span<const double> energies, double tol) {
  const std::size_t n = state0.size();
  require_same_length(n, energies.size(), "long_time_average");
  require_block(block, n);
  const auto& c = state0.coefficients();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return energies[a] < energies[b];
  });
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = order[i];
    const auto ai = static_cast<Eigen::Index>(a);
    terms.push_back(std::norm(c[a]) * block(ai, ai).real());
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t b = order[j];
      if (energies[b] - energies[a] > tol) break;
      const auto bi = static_cast<Eigen::Index>(b);
      // (a, b) and (b, a) together give twice the real part.
      terms.push_back(2.0 * (std::conj(c[a]) * c[b] * block(ai, bi)).real());
    }
  }
  return simd::sum(terms);
}

GoodSetResult good_set_from_series(std::vector<double> series,
                                   double threshold) {
  GoodSetResult r;
  r.threshold = threshold;
  std::size_t good = 0;
  for (double d : series) {
    if (d <= threshold) ++good;
  }
  r.fraction = series.empty() ? 0.0
                              : static_cast<double>(good) /
                                    static_cast<double>(series.size());
  r.series = std::move(series);
  return r;
}

GoodSetResult good_set(const WindowState& state0,
                       const ComplexMatrix& deviation,
                       std::span<const double> energies, const TimeGrid& grid,
                       const TheoremParams& params, double scale) {
  const double threshold = (scale * params.eta) * (scale * params.eta);
  return good_set_from_series(
      expectation_series(state0, deviation, energies, grid), threshold);
}

double chebyshev_tail(const TheoremParams& params) {
  if (!(params.s > 0.0)) throw ValidationError("Chebyshev scale s must be > 0");
  const double r = params.eta / params.s;
  return r * r;
}

double MeasurementDistribution::total() const {
  std::vector<double> p;
  p.reserve(outcomes_.size());
  for (const auto& o : outcomes_) p.push_back(o.second);
  return simd::sum(p);
}

double MeasurementDistribution::tail_mass(double center, double radius) const {
  std::vector<double> p;
  for (const auto& [a, prob] : outcomes_) {
    if (std::abs(a - center) >= radius) p.push_back(prob);
  }
  return simd::sum(p);
}

double MeasurementDistribution::second_moment(double center) const {
  std::vector<double> p;
  p.reserve(outcomes_.size());
  for (const auto& [a, prob] : outcomes_) p.push_back((a - center) * (a - center) * prob);
  return simd::sum(p);
}

MeasurementDistribution measurement_distribution(
    std::span<const cplx> full_state, const SpectralDecomposition& observable,
    double tol) {
  const auto n = static_cast<std::size_t>(observable.dim());
  require_same_length(full_state.size(), n, "measurement_distribution");
  std::vector<double> prob(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const cplx amp = simd::dot(
        std::span<const cplx>(observable.eigenvectors.col(col).data(), n),
        full_state);
    prob[i] = std::norm(amp);
  }
  std::vector<std::pair<double, double>> outcomes;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && observable.eigenvalues(static_cast<Eigen::Index>(j)) -
                            observable.eigenvalues(static_cast<Eigen::Index>(j - 1)) <=
                        tol) {
      ++j;
    }
    std::vector<double> vals, ps;
    for (std::size_t k = i; k < j; ++k) {
      vals.push_back(observable.eigenvalues(static_cast<Eigen::Index>(k)));
      ps.push_back(prob[k]);
    }
    outcomes.emplace_back(simd::sum(vals) / static_cast<double>(j - i),
                          simd::sum(ps));
    i = j;
  }
  return MeasurementDistribution(std::move(outcomes));
}

std::vector<cplx> to_full_space(const WindowState& state,
                                const SpectralDecomposition& sd,
                                const EnergyWindow& w) {
  require_same_length(state.size(), w.size(), "to_full_space");
  Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(sd.dim());
  for (std::size_t k = 0; k < w.size(); ++k) {
    phi += state.coefficients()[k] *
           sd.eigenvectors.col(static_cast<Eigen::Index>(w.indices[k]));
  }
  return {phi.data(), phi.data() + phi.size()};
}

WindowState sample_uniform(std::size_t window_size, std::uint64_t seed) {
  if (window_size == 0) throw ValidationError("window size must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<cplx> c(window_size);
  for (auto& x : c) {
    const double r = std::sqrt(-2.0 * std::log(open_unit(rng)));
    const double phi = 2.0 * std::numbers::pi * open_unit(rng);
    x = cplx(r * std::cos(phi), r * std::sin(phi));
  }
  return WindowState::normalized(std::move(c));
}

bool check_condition_cd(const WindowState& state, std::span<const double> f,
                        const TheoremParams& params, double scale) {
  require_same_length(state.size(), f.size(), "check_condition_cd");
  for (double x : f) {
    if (x < -1e-10) throw ValidationError("per-state variances must be >= 0");
  }
  const double lhs = simd::weighted_norm2(state.coefficients(), f);
  const double bound = 2.0 * (scale * params.eta) * (scale * params.eta) * params.delta;
  return lhs <= bound;
}

double min_level_spacing(std::span<const double> energies, double tol) {
  std::vector<double> e(energies.begin(), energies.end());
  std::sort(e.begin(), e.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < e.size(); ++i) {
    const double gap = e[i] - e[i - 1];
    if (gap > tol) best = std::min(best, gap);
  }
  return std::isfinite(best) ? best : 0.0;
}

double default_t_max(std::span<const double> energies, double tol) {
  const double gap = min_level_spacing(energies, tol);
  return gap > 0.0 ? 50.0 / gap : 1.0;
}

}  // namespace eqnorm
