#pragma once

// Unitary evolution of window states in the energy eigenbasis, expectation
// time series, long-time averages, the good-set fraction of the main
// approach-to-equilibrium bound, Chebyshev tails and uniform state sampling.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "eqnorm/spectral.hpp"

namespace eqnorm {

// Coefficients c_a over the window eigenstates; unit norm within 1e-10.
class WindowState {
 public:
  explicit WindowState(std::vector<cplx> coefficients);

  // Rescales to unit norm; throws ValidationError for a zero vector.
  static WindowState normalized(std::vector<cplx> coefficients);

  const std::vector<cplx>& coefficients() const { return c_; }
  std::size_t size() const { return c_.size(); }
  double norm() const;

 private:
  std::vector<cplx> c_;
};

struct TimeGrid {
  double t_max = 0.0;
  std::vector<double> points;

  // n points k * T / (n - 1), k = 0..n-1 (a single point sits at 0).
  static TimeGrid uniform(double t_max, std::size_t n_points);
};

struct TheoremParams {
  double eta = 0.1;
  double delta = 0.1;
  double s = 0.5;

  void validate() const;
  double zeta_required() const { return 2.0 * eta * eta * delta; }
};

struct GoodSetResult {
  double fraction = 0.0;
  double threshold = 0.0;
  std::vector<double> series;
};

WindowState evolve(const WindowState& state, std::span<const double> energies,
                   double t);

// <phi(t), B phi(t)> for each grid point, where `block` is the window matrix
// of a Hermitian observable B.
std::vector<double> expectation_series(const WindowState& state0,
                                       const ComplexMatrix& block,
                                       std::span<const double> energies,
                                       const TimeGrid& grid);

// Infinite-time average: sum over pairs with |E_a - E_b| <= tol of
// conj(c_a) c_b B_ab.
double long_time_average(const WindowState& state0, const ComplexMatrix& block,
                         std::span<const double> energies, double tol);

// `deviation` is the window block of (A - <A>_mc)^2. The fraction counts grid
// points with d(t) <= (scale * eta)^2.
GoodSetResult good_set(const WindowState& state0,
                       const ComplexMatrix& deviation,
                       std::span<const double> energies, const TimeGrid& grid,
                       const TheoremParams& params, double scale);

GoodSetResult good_set_from_series(std::vector<double> series,
                                   double threshold);

// (eta / s)^2
double chebyshev_tail(const TheoremParams& params);

class MeasurementDistribution {
 public:
  MeasurementDistribution() = default;
  explicit MeasurementDistribution(
      std::vector<std::pair<double, double>> outcomes)
      : outcomes_(std::move(outcomes)) {}

  // (eigenvalue, probability), eigenvalues ascending.
  const std::vector<std::pair<double, double>>& outcomes() const {
    return outcomes_;
  }
  double total() const;
  // Probability of |a - center| >= radius.
  double tail_mass(double center, double radius) const;
  // sum_a (a - center)^2 p_a
  double second_moment(double center) const;

 private:
  std::vector<std::pair<double, double>> outcomes_;
};

// Outcome distribution of measuring A on a full-space state, given A's own
// spectral decomposition. Eigenvalues closer than tol are one outcome.
MeasurementDistribution measurement_distribution(
    std::span<const cplx> full_state, const SpectralDecomposition& observable,
    double tol = 1e-9);

// Full-space vector sum_a c_a psi_a for a window state.
std::vector<cplx> to_full_space(const WindowState& state,
                                const SpectralDecomposition& sd,
                                const EnergyWindow& w);

// Haar-uniform state on the unit sphere of C^n, reproducible per seed.
WindowState sample_uniform(std::size_t window_size, std::uint64_t seed);

// True iff sum_a |c_a|^2 f_a <= 2 (scale eta)^2 delta.
bool check_condition_cd(const WindowState& state, std::span<const double> f,
                        const TheoremParams& params, double scale);

// Smallest gap between distinct levels (gaps <= tol are ignored). Returns 0
// when all levels coincide.
double min_level_spacing(std::span<const double> energies, double tol);

// 50 / (minimum nonzero level spacing); 1 when no such spacing exists.
double default_t_max(std::span<const double> energies, double tol);

}  // namespace eqnorm
