#pragma once

// Model-independent core: dense Hermitian diagonalization, energy windows,
// degeneracy grouping, microcanonical averages and per-eigenstate normality
// certificates.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eqnorm {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr Eigen::Index kDefaultDenseCap = 4096;

class HermitianOperator {
 public:
  // Throws ValidationError naming the worst (i, j) pair when
  // |a_ij - conj(a_ji)| exceeds tol * max(1, max|a|).
  explicit HermitianOperator(ComplexMatrix entries, double tol = 1e-12);

  static HermitianOperator from_real(const RealMatrix& entries);
  static HermitianOperator diagonal(std::span<const double> values);
  static HermitianOperator identity(Eigen::Index dim);

  Eigen::Index dim() const { return entries_.rows(); }
  const ComplexMatrix& matrix() const { return entries_; }

  // True when every imaginary part is exactly zero.
  bool is_real() const { return real_; }
  // True when every off-diagonal entry is exactly zero.
  bool is_diagonal() const { return diagonal_; }

 private:
  ComplexMatrix entries_;
  bool real_ = false;
  bool diagonal_ = false;
};

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  ComplexMatrix eigenvectors;    // column alpha is psi_alpha
  // Set when every eigenvector is a standard basis vector: psi_alpha =
  // e_{basis_of[alpha]}. Lets observables skip the dense rotation.
  std::vector<Eigen::Index> basis_of;
  // Set when every eigenvector has zero imaginary part.
  bool real_vectors = false;

  Eigen::Index dim() const { return eigenvalues.size(); }
  bool is_standard_basis() const { return !basis_of.empty(); }
};

struct DecomposeOptions {
  Eigen::Index max_dim = kDefaultDenseCap;
  // Check ordering, orthonormality and reconstruction after solving.
  bool verify = true;
};

SpectralDecomposition eigendecompose(const HermitianOperator& h,
                                     const DecomposeOptions& options = {});

// Throws NumericalError if ordering, orthonormality (1e-9) or reconstruction
// (1e-8 * max|E|) fails.
void verify_decomposition(const HermitianOperator& h,
                          const SpectralDecomposition& sd);

struct EnergyWindow {
  double e_min = 0.0;
  double e_max = 0.0;
  std::vector<std::size_t> indices;  // ascending

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

// Closed interval [e, e + delta_e] over ascending eigenvalues. Throws
// ValidationError for delta_e <= 0 and EmptyWindowError if nothing falls
// inside.
EnergyWindow select_window(std::span<const double> ascending, double e,
                           double delta_e);
EnergyWindow select_window(const SpectralDecomposition& sd, double e,
                           double delta_e);

struct DegeneracyGroups {
  double tolerance = 0.0;
  std::vector<std::vector<std::size_t>> groups;

  std::size_t max_group_size() const;
  bool nondegenerate() const { return max_group_size() <= 1; }
};

// Single-linkage clustering of values (any order) by gap <= tol. Groups are
// ordered by value, indices within a group ascending by value.
DegeneracyGroups detect_degeneracies(std::span<const double> values,
                                     double tol);
DegeneracyGroups detect_degeneracies(const SpectralDecomposition& sd,
                                     double tol);

// 1e-9 times the spread of the values (or 1e-9 if they are all equal).
double default_degeneracy_tolerance(std::span<const double> values);

struct ObservableSpec {
  ObservableSpec(HermitianOperator op, double scale);

  HermitianOperator op;
  double scale;  // typical magnitude, user supplied
};

// <psi_a, A psi_a> and <psi_a, A^2 psi_a> for every a in the window.
struct WindowMoments {
  std::vector<double> mean;
  std::vector<double> second;
};

WindowMoments window_moments(const ObservableSpec& a,
                             const SpectralDecomposition& sd,
                             const EnergyWindow& w);

struct NormalityReport {
  double mc_average = 0.0;
  double scale = 1.0;
  std::vector<std::size_t> indices;       // eigenstate index per entry
  std::vector<double> per_state_mean;     // <psi, A psi>
  std::vector<double> per_state_variance; // <psi, (A - mc)^2 psi>
  double zeta = 0.0;                      // max variance / scale^2
  std::size_t worst_index = 0;            // eigenstate attaining the max
  double window_variance = 0.0;           // mean of per_state_variance
};

// Assembles a certificate from per-state first and second moments. The
// microcanonical average is the pairwise mean of `means`; variances are
// second - 2 mc mean + mc^2.
NormalityReport certificate_from_moments(std::span<const std::size_t> indices,
                                         std::span<const double> means,
                                         std::span<const double> seconds,
                                         double scale);

double mc_average(const ObservableSpec& a, const SpectralDecomposition& sd,
                  const EnergyWindow& w);
NormalityReport normality_certificate(const ObservableSpec& a,
                                      const SpectralDecomposition& sd,
                                      const EnergyWindow& w);
double window_variance(const ObservableSpec& a,
                       const SpectralDecomposition& sd,
                       const EnergyWindow& w);

// <psi_a, A psi_b> for a, b in the window.
ComplexMatrix window_block(const HermitianOperator& a,
                           const SpectralDecomposition& sd,
                           const EnergyWindow& w);

// <psi_a, (A - shift)^2 psi_b> for a, b in the window, computed from the
// full-space operator.
ComplexMatrix deviation_block(const HermitianOperator& a, double shift,
                              const SpectralDecomposition& sd,
                              const EnergyWindow& w);

std::vector<double> window_energies(const SpectralDecomposition& sd,
                                    const EnergyWindow& w);

}  // namespace eqnorm
