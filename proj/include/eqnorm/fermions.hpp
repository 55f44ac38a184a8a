#pragma once

// Free spinless fermions on a periodic chain of L sites threaded by a phase
// theta. Modes n = 1..L have plane-wave orbitals phi_n(x) = e^{i k_n x}/sqrt(L),
// k_n = 2 pi n / L, and energies cos(k_n + theta). A many-body eigenstate is
// labelled by its set of occupied modes.

#include <cstdint>
#include <span>
#include <vector>

#include "eqnorm/spectral.hpp"

namespace eqnorm::fermions {

inline constexpr int kMaxModes = 64;

struct FermionModelSpec {
  int L = 8;
  int N = 3;
  double theta = 0.0;
  int ell = 4;

  // theta defaults to 0.37 pi / L.
  static FermionModelSpec make(int L, int N, int ell);
  static double default_theta(int L);

  double v() const { return static_cast<double>(ell) / L; }
  // 1 <= N <= L <= 64, 1 <= ell <= L, 0 < theta < pi / L.
  void validate() const;
};

// Bit n-1 set means mode n is occupied.
class OccupationSet {
 public:
  OccupationSet() = default;
  OccupationSet(std::uint64_t bits, int L);
  static OccupationSet from_modes(std::span<const int> modes, int L);

  std::uint64_t bits() const { return bits_; }
  int L() const { return L_; }
  int size() const;
  bool contains(int n) const { return (bits_ >> (n - 1)) & 1U; }
  std::vector<int> modes() const;  // ascending
  OccupationSet complement() const;

  bool operator==(const OccupationSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
  int L_ = 0;
};

// All N-subsets of {1..L} as bit masks, ascending as integers. Throws
// CapacityError past max_count.
std::vector<std::uint64_t> enumerate_sets(int L, int N,
                                          std::uint64_t max_count = 50'000'000);
std::uint64_t binomial(int n, int k);

// Entry n-1 holds eps_n.
std::vector<double> single_particle_energies(int L, double theta);
double many_body_energy(const OccupationSet& gamma, double theta);

// (1/L) sum_{x=1..ell} exp(i 2 pi (n' - n) x / L), from the geometric series.
cplx w_overlap(int n, int n_prime, const FermionModelSpec& spec);
// sum over all mode pairs n < n' of |w_{n,n'}|^2 for a subregion of ell sites;
// no limit on L.
double overlap_pair_sum(int L, int ell);
// min(|n - n'| mod L, L - |n - n'| mod L)
int cyclic_distance(int n, int n_prime, int L);

// C[x-1][y-1] = <Phi, c*_x c_y Phi>.
ComplexMatrix correlation_matrix(const OccupationSet& gamma);

// Site-basis one-body kernels q with Q = sum_{x,y} q[x-1][y-1] c*_x c_y.
ComplexMatrix partial_number_kernel(const FermionModelSpec& spec);
ComplexMatrix partial_hopping_kernel(const FermionModelSpec& spec);
// Same operators expressed as Q = sum_{m,n} qt[m-1][n-1] a*_m a_n.
ComplexMatrix partial_number_mode_kernel(const FermionModelSpec& spec);
ComplexMatrix partial_hopping_mode_kernel(const FermionModelSpec& spec);

struct OneBodyMoments {
  double mean = 0.0;
  double second = 0.0;
  double variance = 0.0;
};

// Expectation and second moment of a one-body operator in a Slater state,
// from the correlation matrix by Wick contraction.
OneBodyMoments wick_moments(const ComplexMatrix& site_kernel,
                            const ComplexMatrix& correlation);

struct NlMoments {
  double mean = 0.0;
  double second = 0.0;
  double variance = 0.0;
  // Wick evaluation of the same quantities.
  double wick_mean = 0.0;
  double wick_second = 0.0;
};

// Closed form mean = vN, variance = (v - v^2) N - 2 sum_{n<n'} |w|^2,
// cross-checked against the Wick evaluation (NumericalError past 1e-10).
NlMoments nl_moments(const OccupationSet& gamma, const FermionModelSpec& spec);

struct CorrectionSum {
  double occupied = 0.0;   // sum over n < n' in gamma of |w_{n,n'}|^2
  double all_pairs = 0.0;  // same over all n < n' in {1..L}
  double bound = 0.0;      // 2 ell
};

// Throws NumericalError if all_pairs exceeds 2 ell.
CorrectionSum correction_sum(const OccupationSet& gamma,
                             const FermionModelSpec& spec);

struct HlMoments {
  double mean = 0.0;       // v E_Gamma
  double second = 0.0;     // Wick, site basis
  double variance = 0.0;
  double mode_second = 0.0;  // Wick, mode basis; independent route
  // second - (v E)^2 - (v - v^2) sum eps^2
  double remainder = 0.0;
  double slack = 0.0;  // K * ell
  bool remainder_ok = false;
  // variance <= (v - v^2) N + K ell
  bool variance_ok = false;
};

HlMoments hl_moments(const OccupationSet& gamma, const FermionModelSpec& spec,
                     double k_slack = 10.0);

enum class Observable { kNl, kNlSquared, kHl, kHlSquared };

// <Phi_gamma, O Phi_gamma'> by the mode-basis selection rules: a one-body
// operator only connects sets differing in at most one mode, its square in at
// most two.
cplx offdiagonal_element(const OccupationSet& gamma,
                         const OccupationSet& gamma_prime, Observable obs,
                         const FermionModelSpec& spec);

// Matrix elements of Q (or Q^2 when squared) between Slater states given as
// mode bit masks, for a mode-basis kernel qt.
cplx mode_matrix_element(const ComplexMatrix& qt, std::uint64_t bra,
                         std::uint64_t ket, int L, bool squared);
// Mean and variance of Q in the Slater state `bits`, from qt alone.
OneBodyMoments mode_moments(const ComplexMatrix& qt, std::uint64_t bits, int L);

struct MaxNlVariance {
  double max_variance = 0.0;  // max over all N-sets
  OccupationSet witness;
  bool exhaustive = false;  // false: certified bound (v - v^2) N with a witness
};

// Maximum N_ell variance over all N-particle eigenstates. Enumerates when
// C(L,N) <= budget; otherwise uses the upper bound (v - v^2) N and a set whose
// pairwise overlaps vanish, which attains it. Throws CapacityError when
// neither route applies.
MaxNlVariance max_nl_variance(const FermionModelSpec& spec,
                              std::uint64_t budget = 2'000'000);

// sum_{n in gamma} exp(i 2 pi n / L)
cplx z_gamma(const OccupationSet& gamma);

struct DegeneracyScan {
  std::vector<double> thetas;
  std::vector<double> min_gap;   // smallest |E_G - E_G'| over distinct sets
  std::vector<bool> flagged;     // min_gap <= tol
  // Odd L only: min gap of eps_n + eps_n' over distinct pairs, and its flag.
  std::vector<double> pair_min_gap;
  std::vector<bool> pair_flagged;

  std::size_t flagged_count() const;
  std::size_t pair_flagged_count() const;
};

// Grid values must lie in [0, pi / L]. Energies are E = Re(z(G) e^{i theta}).
DegeneracyScan degeneracy_scan(int L, int N, std::span<const double> theta_grid,
                               double tol = 1e-10,
                               std::uint64_t max_sets = 200'000);

// theta_k = (k + 1/2) * pi / (L * n) for k < n: interior midpoints.
std::vector<double> theta_grid(int L, std::size_t n);

// ---- Fock-space oracle ----------------------------------------------------

inline constexpr std::uint64_t kMaxFockDim = 4096;

// Occupation-number basis of N fermions on L sites; bit x-1 set means site x
// is occupied. States ascending as integers, c*_x ordered by increasing x.
class FockSpace {
 public:
  FockSpace(int L, int N);

  int L() const { return L_; }
  int N() const { return N_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<std::uint64_t>& basis() const { return basis_; }
  // Index of a configuration, or -1.
  std::ptrdiff_t index_of(std::uint64_t config) const;

  // Dense matrix of sum_{x,y} q[x-1][y-1] c*_x c_y.
  ComplexMatrix one_body(const ComplexMatrix& q) const;
  // Slater state prod_{n in gamma, ascending} a*_n |vac>.
  Eigen::VectorXcd slater_state(const OccupationSet& gamma) const;

 private:
  int L_;
  int N_;
  std::vector<std::uint64_t> basis_;
};

struct FockOperators {
  ComplexMatrix h;
  ComplexMatrix n_ell;
  ComplexMatrix h_ell;
};

FockOperators fock_oracle(const FermionModelSpec& spec);

}  // namespace eqnorm::fermions
