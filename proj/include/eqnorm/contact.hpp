#pragma once

// Two identical systems with levels n * eps0 of degeneracy Omega_n, coupled by
// a weak tridiagonal interaction inside the block of total level m. Only that
// block is ever materialized. Eigenpairs of the block are known in closed
// form, so per-eigenstate statistics of the energy of system 1 reduce to sums
// over the m - 1 sub-blocks and work far beyond dense sizes.

#include <cstdint>
#include <vector>

#include "eqnorm/spectral.hpp"

namespace eqnorm::contact {

enum class Entropy { kLog, kSqrt };  // ln(1 + n), sqrt(n)

// Dense constructions refuse any Omega_n above this.
inline constexpr std::uint64_t kOmegaDenseGuard = 1'000'000;

struct ContactModelSpec {
  double eps0 = 1.0;
  double eps = 0.01;
  double V = 2.0;
  Entropy entropy = Entropy::kSqrt;
  int m = 4;

  // eps0 > 0, 0 < eps < eps0 / 10, V >= 0, m even >= 2, entropy strictly
  // concave on 0..m.
  void validate() const;
};

double entropy_value(Entropy s, int n);
const char* entropy_name(Entropy s);

// round(exp(V s_n)), at least 1. Throws CapacityError past the uint64 range.
std::uint64_t omega(int n, const ContactModelSpec& spec);

// sum_{n=1..m-1} Omega_n Omega_{m-n}; CapacityError past the uint64 range.
std::uint64_t block_dimension(const ContactModelSpec& spec);

// Sub-block of level n of system 1 occupies basis positions
// [start[n-1], start[n-1] + size[n-1]) (0-based), n = 1..m-1.
struct SubBlocks {
  std::vector<std::uint64_t> start;
  std::vector<std::uint64_t> size;
  std::uint64_t total = 0;
};
SubBlocks sub_blocks(const ContactModelSpec& spec);

struct BasisEntry {
  int n;
  std::uint64_t j;
  int n_prime;
  std::uint64_t j_prime;
};

// Lexicographic in (n, j, j'); needs every Omega_n <= kOmegaDenseGuard and
// the block within the dense cap.
std::vector<BasisEntry> block_basis(const ContactModelSpec& spec,
                                    std::uint64_t max_dim = kDefaultDenseCap);

// m eps0 + eps cos(pi ell / (D + 1)), 1 <= ell <= D.
double analytic_energy(std::uint64_t ell, const ContactModelSpec& spec);

struct Eigenpair {
  double energy = 0.0;
  Eigen::VectorXd vector;
};
Eigenpair analytic_eigenpair(std::uint64_t ell, const ContactModelSpec& spec,
                             std::uint64_t max_dim = 1ULL << 22);

HermitianOperator build_block(const ContactModelSpec& spec,
                              std::uint64_t max_dim = kDefaultDenseCap);

// n * eps0 for each basis entry.
std::vector<double> h1_diagonal(const ContactModelSpec& spec,
                                std::uint64_t max_dim = kDefaultDenseCap);

// 2 s_{m/2} - s_{m/2-1} - s_{m/2+1}
double kappa(const ContactModelSpec& spec);

// Probability weight of sub-block n in eigenstate ell, entries n = 1..m-1.
std::vector<double> sub_block_weights(std::uint64_t ell, const ContactModelSpec& spec);

// Certificate of H1 over every eigenstate of the block, ordered by ascending
// energy (state i has ell = D - i). Scale defaults to m eps0.
NormalityReport h1_normality(const ContactModelSpec& spec, double scale = 0.0,
                             std::uint64_t max_dim = kDefaultDenseCap);

struct ExtremeSearch {
  double value = 0.0;
  std::uint64_t ell = 0;
  bool exact = false;       // search certified by the tail bound
  std::uint64_t visited = 0;
};

struct H1Extremes {
  double kappa = 0.0;
  double mc_average = 0.0;  // m eps0 / 2
  double scale = 0.0;
  ExtremeSearch max_variance;
  double zeta = 0.0;        // max_variance / scale^2
  std::uint64_t dim = 0;
};

// Maximum per-eigenstate H1 variance without materializing the block. Uses
// the symmetry ell <-> D + 1 - ell and stops once the remaining states
// cannot beat the best value found.
H1Extremes h1_extremes(const ContactModelSpec& spec, double scale = 0.0,
                       std::uint64_t budget = 10'000'000);

struct RatioBound {
  double ratio = 0.0;  // Omega_{m/2+r} Omega_{m/2-r} / Omega_{m/2}^2
  double bound = 0.0;  // exp(-V kappa) times the rounding slack
  bool within = false;
};

// 1 <= |r| <= m/2 - 1.
RatioBound ratio_bound_check(const ContactModelSpec& spec, int r);

struct RatioScan {
  std::vector<RatioBound> rows;  // r = 1 .. m/2 - 1
  bool monotone = false;         // non-increasing in r
  bool all_within = false;
};
RatioScan ratio_scan(const ContactModelSpec& spec);

struct PeqQuantities {
  double dim_ratio = 0.0;  // Omega_{m/2}^2 / D
  ExtremeSearch min_peq;   // min over eigenstates of the equal-split weight
};

PeqQuantities peq_quantities(const ContactModelSpec& spec,
                             std::uint64_t budget = 10'000'000);

struct VolumeSearch {
  double V = 0.0;
  double zeta = 0.0;
  std::uint64_t dim = 0;
  bool reached = false;  // zeta <= target at V
};

// Smallest V on the grid v0, v0 + dv, ... with zeta <= target while the block
// stays within max_dim; otherwise the largest admissible V visited.
VolumeSearch volume_for_zeta(ContactModelSpec spec, double target, double v0,
                             double dv, std::uint64_t max_dim);

}  // namespace eqnorm::contact
