#pragma once

// Independent spin-1/2 chain in quenched random z-fields, and the disordered
// Heisenberg ring. Spin operators are Pauli/2 with hbar = 1. Basis index b
// encodes sigma_j = +1 when bit j is clear and -1 when it is set.

#include <cstdint>
#include <span>
#include <vector>

#include "eqnorm/spectral.hpp"

namespace eqnorm::spins {

inline constexpr int kMaxSpins = 12;

// How the Heisenberg field term h_j X_j is read: X = S^z or X = sigma^z.
enum class FieldOperator { kSz, kPauli };

struct SpinModelSpec {
  int n = 8;
  double h_max = 1.0;
  std::uint64_t seed = 1;
  double coupling = 0.0;  // J; zero gives the free model
  bool periodic = true;
  FieldOperator field_operator = FieldOperator::kSz;
  double field_sign = +1.0;  // Heisenberg field term is field_sign * sum h_j X_j

  void validate() const;
};

// N i.i.d. uniform fields in [-h_max, h_max]; deterministic per seed.
std::vector<double> draw_fields(const SpinModelSpec& spec);

using SpinConfiguration = std::vector<int>;  // entries +1 / -1

SpinConfiguration configuration_of(std::uint64_t basis_index, int n);

// -sum_j h_j sigma_j
double energy_of(std::span<const int> sigma, std::span<const double> h);

// -sum_j h_j S^z_j, diagonal. Entry b equals energy_of(sigma(b), h) / 2.
HermitianOperator build_free_hamiltonian(std::span<const double> h);
HermitianOperator build_free_hamiltonian(const SpinModelSpec& spec);

HermitianOperator sx_total(int n);
HermitianOperator sz_total(int n);
// S^z of a single site j (0-based).
HermitianOperator sz_site(int n, int j);

// J sum_<j,j+1> S_j . S_{j+1} + field_sign sum_j h_j X_j over unique bonds
// (a two-site ring has a single bond).
HermitianOperator build_heisenberg(const SpinModelSpec& spec,
                                   std::span<const double> h);
HermitianOperator build_heisenberg(const SpinModelSpec& spec);

// Certificate for S^z_tot in the given window of the free model, scale N/2.
NormalityReport sz_normality_failure(const SpinModelSpec& spec,
                                     const SpectralDecomposition& sd,
                                     const EnergyWindow& window);

}  // namespace eqnorm::spins
