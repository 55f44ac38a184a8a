#include "eqnorm/spins.hpp"

#include <random>
#include <sstream>

#include "eqnorm/error.hpp"

namespace eqnorm::spins {
namespace {

std::size_t dim_of(int n) {
  if (n < 1) throw ValidationError("spin count must be >= 1");
  if (n > kMaxSpins) {
    std::ostringstream msg;
    msg << "dense spin model needs N <= " << kMaxSpins << " (got " << n << ")";
    throw CapacityError(msg.str());
  }
  return std::size_t{1} << n;
}

double sz_value(std::uint64_t b, int j) {
  return ((b >> j) & 1U) ? -0.5 : 0.5;
}

}  // namespace

void SpinModelSpec::validate() const {
  if (n < 1) throw ValidationError("spins.n must be >= 1");
  if (n > kMaxSpins) {
    std::ostringstream msg;
    msg << "spins.n must be <= " << kMaxSpins << " for the dense path";
    throw CapacityError(msg.str());
  }
  if (!(h_max > 0.0)) throw ValidationError("spins.h_max must be > 0");
  if (field_sign != 1.0 && field_sign != -1.0) {
    throw ValidationError("heisenberg.field_sign must be +1 or -1");
  }
}

std::vector<double> draw_fields(const SpinModelSpec& spec) {
  if (spec.n < 1) throw ValidationError("spins.n must be >= 1");
  if (!(spec.h_max > 0.0)) throw ValidationError("spins.h_max must be > 0");
  std::mt19937_64 rng(spec.seed);
  std::vector<double> h(static_cast<std::size_t>(spec.n));
  for (auto& x : h) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    x = spec.h_max * (2.0 * u - 1.0);
  }
  return h;
}

SpinConfiguration configuration_of(std::uint64_t basis_index, int n) {
  SpinConfiguration sigma(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) sigma[static_cast<std::size_t>(j)] = ((basis_index >> j) & 1U) ? -1 : +1;
  return sigma;
}

double energy_of(std::span<const int> sigma, std::span<const double> h) {
  if (sigma.size() != h.size()) {
    throw ValidationError("energy_of: configuration and field lengths differ");
  }
  double e = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) e -= h[j] * sigma[j];
  return e;
}

HermitianOperator build_free_hamiltonian(std::span<const double> h) {
  const int n = static_cast<int>(h.size());
  const std::size_t dim = dim_of(n);
  std::vector<double> diag(dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    double e = 0.0;
    for (int j = 0; j < n; ++j) e -= h[static_cast<std::size_t>(j)] * sz_value(b, j);
    diag[b] = e;
  }
  return HermitianOperator::diagonal(diag);
}

HermitianOperator build_free_hamiltonian(const SpinModelSpec& spec) {
  spec.validate();
  return build_free_hamiltonian(draw_fields(spec));
}

HermitianOperator sx_total(int n) {
  const std::size_t dim = dim_of(n);
  RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(dim),
                                  static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) {
    for (int j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(b ^ (1ULL << j)), static_cast<Eigen::Index>(b)) += 0.5;
    }
  }
  return HermitianOperator::from_real(m);
}

HermitianOperator sz_total(int n) {
  const std::size_t dim = dim_of(n);
  std::vector<double> diag(dim);
  for (std::uint64_t b = 0; b < dim; ++b) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += sz_value(b, j);
    diag[b] = s;
  }
  return HermitianOperator::diagonal(diag);
}

HermitianOperator sz_site(int n, int j) {
  const std::size_t dim = dim_of(n);
  if (j < 0 || j >= n) throw ValidationError("site index out of range");
  std::vector<double> diag(dim);
  for (std::uint64_t b = 0; b < dim; ++b) diag[b] = sz_value(b, j);
  return HermitianOperator::diagonal(diag);
}

HermitianOperator build_heisenberg(const SpinModelSpec& spec,
                                   std::span<const double> h) {
  spec.validate();
  const int n = spec.n;
  if (h.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("field count does not match spins.n");
  }
  const std::size_t dim = dim_of(n);

  std::vector<std::pair<int, int>> bonds;
  for (int j = 0; j + 1 < n; ++j) bonds.emplace_back(j, j + 1);
  if (spec.periodic && n > 2) bonds.emplace_back(n - 1, 0);

  const double field_factor =
      spec.field_sign * (spec.field_operator == FieldOperator::kPauli ? 2.0 : 1.0);
  RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(dim),
                                  static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    double diag = 0.0;
    for (int j = 0; j < n; ++j) diag += field_factor * h[static_cast<std::size_t>(j)] * sz_value(b, j);
    for (const auto& [i, j] : bonds) {
      // S_i.S_j = S^z_i S^z_j + (S^+_i S^-_j + S^-_i S^+_j) / 2
      diag += spec.coupling * sz_value(b, i) * sz_value(b, j);
      if (sz_value(b, i) != sz_value(b, j)) {
        const std::uint64_t flipped = b ^ (1ULL << i) ^ (1ULL << j);
        m(static_cast<Eigen::Index>(flipped), bi) += 0.5 * spec.coupling;
      }
    }
    m(bi, bi) += diag;
  }
  return HermitianOperator::from_real(m);
}

HermitianOperator build_heisenberg(const SpinModelSpec& spec) {
  return build_heisenberg(spec, draw_fields(spec));
}

NormalityReport sz_normality_failure(const SpinModelSpec& spec,
                                     const SpectralDecomposition& sd,
                                     const EnergyWindow& window) {
  const ObservableSpec sz(sz_total(spec.n), 0.5 * spec.n);
  return normality_certificate(sz, sd, window);
}

}  // namespace eqnorm::spins
