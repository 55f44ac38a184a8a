#include "eqnorm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "eqnorm/error.hpp"
#include "eqnorm/parallel.hpp"
#include "eqnorm/simd.hpp"

namespace eqnorm {
namespace {

constexpr double kImagResidue = 1e-10;

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_window(const SpectralDecomposition& sd, const EnergyWindow& w) {
  if (w.empty()) throw EmptyWindowError("energy window is empty");
  for (std::size_t i : w.indices) {
    if (static_cast<Eigen::Index>(i) >= sd.dim()) {
      throw ValidationError("window index out of range of the decomposition");
    }
  }
}

void require_dims(const HermitianOperator& a, const SpectralDecomposition& sd) {
  if (a.dim() != sd.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch: observable " << a.dim() << " vs spectrum "
        << sd.dim();
    throw ValidationError(msg.str());
  }
}

// Columns of the eigenvector matrix selected by the window.
ComplexMatrix window_vectors(const SpectralDecomposition& sd,
                             const EnergyWindow& w) {
  ComplexMatrix v(sd.dim(), static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) {
    v.col(static_cast<Eigen::Index>(k)) =
        sd.eigenvectors.col(static_cast<Eigen::Index>(w.indices[k]));
  }
  return v;
}

// A * V restricted to the window, using a real product when possible.
ComplexMatrix apply_to_window(const HermitianOperator& a,
                              const SpectralDecomposition& sd,
                              const EnergyWindow& w, double shift) {
  const ComplexMatrix v = window_vectors(sd, w);
  if (a.is_real() && sd.real_vectors) {
    RealMatrix ar = a.matrix().real();
    if (shift != 0.0) ar.diagonal().array() -= shift;
    const RealMatrix prod = ar * v.real();
    return prod.cast<cplx>();
  }
  ComplexMatrix am = a.matrix();
  if (shift != 0.0) am.diagonal().array() -= shift;
  return am * v;
}

void check_real(cplx value, double scale, const char* what) {
  if (std::abs(value.imag()) > kImagResidue * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << what << " has imaginary residue " << value.imag();
    throw NumericalError(msg.str());
  }
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix entries, double tol)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw ValidationError("operator must be a non-empty square matrix");
  }
  const Eigen::Index n = entries_.rows();
  const double bound = tol * std::max(1.0, max_abs(entries_));
  double worst = 0.0;
  Eigen::Index wi = 0, wj = 0;
  real_ = true;
  diagonal_ = true;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const cplx a = entries_(i, j);
      if (a.imag() != 0.0) real_ = false;
      if (i != j && a != cplx{0.0, 0.0}) diagonal_ = false;
      if (i <= j) {
        const double d = std::abs(a - std::conj(entries_(j, i)));
        if (d > worst) {
          worst = d;
          wi = i;
          wj = j;
        }
      }
    }
  }
  if (worst > bound) {
    std::ostringstream msg;
    msg << "operator is not Hermitian: |a(" << wi << "," << wj
        << ") - conj(a(" << wj << "," << wi << "))| = " << worst;
    throw ValidationError(msg.str());
  }
  // Symmetrize away sub-tolerance noise so downstream products are exact.
  if (worst > 0.0) {
    const ComplexMatrix sym = 0.5 * (entries_ + entries_.adjoint());
    entries_ = sym;
  }
}

HermitianOperator HermitianOperator::from_real(const RealMatrix& entries) {
  return HermitianOperator(entries.cast<cplx>());
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

SpectralDecomposition eigendecompose(const HermitianOperator& h,
                                     const DecomposeOptions& options) {
  const Eigen::Index n = h.dim();
  if (n > options.max_dim) {
    std::ostringstream msg;
    msg << "dimension " << n << " exceeds dense cap " << options.max_dim;
    throw CapacityError(msg.str());
  }

  SpectralDecomposition sd;
  if (h.is_diagonal()) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const ComplexMatrix& m = h.matrix();
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return m(a, a).real() < m(b, b).real();
    });
    sd.eigenvalues.resize(n);
    sd.eigenvectors = ComplexMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const Eigen::Index b = order[static_cast<std::size_t>(a)];
      sd.eigenvalues(a) = m(b, b).real();
      sd.eigenvectors(b, a) = 1.0;
    }
    sd.basis_of = std::move(order);
    sd.real_vectors = true;
    return sd;
  }

  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h.matrix().real());
    if (solver.info() != Eigen::Success) {
      throw NumericalError("real symmetric eigensolver did not converge");
    }
    sd.eigenvalues = solver.eigenvalues();
    sd.eigenvectors = solver.eigenvectors().cast<cplx>();
    sd.real_vectors = true;
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
      throw NumericalError("Hermitian eigensolver did not converge");
    }
    sd.eigenvalues = solver.eigenvalues();
    sd.eigenvectors = solver.eigenvectors();
  }
  if (options.verify) verify_decomposition(h, sd);
  return sd;
}

void verify_decomposition(const HermitianOperator& h,
                          const SpectralDecomposition& sd) {
  const Eigen::Index n = sd.dim();
  if (n != h.dim() || sd.eigenvectors.rows() != n ||
      sd.eigenvectors.cols() != n) {
    throw NumericalError("decomposition has inconsistent shape");
  }
  for (Eigen::Index a = 1; a < n; ++a) {
    if (sd.eigenvalues(a) < sd.eigenvalues(a - 1)) {
      throw NumericalError("eigenvalues are not ascending");
    }
  }
  const double emax = n == 0 ? 0.0 : sd.eigenvalues.cwiseAbs().maxCoeff();
  double ortho = 0.0;
  double recon = 0.0;
  if (sd.real_vectors) {
    const RealMatrix v = sd.eigenvectors.real();
    ortho = (v.transpose() * v - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    const RealMatrix r = v * sd.eigenvalues.asDiagonal() * v.transpose();
    recon = (r - h.matrix().real()).cwiseAbs().maxCoeff();
    if (!h.is_real()) {
      recon = std::max(recon, h.matrix().imag().cwiseAbs().maxCoeff());
    }
  } else {
    const ComplexMatrix& v = sd.eigenvectors;
    ortho = (v.adjoint() * v - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
    const ComplexMatrix r = v * sd.eigenvalues.cast<cplx>().asDiagonal() * v.adjoint();
    recon = (r - h.matrix()).cwiseAbs().maxCoeff();
  }
  if (ortho > 1e-9) {
    std::ostringstream msg;
    msg << "eigenvectors not orthonormal (max deviation " << ortho << ")";
    throw NumericalError(msg.str());
  }
  if (recon > 1e-8 * std::max(emax, 1e-300)) {
    std::ostringstream msg;
    msg << "reconstruction error " << recon << " exceeds 1e-8 * " << emax;
    throw NumericalError(msg.str());
  }
}

EnergyWindow select_window(std::span<const double> ascending, double e,
                           double delta_e) {
  if (!(delta_e > 0.0)) {
    throw ValidationError("window.delta_e must be > 0");
  }
  EnergyWindow w;
  w.e_min = e;
  w.e_max = e + delta_e;
  const auto lo = std::lower_bound(ascending.begin(), ascending.end(), w.e_min);
  const auto hi = std::upper_bound(lo, ascending.end(), w.e_max);
  for (auto it = lo; it != hi; ++it) {
    w.indices.push_back(static_cast<std::size_t>(it - ascending.begin()));
  }
  if (w.empty()) {
    std::ostringstream msg;
    msg << "no eigenvalue in [" << w.e_min << ", " << w.e_max << "]";
    throw EmptyWindowError(msg.str());
  }
  return w;
}

EnergyWindow select_window(const SpectralDecomposition& sd, double e,
                           double delta_e) {
  return select_window(
      std::span<const double>(sd.eigenvalues.data(),
                              static_cast<std::size_t>(sd.eigenvalues.size())),
      e, delta_e);
}

std::size_t DegeneracyGroups::max_group_size() const {
  std::size_t m = 0;
  for (const auto& g : groups) m = std::max(m, g.size());
  return m;
}

DegeneracyGroups detect_degeneracies(std::span<const double> values,
                                     double tol) {
  if (tol < 0.0) throw ValidationError("degeneracy tolerance must be >= 0");
  DegeneracyGroups out;
  out.tolerance = tol;
  if (values.empty()) return out;
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  out.groups.push_back({order[0]});
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (values[order[k]] - values[order[k - 1]] <= tol) {
      out.groups.back().push_back(order[k]);
    } else {
      out.groups.push_back({order[k]});
    }
  }
  return out;
}

DegeneracyGroups detect_degeneracies(const SpectralDecomposition& sd,
                                     double tol) {
  return detect_degeneracies(
      std::span<const double>(sd.eigenvalues.data(),
                              static_cast<std::size_t>(sd.eigenvalues.size())),
      tol);
}

double default_degeneracy_tolerance(std::span<const double> values) {
  if (values.empty()) return 1e-9;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double spread = *hi - *lo;
  return spread > 0.0 ? 1e-9 * spread : 1e-9;
}

ObservableSpec::ObservableSpec(HermitianOperator op_in, double scale_in)
    : op(std::move(op_in)), scale(scale_in) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError("observable scale must be > 0");
  }
}

WindowMoments window_moments(const ObservableSpec& a,
                             const SpectralDecomposition& sd,
                             const EnergyWindow& w) {
  require_dims(a.op, sd);
  require_window(sd, w);
  const std::size_t m = w.size();
  const Eigen::Index n = sd.dim();
  const double op_scale = max_abs(a.op.matrix());
  WindowMoments out;
  out.mean.resize(m);
  out.second.resize(m);

  if (sd.is_standard_basis()) {
    const ComplexMatrix& am = a.op.matrix();
    parallel_for(m, [&](std::size_t k) {
      const Eigen::Index b = sd.basis_of[w.indices[k]];
      const cplx diag = am(b, b);
      check_real(diag, op_scale, "expectation value");
      out.mean[k] = diag.real();
      out.second[k] = simd::norm2(
          std::span<const cplx>(am.col(b).data(), static_cast<std::size_t>(n)));
    });
    return out;
  }

  const ComplexMatrix v = window_vectors(sd, w);
  const ComplexMatrix av = apply_to_window(a.op, sd, w, 0.0);
  parallel_for(m, [&](std::size_t k) {
    const auto col = static_cast<Eigen::Index>(k);
    const std::span<const cplx> psi(v.col(col).data(), static_cast<std::size_t>(n));
    const std::span<const cplx> apsi(av.col(col).data(), static_cast<std::size_t>(n));
    const cplx mean = simd::dot(psi, apsi);
    check_real(mean, op_scale, "expectation value");
    out.mean[k] = mean.real();
    out.second[k] = simd::norm2(apsi);
  });
  return out;
}

NormalityReport certificate_from_moments(std::span<const std::size_t> indices,
                                         std::span<const double> means,
                                         std::span<const double> seconds,
                                         double scale) {
  const std::size_t m = indices.size();
  if (m == 0) throw EmptyWindowError("energy window is empty");
  if (means.size() != m || seconds.size() != m) {
    throw ValidationError("moment arrays do not match the window size");
  }
  if (!(scale > 0.0)) throw ValidationError("observable scale must be > 0");
  NormalityReport r;
  r.scale = scale;
  r.indices.assign(indices.begin(), indices.end());
  r.per_state_mean.assign(means.begin(), means.end());
  r.mc_average = simd::sum(means) / static_cast<double>(m);
  const double mc = r.mc_average;
  r.per_state_variance.resize(m);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < m; ++k) {
    const double f = seconds[k] - 2.0 * mc * means[k] + mc * mc;
    r.per_state_variance[k] = f;
    if (f > worst) {
      worst = f;
      r.worst_index = indices[k];
    }
  }
  r.zeta = worst / (scale * scale);
  r.window_variance = simd::sum(r.per_state_variance) / static_cast<double>(m);
  return r;
}

double mc_average(const ObservableSpec& a, const SpectralDecomposition& sd,
                  const EnergyWindow& w) {
  const WindowMoments mom = window_moments(a, sd, w);
  return simd::sum(mom.mean) / static_cast<double>(w.size());
}

NormalityReport normality_certificate(const ObservableSpec& a,
                                      const SpectralDecomposition& sd,
                                      const EnergyWindow& w) {
  const WindowMoments mom = window_moments(a, sd, w);
  return certificate_from_moments(w.indices, mom.mean, mom.second, a.scale);
}

double window_variance(const ObservableSpec& a,
                       const SpectralDecomposition& sd,
                       const EnergyWindow& w) {
  return normality_certificate(a, sd, w).window_variance;
}

ComplexMatrix window_block(const HermitianOperator& a,
                           const SpectralDecomposition& sd,
                           const EnergyWindow& w) {
  require_dims(a, sd);
  require_window(sd, w);
  const ComplexMatrix v = window_vectors(sd, w);
  const ComplexMatrix av = apply_to_window(a, sd, w, 0.0);
  ComplexMatrix block = v.adjoint() * av;
  return 0.5 * (block + block.adjoint());
}

ComplexMatrix deviation_block(const HermitianOperator& a, double shift,
                              const SpectralDecomposition& sd,
                              const EnergyWindow& w) {
  require_dims(a, sd);
  require_window(sd, w);
  const ComplexMatrix av = apply_to_window(a, sd, w, shift);
  ComplexMatrix block = av.adjoint() * av;
  return 0.5 * (block + block.adjoint());
}

std::vector<double> window_energies(const SpectralDecomposition& sd,
                                    const EnergyWindow& w) {
  std::vector<double> e;
  e.reserve(w.size());
  for (std::size_t i : w.indices) e.push_back(sd.eigenvalues(static_cast<Eigen::Index>(i)));
  return e;
}

}  // namespace eqnorm
