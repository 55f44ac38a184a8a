#include "eqnorm/fermions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <sstream>

#include "eqnorm/error.hpp"
#include "eqnorm/parallel.hpp"
#include "eqnorm/simd.hpp"

namespace eqnorm::fermions {
namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t mode_bit(int n) { return std::uint64_t{1} << (n - 1); }

// Phase 2 pi a / L with the integer part reduced first.
cplx root_of_unity(long long a, int L) {
  const long long r = ((a % L) + L) % L;
  const double ang = 2.0 * kPi * static_cast<double>(r) / L;
  return {std::cos(ang), std::sin(ang)};
}

// sin(pi a / L) with a reduced modulo 2L.
double sin_pi_frac(long long a, int L) {
  const long long m = 2LL * L;
  const long long r = ((a % m) + m) % m;
  return std::sin(kPi * static_cast<double>(r) / L);
}

void check_modes(const FermionModelSpec& spec, int n) {
  if (n < 1 || n > spec.L) {
    std::ostringstream msg;
    msg << "mode index " << n << " outside 1.." << spec.L;
    throw ValidationError(msg.str());
  }
}

// Sign and result of c_n acting on occupation bits (bit n-1); 0 if empty.
int annihilate(std::uint64_t& bits, int n) {
  const std::uint64_t b = mode_bit(n);
  if (!(bits & b)) return 0;
  const int below = std::popcount(bits & (b - 1));
  bits ^= b;
  return (below & 1) ? -1 : 1;
}

int create(std::uint64_t& bits, int n) {
  const std::uint64_t b = mode_bit(n);
  if (bits & b) return 0;
  const int below = std::popcount(bits & (b - 1));
  bits |= b;
  return (below & 1) ? -1 : 1;
}

// <bra| a*_m a_n |ket> in the mode basis; the only (m, n) that can contribute
// when bra != ket is fixed by the symmetric difference.
cplx one_body_element(const ComplexMatrix& qt, std::uint64_t bra,
                      std::uint64_t ket, int L) {
  if (bra == ket) {
    cplx s = 0.0;
    for (int n = 1; n <= L; ++n) {
      if (ket & mode_bit(n)) s += qt(n - 1, n - 1);
    }
    return s;
  }
  const std::uint64_t only_bra = bra & ~ket;
  const std::uint64_t only_ket = ket & ~bra;
  if (std::popcount(only_bra) != 1 || std::popcount(only_ket) != 1) return 0.0;
  const int m = std::countr_zero(only_bra) + 1;
  const int n = std::countr_zero(only_ket) + 1;
  std::uint64_t bits = ket;
  int sign = annihilate(bits, n);
  sign *= create(bits, m);
  return static_cast<double>(sign) * qt(m - 1, n - 1);
}

cplx squared_element(const ComplexMatrix& qt, std::uint64_t bra,
                     std::uint64_t ket, int L) {
  // Intermediate states reachable from bra by at most one mode swap.
  cplx total = 0.0;
  auto add = [&](std::uint64_t mid) {
    if (std::popcount(mid & ~ket) > 1) return;
    total += one_body_element(qt, bra, mid, L) * one_body_element(qt, mid, ket, L);
  };
  add(bra);
  for (int n = 1; n <= L; ++n) {
    if (!(bra & mode_bit(n))) continue;
    for (int m = 1; m <= L; ++m) {
      if (bra & mode_bit(m)) continue;
      add((bra ^ mode_bit(n)) | mode_bit(m));
    }
  }
  return total;
}

double occupied_pair_sum(std::uint64_t bits, const std::vector<double>& w2, int L) {
  double s = 0.0;
  for (int n = 1; n <= L; ++n) {
    if (!(bits & mode_bit(n))) continue;
    for (int m = n + 1; m <= L; ++m) {
      if (bits & mode_bit(m)) s += w2[static_cast<std::size_t>((n - 1) * L + (m - 1))];
    }
  }
  return s;
}

std::vector<double> overlap_table(const FermionModelSpec& spec) {
  const int L = spec.L;
  std::vector<double> w2(static_cast<std::size_t>(L * L));
  for (int n = 1; n <= L; ++n) {
    for (int m = 1; m <= L; ++m) {
      w2[static_cast<std::size_t>((n - 1) * L + (m - 1))] = std::norm(w_overlap(n, m, spec));
    }
  }
  return w2;
}

void require_same_chain(const OccupationSet& g, const FermionModelSpec& spec) {
  if (g.L() != spec.L) throw ValidationError("occupation set and model disagree on L");
  if (g.size() != spec.N) throw ValidationError("occupation set size differs from N");
}

double min_sorted_gap(std::vector<double>& e) {
  std::sort(e.begin(), e.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < e.size(); ++i) gap = std::min(gap, e[i] - e[i - 1]);
  return gap;
}

}  // namespace

FermionModelSpec FermionModelSpec::make(int L, int N, int ell) {
  FermionModelSpec s;
  s.L = L;
  s.N = N;
  s.ell = ell;
  s.theta = default_theta(L);
  return s;
}

double FermionModelSpec::default_theta(int L) { return 0.37 * kPi / L; }

void FermionModelSpec::validate() const {
  if (L < 1 || L > kMaxModes) {
    std::ostringstream msg;
    msg << "fermions.L must be in 1.." << kMaxModes;
    throw ValidationError(msg.str());
  }
  if (N < 1 || N > L) throw ValidationError("fermions.N must be in 1..L");
  if (ell < 1 || ell > L) throw ValidationError("fermions.ell must be in 1..L");
  if (!(theta > 0.0 && theta < kPi / L)) {
    throw ValidationError("fermions.theta must lie in the open interval (0, pi/L)");
  }
}

OccupationSet::OccupationSet(std::uint64_t bits, int L) : bits_(bits), L_(L) {
  if (L < 1 || L > kMaxModes) throw ValidationError("occupation set: L out of range");
  if (L < 64 && (bits >> L) != 0) throw ValidationError("occupation set: mode above L");
}

OccupationSet OccupationSet::from_modes(std::span<const int> modes, int L) {
  std::uint64_t bits = 0;
  for (int n : modes) {
    if (n < 1 || n > L) throw ValidationError("occupation set: mode outside 1..L");
    if (bits & mode_bit(n)) throw ValidationError("occupation set: repeated mode");
    bits |= mode_bit(n);
  }
  return OccupationSet(bits, L);
}

int OccupationSet::size() const { return std::popcount(bits_); }

std::vector<int> OccupationSet::modes() const {
  std::vector<int> out;
  for (int n = 1; n <= L_; ++n) {
    if (contains(n)) out.push_back(n);
  }
  return out;
}

OccupationSet OccupationSet::complement() const {
  const std::uint64_t all = L_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << L_) - 1;
  return OccupationSet(all & ~bits_, L_);
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<std::uint64_t> enumerate_sets(int L, int N, std::uint64_t max_count) {
  if (L < 1 || L > kMaxModes || N < 0 || N > L) {
    throw ValidationError("enumerate_sets: need 0 <= N <= L <= 64");
  }
  const std::uint64_t count = binomial(L, N);
  if (count > max_count) {
    std::ostringstream msg;
    msg << "C(" << L << "," << N << ") = " << count << " exceeds the enumeration budget "
        << max_count;
    throw CapacityError(msg.str());
  }
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (N == 0) {
    out.push_back(0);
    return out;
  }
  std::uint64_t s = N == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << N) - 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(s);
    if (i + 1 == count) break;
    // Gosper's hack: next integer with the same popcount.
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  return out;
}

std::vector<double> single_particle_energies(int L, double theta) {
  if (L < 1) throw ValidationError("L must be >= 1");
  std::vector<double> eps(static_cast<std::size_t>(L));
  for (int n = 1; n <= L; ++n) {
    const cplx z = root_of_unity(n, L) * std::polar(1.0, theta);
    eps[static_cast<std::size_t>(n - 1)] = z.real();
  }
  return eps;
}

double many_body_energy(const OccupationSet& gamma, double theta) {
  const auto eps = single_particle_energies(gamma.L(), theta);
  std::vector<double> terms;
  for (int n : gamma.modes()) terms.push_back(eps[static_cast<std::size_t>(n - 1)]);
  return simd::sum(terms);
}

cplx w_overlap(int n, int n_prime, const FermionModelSpec& spec) {
  check_modes(spec, n);
  check_modes(spec, n_prime);
  const int L = spec.L;
  const long long d = ((n_prime - n) % L + L) % L;
  if (d == 0) return spec.v();
  const double ratio = sin_pi_frac(static_cast<long long>(spec.ell) * d, L) / sin_pi_frac(d, L);
  // e^{i pi d (ell + 1) / L}
  const long long m = 2LL * L;
  const long long a = ((d * (spec.ell + 1)) % m + m) % m;
  const double ang = kPi * static_cast<double>(a) / L;
  return std::polar(ratio / L, ang);
}

double overlap_pair_sum(int L, int ell) {
  if (L < 1 || ell < 1 || ell > L) throw ValidationError("overlap sum needs 1 <= ell <= L");
  // |w|^2 depends on n' - n only; difference d occurs for L - d ordered pairs.
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(L));
  for (long long d = 1; d < L; ++d) {
    const double r = sin_pi_frac(static_cast<long long>(ell) * d, L) / sin_pi_frac(d, L) / L;
    terms.push_back(static_cast<double>(L - d) * r * r);
  }
  return simd::sum(terms);
}

int cyclic_distance(int n, int n_prime, int L) {
  const int d = ((n_prime - n) % L + L) % L;
  return std::min(d, L - d);
}

ComplexMatrix correlation_matrix(const OccupationSet& gamma) {
  const int L = gamma.L();
  const auto modes = gamma.modes();
  ComplexMatrix c(L, L);
  for (int x = 1; x <= L; ++x) {
    for (int y = 1; y <= L; ++y) {
      cplx s = 0.0;
      for (int n : modes) s += root_of_unity(static_cast<long long>(n) * (y - x), L);
      c(x - 1, y - 1) = s / static_cast<double>(L);
    }
  }
  return c;
}

ComplexMatrix partial_number_kernel(const FermionModelSpec& spec) {
  ComplexMatrix q = ComplexMatrix::Zero(spec.L, spec.L);
  for (int x = 0; x < spec.ell; ++x) q(x, x) = 1.0;
  return q;
}

ComplexMatrix partial_hopping_kernel(const FermionModelSpec& spec) {
  const int L = spec.L;
  ComplexMatrix q = ComplexMatrix::Zero(L, L);
  const cplx ph = std::polar(0.5, spec.theta);
  for (int x = 1; x <= spec.ell; ++x) {
    const int y = x % L + 1;
    q(x - 1, y - 1) += ph;
    q(y - 1, x - 1) += std::conj(ph);
  }
  return q;
}

ComplexMatrix partial_number_mode_kernel(const FermionModelSpec& spec) {
  const int L = spec.L;
  ComplexMatrix qt(L, L);
  for (int m = 1; m <= L; ++m) {
    for (int n = 1; n <= L; ++n) qt(m - 1, n - 1) = w_overlap(m, n, spec);
  }
  return qt;
}

ComplexMatrix partial_hopping_mode_kernel(const FermionModelSpec& spec) {
  const int L = spec.L;
  const cplx e_theta = std::polar(1.0, spec.theta);
  ComplexMatrix qt(L, L);
  for (int m = 1; m <= L; ++m) {
    for (int n = 1; n <= L; ++n) {
      const cplx fwd = e_theta * root_of_unity(n, L);
      const cplx bwd = std::conj(e_theta * root_of_unity(m, L));
      qt(m - 1, n - 1) = 0.5 * w_overlap(m, n, spec) * (fwd + bwd);
    }
  }
  return qt;
}

OneBodyMoments wick_moments(const ComplexMatrix& q, const ComplexMatrix& c) {
  if (q.rows() != c.rows() || q.cols() != c.cols() || q.rows() != q.cols()) {
    throw ValidationError("wick_moments: kernel and correlation shapes differ");
  }
  // rho = C^T is the one-body density matrix sum_n |phi_n><phi_n|.
  const ComplexMatrix rho = c.transpose();
  const ComplexMatrix hole = ComplexMatrix::Identity(c.rows(), c.cols()) - rho;
  const cplx mean = (q * rho).trace();
  const cplx var = ((q * hole) * (q * rho)).trace();
  OneBodyMoments out;
  out.mean = mean.real();
  out.variance = var.real();
  out.second = out.mean * out.mean + out.variance;
  return out;
}

NlMoments nl_moments(const OccupationSet& gamma, const FermionModelSpec& spec) {
  spec.validate();
  require_same_chain(gamma, spec);
  const double v = spec.v();
  const auto modes = gamma.modes();
  double pairs = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      pairs += std::norm(w_overlap(modes[i], modes[j], spec));
    }
  }
  NlMoments out;
  out.mean = v * spec.N;
  out.variance = (v - v * v) * spec.N - 2.0 * pairs;
  out.second = out.mean * out.mean + out.variance;

  const auto wick = wick_moments(partial_number_kernel(spec), correlation_matrix(gamma));
  out.wick_mean = wick.mean;
  out.wick_second = wick.second;
  const double tol = 1e-9 * std::max(1.0, out.second);
  if (std::abs(out.wick_mean - out.mean) > tol ||
      std::abs(out.wick_second - out.second) > tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "partial number moments disagree: closed form (" << out.mean << ", "
        << out.second << ") vs Wick (" << out.wick_mean << ", " << out.wick_second << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

CorrectionSum correction_sum(const OccupationSet& gamma, const FermionModelSpec& spec) {
  spec.validate();
  if (gamma.L() != spec.L) throw ValidationError("occupation set and model disagree on L");
  CorrectionSum out;
  out.bound = 2.0 * spec.ell;
  std::vector<double> occ;
  const auto modes = gamma.modes();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      occ.push_back(std::norm(w_overlap(modes[i], modes[j], spec)));
    }
  }
  out.all_pairs = overlap_pair_sum(spec.L, spec.ell);
  out.occupied = simd::sum(occ);
  if (out.all_pairs > out.bound) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "overlap correction " << out.all_pairs << " exceeds 2*ell = " << out.bound;
    throw NumericalError(msg.str());
  }
  return out;
}

HlMoments hl_moments(const OccupationSet& gamma, const FermionModelSpec& spec,
                     double k_slack) {
  spec.validate();
  require_same_chain(gamma, spec);
  if (!(k_slack >= 0.0)) throw ValidationError("slack constant must be >= 0");
  const double v = spec.v();
  const auto eps = single_particle_energies(spec.L, spec.theta);
  const auto modes = gamma.modes();
  double e = 0.0;
  double e2 = 0.0;
  for (int n : modes) {
    e += eps[static_cast<std::size_t>(n - 1)];
    e2 += eps[static_cast<std::size_t>(n - 1)] * eps[static_cast<std::size_t>(n - 1)];
  }

  HlMoments out;
  out.mean = v * e;
  const auto wick = wick_moments(partial_hopping_kernel(spec), correlation_matrix(gamma));
  if (std::abs(wick.mean - out.mean) > 1e-9 * std::max(1.0, std::abs(out.mean))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "partial hopping mean " << wick.mean << " differs from v*E = " << out.mean;
    throw NumericalError(msg.str());
  }
  out.second = wick.mean * wick.mean + wick.variance;
  out.variance = wick.variance;

  const ComplexMatrix qt = partial_hopping_mode_kernel(spec);
  cplx mode_mean = 0.0;
  cplx mode_var = 0.0;
  for (int n : modes) {
    mode_mean += qt(n - 1, n - 1);
    for (int m = 1; m <= spec.L; ++m) {
      if (!gamma.contains(m)) mode_var += qt(n - 1, m - 1) * qt(m - 1, n - 1);
    }
  }
  out.mode_second = mode_mean.real() * mode_mean.real() + mode_var.real();

  out.remainder = out.second - out.mean * out.mean - (v - v * v) * e2;
  out.slack = k_slack * spec.ell;
  out.remainder_ok = std::abs(out.remainder) <= out.slack;
  out.variance_ok = out.variance <= (v - v * v) * spec.N + out.slack;
  return out;
}

cplx offdiagonal_element(const OccupationSet& gamma, const OccupationSet& gamma_prime,
                         Observable obs, const FermionModelSpec& spec) {
  spec.validate();
  if (gamma.L() != spec.L || gamma_prime.L() != spec.L) {
    throw ValidationError("occupation set and model disagree on L");
  }
  if (gamma.size() != gamma_prime.size()) {
    throw ValidationError("off-diagonal element needs equal particle numbers");
  }
  const bool number = obs == Observable::kNl || obs == Observable::kNlSquared;
  const ComplexMatrix qt =
      number ? partial_number_mode_kernel(spec) : partial_hopping_mode_kernel(spec);
  const bool squared = obs == Observable::kNlSquared || obs == Observable::kHlSquared;
  if (squared) return squared_element(qt, gamma.bits(), gamma_prime.bits(), spec.L);
  return one_body_element(qt, gamma.bits(), gamma_prime.bits(), spec.L);
}

cplx mode_matrix_element(const ComplexMatrix& qt, std::uint64_t bra, std::uint64_t ket,
                         int L, bool squared) {
  return squared ? squared_element(qt, bra, ket, L) : one_body_element(qt, bra, ket, L);
}

OneBodyMoments mode_moments(const ComplexMatrix& qt, std::uint64_t bits, int L) {
  cplx mean = 0.0;
  double var = 0.0;
  for (int n = 1; n <= L; ++n) {
    if (!(bits & mode_bit(n))) continue;
    mean += qt(n - 1, n - 1);
    for (int m = 1; m <= L; ++m) {
      if (!(bits & mode_bit(m))) var += std::norm(qt(m - 1, n - 1));
    }
  }
  OneBodyMoments out;
  out.mean = mean.real();
  out.variance = var;
  out.second = out.mean * out.mean + var;
  return out;
}

MaxNlVariance max_nl_variance(const FermionModelSpec& spec, std::uint64_t budget) {
  spec.validate();
  const double v = spec.v();
  const double bound = (v - v * v) * spec.N;
  MaxNlVariance out;
  if (binomial(spec.L, spec.N) <= budget) {
    const auto w2 = overlap_table(spec);
    const auto sets = enumerate_sets(spec.L, spec.N, budget);
    std::vector<double> var(sets.size());
    parallel_for(sets.size(), [&](std::size_t i) {
      var[i] = bound - 2.0 * occupied_pair_sum(sets[i], w2, spec.L);
    });
    const auto it = std::max_element(var.begin(), var.end());
    out.max_variance = *it;
    out.witness = OccupationSet(sets[static_cast<std::size_t>(it - var.begin())], spec.L);
    out.exhaustive = true;
    return out;
  }
  // |w_{n,n'}| vanishes when L divides ell * (n' - n); modes spaced by
  // g = L / gcd(L, ell) are pairwise orthogonal on the subregion.
  const int common = std::gcd(spec.L, spec.ell);
  const int g = spec.L / common;
  if (spec.N > common) {
    std::ostringstream msg;
    msg << "C(" << spec.L << "," << spec.N << ") exceeds the budget and no "
        << "zero-overlap set of size N exists";
    throw CapacityError(msg.str());
  }
  std::vector<int> modes;
  for (int i = 0; i < spec.N; ++i) modes.push_back(1 + i * g);
  out.witness = OccupationSet::from_modes(modes, spec.L);
  const auto w2 = overlap_table(spec);
  out.max_variance = bound - 2.0 * occupied_pair_sum(out.witness.bits(), w2, spec.L);
  if (std::abs(out.max_variance - bound) > 1e-12 * std::max(1.0, bound)) {
    throw NumericalError("zero-overlap witness does not attain the variance bound");
  }
  out.exhaustive = false;
  return out;
}

cplx z_gamma(const OccupationSet& gamma) {
  cplx z = 0.0;
  for (int n : gamma.modes()) z += root_of_unity(n, gamma.L());
  return z;
}

std::size_t DegeneracyScan::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

std::size_t DegeneracyScan::pair_flagged_count() const {
  return static_cast<std::size_t>(std::count(pair_flagged.begin(), pair_flagged.end(), true));
}

DegeneracyScan degeneracy_scan(int L, int N, std::span<const double> grid, double tol,
                               std::uint64_t max_sets) {
  if (L < 1 || L > kMaxModes || N < 1 || N > L) {
    throw ValidationError("degeneracy scan needs 1 <= N <= L <= 64");
  }
  if (grid.empty()) throw ValidationError("degeneracy scan: empty theta grid");
  const double hi = kPi / L;
  for (double t : grid) {
    if (!(t >= 0.0 && t <= hi * (1.0 + 1e-15))) {
      throw ValidationError("degeneracy scan: theta outside [0, pi/L]");
    }
  }

  // Energies at theta are the projections Re(z e^{i theta}) of fixed points z.
  auto projections = [](int l, int n, std::uint64_t cap) {
    const auto sets = enumerate_sets(l, n, cap);
    std::vector<double> re(sets.size());
    std::vector<double> im(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const cplx z = z_gamma(OccupationSet(sets[i], l));
      re[i] = z.real();
      im[i] = z.imag();
    }
    return std::pair{std::move(re), std::move(im)};
  };
  auto scan = [&](const std::vector<double>& re, const std::vector<double>& im,
                  std::vector<double>& gaps, std::vector<bool>& flags) {
    gaps.assign(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t k) {
      std::vector<double> e(re.size());
      simd::rotate_project(re, im, std::cos(grid[k]), std::sin(grid[k]), e);
      gaps[k] = min_sorted_gap(e);
    });
    flags.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) flags[k] = gaps[k] <= tol;
  };

  DegeneracyScan out;
  out.thetas.assign(grid.begin(), grid.end());
  const auto [re, im] = projections(L, N, max_sets);
  scan(re, im, out.min_gap, out.flagged);
  if (L % 2 == 1 && L >= 2) {
    const auto [pre, pim] = projections(L, 2, max_sets);
    scan(pre, pim, out.pair_min_gap, out.pair_flagged);
  }
  return out;
}

std::vector<double> theta_grid(int L, std::size_t n) {
  if (n == 0) throw ValidationError("theta grid must have at least one point");
  if (L < 1) throw ValidationError("L must be >= 1");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = (static_cast<double>(k) + 0.5) * kPi / (static_cast<double>(L) * n);
  }
  return out;
}

FockSpace::FockSpace(int L, int N) : L_(L), N_(N) {
  if (L < 1 || L > kMaxModes || N < 1 || N > L) {
    throw ValidationError("Fock space needs 1 <= N <= L <= 64");
  }
  const std::uint64_t dim = binomial(L, N);
  if (dim > kMaxFockDim) {
    std::ostringstream msg;
    msg << "Fock dimension C(" << L << "," << N << ") = " << dim << " exceeds "
        << kMaxFockDim;
    throw CapacityError(msg.str());
  }
  basis_ = enumerate_sets(L, N);
}

std::ptrdiff_t FockSpace::index_of(std::uint64_t config) const {
  const auto it = std::lower_bound(basis_.begin(), basis_.end(), config);
  if (it == basis_.end() || *it != config) return -1;
  return it - basis_.begin();
}

ComplexMatrix FockSpace::one_body(const ComplexMatrix& q) const {
  if (q.rows() != L_ || q.cols() != L_) throw ValidationError("kernel must be L x L");
  const auto d = static_cast<Eigen::Index>(dim());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (int x = 1; x <= L_; ++x) {
      for (int y = 1; y <= L_; ++y) {
        const cplx a = q(x - 1, y - 1);
        if (a == cplx(0.0)) continue;
        std::uint64_t bits = basis_[static_cast<std::size_t>(j)];
        int sign = annihilate(bits, y);
        if (sign == 0) continue;
        sign *= create(bits, x);
        if (sign == 0) continue;
        m(index_of(bits), j) += static_cast<double>(sign) * a;
      }
    }
  }
  return m;
}

Eigen::VectorXcd FockSpace::slater_state(const OccupationSet& gamma) const {
  if (gamma.L() != L_ || gamma.size() != N_) {
    throw ValidationError("Slater state does not fit this Fock space");
  }
  const auto modes = gamma.modes();
  const double norm = 1.0 / std::sqrt(static_cast<double>(L_));
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(dim()));
  ComplexMatrix mat(N_, N_);
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    std::vector<int> sites;
    for (int x = 1; x <= L_; ++x) {
      if (basis_[k] & mode_bit(x)) sites.push_back(x);
    }
    for (int i = 0; i < N_; ++i) {
      for (int j = 0; j < N_; ++j) {
        mat(i, j) = norm * root_of_unity(static_cast<long long>(modes[static_cast<std::size_t>(i)]) *
                                              sites[static_cast<std::size_t>(j)],
                                          L_);
      }
    }
    psi(static_cast<Eigen::Index>(k)) = mat.determinant();
  }
  return psi;
}

FockOperators fock_oracle(const FermionModelSpec& spec) {
  spec.validate();
  const FockSpace space(spec.L, spec.N);
  FermionModelSpec whole = spec;
  whole.ell = spec.L;
  FockOperators out;
  out.h = space.one_body(partial_hopping_kernel(whole));
  out.n_ell = space.one_body(partial_number_kernel(spec));
  out.h_ell = space.one_body(partial_hopping_kernel(spec));
  return out;
}

}  // namespace eqnorm::fermions
