#include "eqnorm/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "eqnorm/error.hpp"
#include "eqnorm/parallel.hpp"

namespace eqnorm::contact {
namespace {

using i128 = __int128;
using u128 = unsigned __int128;
using ld = long double;

constexpr ld kPiL = std::numbers::pi_v<long double>;
constexpr std::uint64_t kU64Max = std::numeric_limits<std::uint64_t>::max();

// sin(pi a / (D + 1)) with a reduced modulo 2 (D + 1).
ld sin_frac(i128 a, std::uint64_t d) {
  const i128 period = 2 * (static_cast<i128>(d) + 1);
  i128 r = a % period;
  if (r < 0) r += period;
  return std::sin(kPiL * static_cast<ld>(r) / static_cast<ld>(static_cast<i128>(d) + 1));
}

ld cos_frac(i128 a, std::uint64_t d) {
  const i128 period = 2 * (static_cast<i128>(d) + 1);
  i128 r = a % period;
  if (r < 0) r += period;
  return std::cos(kPiL * static_cast<ld>(r) / static_cast<ld>(static_cast<i128>(d) + 1));
}

// sum_{k=a..b} sin^2(k t), t = pi ell / (D + 1), 1-based k.
ld sin2_sum(std::uint64_t a, std::uint64_t b, std::uint64_t ell, std::uint64_t d) {
  const ld len = static_cast<ld>(b - a + 1);
  const ld s = sin_frac(static_cast<i128>(ell), d);
  // sum cos(2 k t) = [sin((2b+1) t) - sin((2a-1) t)] / (2 sin t)
  const ld hi = sin_frac((2 * static_cast<i128>(b) + 1) * ell, d);
  const ld lo = sin_frac((2 * static_cast<i128>(a) - 1) * ell, d);
  return 0.5L * len - 0.25L * (hi - lo) / s;
}

// sum_n g_n P_n(ell) for sub-block weights P_n.
ld block_functional(const SubBlocks& sb, const std::vector<ld>& g, std::uint64_t ell) {
  const ld norm = 2.0L / (static_cast<ld>(sb.total) + 1.0L);
  ld f = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0.0L) continue;
    const std::uint64_t a = sb.start[i] + 1;
    const std::uint64_t b = sb.start[i] + sb.size[i];
    f += g[i] * norm * sin2_sum(a, b, ell, sb.total);
  }
  return f;
}

// Extremum of F(ell) = sum_n g_n P_n(ell) over 1 <= ell <= D. Since
// |F - A0| <= R / sin(theta), the scan over ell <= (D + 1) / 2 stops as soon
// as the bound at the next ell cannot improve on the incumbent.
ExtremeSearch search_extreme(const SubBlocks& sb, const std::vector<ld>& g, bool maximize,
                             std::uint64_t budget) {
  const ld dp1 = static_cast<ld>(sb.total) + 1.0L;
  ld a0 = 0.0L;
  ld r = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) {
    a0 += g[i] * static_cast<ld>(sb.size[i]) / dp1;
    r += std::fabs(g[i]) / dp1;
  }
  const std::uint64_t half = (sb.total + 1) / 2;
  ExtremeSearch out;
  out.exact = false;
  ld best = maximize ? -std::numeric_limits<ld>::infinity()
                     : std::numeric_limits<ld>::infinity();
  for (std::uint64_t ell = 1; ell <= half; ++ell) {
    if (out.visited >= budget) return out;
    const ld f = block_functional(sb, g, ell);
    ++out.visited;
    if (maximize ? f > best : f < best) {
      best = f;
      out.ell = ell;
      out.value = static_cast<double>(f);
    }
    if (ell == half) break;
    const ld reach = r / sin_frac(static_cast<i128>(ell + 1), sb.total);
    if (maximize ? a0 + reach <= best : a0 - reach >= best) break;
  }
  out.exact = true;
  return out;
}

void require_valid(const ContactModelSpec& spec) { spec.validate(); }

}  // namespace

double entropy_value(Entropy s, int n) {
  if (n < 0) throw ValidationError("entropy argument must be >= 0");
  switch (s) {
    case Entropy::kLog:
      return std::log1p(static_cast<double>(n));
    case Entropy::kSqrt:
      return std::sqrt(static_cast<double>(n));
  }
  return 0.0;
}

const char* entropy_name(Entropy s) { return s == Entropy::kLog ? "log" : "sqrt"; }

void ContactModelSpec::validate() const {
  if (!(eps0 > 0.0)) throw ValidationError("contact.eps0 must be > 0");
  if (!(eps > 0.0)) throw ValidationError("contact.eps must be > 0");
  if (!(eps < eps0 / 10.0)) throw ValidationError("contact.eps must be < eps0/10");
  if (!(V >= 0.0) || !std::isfinite(V)) throw ValidationError("contact.V must be >= 0");
  if (m < 2 || m % 2 != 0) throw ValidationError("contact.m must be even and >= 2");
  for (int n = 1; n <= m; ++n) {
    const double lhs = 2.0 * entropy_value(entropy, n);
    const double rhs = entropy_value(entropy, n - 1) + entropy_value(entropy, n + 1);
    if (!(lhs > rhs)) throw ValidationError("entropy is not strictly concave on 0..m");
  }
}

std::uint64_t omega(int n, const ContactModelSpec& spec) {
  if (n < 1) throw ValidationError("omega: level index must be >= 1");
  const ld x = std::exp(static_cast<ld>(spec.V) * static_cast<ld>(entropy_value(spec.entropy, n)));
  const ld r = std::round(x);
  if (!(r < 18446744073709551615.0L)) {
    std::ostringstream msg;
    msg << "Omega_" << n << " = exp(" << spec.V * entropy_value(spec.entropy, n)
        << ") exceeds the 64-bit range";
    throw CapacityError(msg.str());
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(r));
}

SubBlocks sub_blocks(const ContactModelSpec& spec) {
  require_valid(spec);
  SubBlocks sb;
  u128 total = 0;
  for (int n = 1; n < spec.m; ++n) {
    const u128 size = static_cast<u128>(omega(n, spec)) * omega(spec.m - n, spec);
    sb.start.push_back(static_cast<std::uint64_t>(total));
    total += size;
    // D + 1 must stay representable for the phase arithmetic.
    if (size > kU64Max || total >= kU64Max) {
      throw CapacityError("block dimension exceeds the 64-bit range");
    }
    sb.size.push_back(static_cast<std::uint64_t>(size));
  }
  sb.total = static_cast<std::uint64_t>(total);
  return sb;
}

std::uint64_t block_dimension(const ContactModelSpec& spec) { return sub_blocks(spec).total; }

std::vector<BasisEntry> block_basis(const ContactModelSpec& spec, std::uint64_t max_dim) {
  require_valid(spec);
  for (int n = 1; n < spec.m; ++n) {
    if (omega(n, spec) > kOmegaDenseGuard) {
      std::ostringstream msg;
      msg << "Omega_" << n << " exceeds the dense guard " << kOmegaDenseGuard;
      throw CapacityError(msg.str());
    }
  }
  const auto d = block_dimension(spec);
  if (d > max_dim) {
    std::ostringstream msg;
    msg << "block dimension " << d << " exceeds the dense cap " << max_dim;
    throw CapacityError(msg.str());
  }
  std::vector<BasisEntry> out;
  out.reserve(d);
  for (int n = 1; n < spec.m; ++n) {
    const auto on = omega(n, spec);
    const auto op = omega(spec.m - n, spec);
    for (std::uint64_t j = 1; j <= on; ++j) {
      for (std::uint64_t jp = 1; jp <= op; ++jp) out.push_back({n, j, spec.m - n, jp});
    }
  }
  return out;
}

double analytic_energy(std::uint64_t ell, const ContactModelSpec& spec) {
  const auto d = block_dimension(spec);
  if (ell < 1 || ell > d) throw ValidationError("eigenstate index outside 1..D");
  return spec.m * spec.eps0 + spec.eps * static_cast<double>(cos_frac(static_cast<i128>(ell), d));
}

Eigenpair analytic_eigenpair(std::uint64_t ell, const ContactModelSpec& spec,
                             std::uint64_t max_dim) {
  const auto d = block_dimension(spec);
  if (ell < 1 || ell > d) throw ValidationError("eigenstate index outside 1..D");
  if (d > max_dim) throw CapacityError("block too large for an explicit eigenvector");
  Eigenpair out;
  out.energy = analytic_energy(ell, spec);
  out.vector.resize(static_cast<Eigen::Index>(d));
  const ld amp = std::sqrt(2.0L / (static_cast<ld>(d) + 1.0L));
  for (std::uint64_t k = 1; k <= d; ++k) {
    out.vector(static_cast<Eigen::Index>(k - 1)) =
        static_cast<double>(amp * sin_frac(static_cast<i128>(ell) * k, d));
  }
  return out;
}

HermitianOperator build_block(const ContactModelSpec& spec, std::uint64_t max_dim) {
  const auto d = static_cast<Eigen::Index>(block_basis(spec, max_dim).size());
  RealMatrix h = RealMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    h(k, k) = spec.m * spec.eps0;
    if (k + 1 < d) {
      h(k, k + 1) = 0.5 * spec.eps;
      h(k + 1, k) = 0.5 * spec.eps;
    }
  }
  return HermitianOperator::from_real(h);
}

std::vector<double> h1_diagonal(const ContactModelSpec& spec, std::uint64_t max_dim) {
  const auto basis = block_basis(spec, max_dim);
  std::vector<double> out(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) out[k] = basis[k].n * spec.eps0;
  return out;
}

double kappa(const ContactModelSpec& spec) {
  const int h = spec.m / 2;
  return 2.0 * entropy_value(spec.entropy, h) - entropy_value(spec.entropy, h - 1) -
         entropy_value(spec.entropy, h + 1);
}

std::vector<double> sub_block_weights(std::uint64_t ell, const ContactModelSpec& spec) {
  const auto sb = sub_blocks(spec);
  if (ell < 1 || ell > sb.total) throw ValidationError("eigenstate index outside 1..D");
  const ld norm = 2.0L / (static_cast<ld>(sb.total) + 1.0L);
  std::vector<double> p(sb.size.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = static_cast<double>(
        norm * sin2_sum(sb.start[i] + 1, sb.start[i] + sb.size[i], ell, sb.total));
  }
  return p;
}

NormalityReport h1_normality(const ContactModelSpec& spec, double scale,
                             std::uint64_t max_dim) {
  const auto sb = sub_blocks(spec);
  if (sb.total > max_dim) {
    std::ostringstream msg;
    msg << "block dimension " << sb.total << " exceeds the cap " << max_dim
        << " for a per-state report";
    throw CapacityError(msg.str());
  }
  if (scale == 0.0) scale = spec.m * spec.eps0;
  const std::size_t d = sb.total;
  std::vector<double> means(d);
  std::vector<double> seconds(d);
  std::vector<std::size_t> indices(d);
  std::vector<ld> g1(sb.size.size());
  std::vector<ld> g2(sb.size.size());
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const ld e = static_cast<ld>(i + 1) * spec.eps0;
    g1[i] = e;
    g2[i] = e * e;
  }
  parallel_for(d, [&](std::size_t i) {
    const std::uint64_t ell = d - i;
    indices[i] = i;
    means[i] = static_cast<double>(block_functional(sb, g1, ell));
    seconds[i] = static_cast<double>(block_functional(sb, g2, ell));
  });
  return certificate_from_moments(indices, means, seconds, scale);
}

H1Extremes h1_extremes(const ContactModelSpec& spec, double scale, std::uint64_t budget) {
  const auto sb = sub_blocks(spec);
  H1Extremes out;
  out.kappa = kappa(spec);
  out.scale = scale == 0.0 ? spec.m * spec.eps0 : scale;
  out.mc_average = 0.5 * spec.m * spec.eps0;
  out.dim = sb.total;
  std::vector<ld> g(sb.size.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const ld dev = (static_cast<ld>(i + 1) - static_cast<ld>(spec.m) / 2) * spec.eps0;
    g[i] = dev * dev;
  }
  out.max_variance = search_extreme(sb, g, true, budget);
  out.zeta = out.max_variance.value / (out.scale * out.scale);
  return out;
}

RatioBound ratio_bound_check(const ContactModelSpec& spec, int r) {
  require_valid(spec);
  const int h = spec.m / 2;
  const int ar = std::abs(r);
  if (ar < 1 || ar > h - 1) throw ValidationError("ratio_bound_check: need 1 <= |r| <= m/2 - 1");
  const ld om_mid = static_cast<ld>(omega(h, spec));
  const ld om_hi = static_cast<ld>(omega(h + ar, spec));
  const ld om_lo = static_cast<ld>(omega(h - ar, spec));
  RatioBound out;
  out.ratio = static_cast<double>(om_hi * om_lo / (om_mid * om_mid));
  // Each Omega carries a relative rounding error of at most 1 / (2 Omega).
  const ld slack = (1.0L + 0.5L / om_hi) * (1.0L + 0.5L / om_lo) /
                   ((1.0L - 0.5L / om_mid) * (1.0L - 0.5L / om_mid));
  out.bound = static_cast<double>(std::exp(-static_cast<ld>(spec.V) * kappa(spec)) * slack);
  out.within = out.ratio <= out.bound;
  return out;
}

RatioScan ratio_scan(const ContactModelSpec& spec) {
  RatioScan out;
  for (int r = 1; r <= spec.m / 2 - 1; ++r) out.rows.push_back(ratio_bound_check(spec, r));
  out.all_within = std::all_of(out.rows.begin(), out.rows.end(),
                               [](const RatioBound& b) { return b.within; });
  out.monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].ratio > out.rows[i - 1].ratio) out.monotone = false;
  }
  return out;
}

PeqQuantities peq_quantities(const ContactModelSpec& spec, std::uint64_t budget) {
  const auto sb = sub_blocks(spec);
  const int h = spec.m / 2;
  PeqQuantities out;
  out.dim_ratio = static_cast<double>(static_cast<ld>(sb.size[static_cast<std::size_t>(h - 1)]) /
                                      static_cast<ld>(sb.total));
  std::vector<ld> g(sb.size.size(), 0.0L);
  g[static_cast<std::size_t>(h - 1)] = 1.0L;
  out.min_peq = search_extreme(sb, g, false, budget);
  return out;
}

VolumeSearch volume_for_zeta(ContactModelSpec spec, double target, double v0, double dv,
                             std::uint64_t max_dim) {
  if (!(dv > 0.0)) throw ValidationError("volume step must be > 0");
  VolumeSearch out;
  bool any = false;
  for (double v = v0;; v += dv) {
    spec.V = v;
    std::uint64_t d = 0;
    try {
      d = block_dimension(spec);
    } catch (const CapacityError&) {
      break;
    }
    if (d > max_dim) break;
    const auto ex = h1_extremes(spec);
    out.V = v;
    out.zeta = ex.zeta;
    out.dim = d;
    any = true;
    if (ex.zeta <= target) {
      out.reached = true;
      return out;
    }
  }
  if (!any) throw CapacityError("no volume on the grid fits the dimension cap");
  return out;
}

}  // namespace eqnorm::contact
