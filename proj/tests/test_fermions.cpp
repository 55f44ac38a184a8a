#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "eqnorm/error.hpp"
#include "eqnorm/fermions.hpp"

namespace {

using namespace eqnorm;
using namespace eqnorm::fermions;

constexpr double kPi = std::numbers::pi;

// Full 2^L Fock space built from Jordan-Wigner annihilators. Operators are
// composed by matrix products and Slater states by applying mode creators to
// the vacuum, so nothing here reuses the library's sign bookkeeping.
struct JordanWigner {
  int L;
  std::vector<ComplexMatrix> c;  // c[x-1]

  explicit JordanWigner(int L_) : L(L_) {
    const Eigen::Index d = Eigen::Index{1} << L;
    for (int x = 1; x <= L; ++x) {
      ComplexMatrix m = ComplexMatrix::Zero(d, d);
      for (Eigen::Index b = 0; b < d; ++b) {
        if (!((b >> (x - 1)) & 1)) continue;
        const int below = std::popcount(static_cast<unsigned>(b) & ((1U << (x - 1)) - 1));
        m(b ^ (Eigen::Index{1} << (x - 1)), b) = (below % 2) ? -1.0 : 1.0;
      }
      c.push_back(m);
    }
  }

  ComplexMatrix cdag(int x) const { return c[static_cast<std::size_t>(x - 1)].adjoint(); }

  ComplexMatrix mode_creator(int n) const {
    const Eigen::Index d = Eigen::Index{1} << L;
    ComplexMatrix a = ComplexMatrix::Zero(d, d);
    for (int x = 1; x <= L; ++x) {
      a += std::polar(1.0 / std::sqrt(L), 2 * kPi * n * x / L) * cdag(x);
    }
    return a;
  }

  Eigen::VectorXcd slater(const std::vector<int>& modes) const {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << L);
    psi(0) = 1.0;
    for (auto it = modes.rbegin(); it != modes.rend(); ++it) psi = mode_creator(*it) * psi;
    return psi;
  }

  ComplexMatrix hopping(int bonds, double theta) const {
    const Eigen::Index d = Eigen::Index{1} << L;
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    const cplx ph = std::polar(0.5, theta);
    for (int x = 1; x <= bonds; ++x) {
      const int y = x % L + 1;
      const ComplexMatrix t = ph * cdag(x) * c[static_cast<std::size_t>(y - 1)];
      h += t + t.adjoint();
    }
    return h;
  }

  ComplexMatrix number(int ell) const {
    const Eigen::Index d = Eigen::Index{1} << L;
    ComplexMatrix n = ComplexMatrix::Zero(d, d);
    for (int x = 1; x <= ell; ++x) n += cdag(x) * c[static_cast<std::size_t>(x - 1)];
    return n;
  }
};

double expect(const Eigen::VectorXcd& psi, const ComplexMatrix& a) {
  return (psi.adjoint() * a * psi)(0, 0).real();
}

TEST(Spec, ThetaRangeAndDefaults) {
  auto spec = FermionModelSpec::make(8, 3, 4);
  EXPECT_DOUBLE_EQ(spec.theta, 0.37 * kPi / 8);
  EXPECT_NO_THROW(spec.validate());
  spec.theta = kPi / 8;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.theta = 0.0;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = FermionModelSpec::make(8, 9, 4);
  EXPECT_THROW(spec.validate(), ValidationError);
}

TEST(OccupationSet, ModesAndComplement) {
  const std::vector<int> m{1, 3, 4};
  const auto g = OccupationSet::from_modes(m, 5);
  EXPECT_EQ(g.bits(), 0b01101u);
  EXPECT_EQ(g.size(), 3);
  EXPECT_EQ(g.modes(), m);
  EXPECT_EQ(g.complement().modes(), (std::vector<int>{2, 5}));
  const std::vector<int> bad{0};
  EXPECT_THROW(OccupationSet::from_modes(bad, 5), ValidationError);
}

TEST(EnumerateSets, CountsAndOrder) {
  const auto s = enumerate_sets(6, 3);
  EXPECT_EQ(s.size(), 20u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  for (auto b : s) EXPECT_EQ(std::popcount(b), 3);
  EXPECT_EQ(binomial(243, 1), 243u);
  EXPECT_EQ(binomial(10, 4), 210u);
  EXPECT_THROW(enumerate_sets(30, 15, 1000), CapacityError);
}

TEST(Energies, Examples) {
  const auto e = single_particle_energies(4, 0.0);
  EXPECT_DOUBLE_EQ(e[3], 1.0);
  EXPECT_NEAR(e[0], 0.0, 1e-16);
  const std::vector<int> all{1, 2, 3, 4, 5, 6, 7};
  EXPECT_NEAR(many_body_energy(OccupationSet::from_modes(all, 7), 0.2), 0.0, 1e-14);
  const std::vector<int> one{3};
  EXPECT_NEAR(many_body_energy(OccupationSet::from_modes(one, 7), 0.2),
              std::cos(2 * kPi * 3 / 7 + 0.2), 1e-15);
}

TEST(Energies, ComplementSumsToZero) {
  const double theta = FermionModelSpec::default_theta(9);
  for (auto b : enumerate_sets(9, 4)) {
    const OccupationSet g(b, 9);
    EXPECT_NEAR(many_body_energy(g, theta) + many_body_energy(g.complement(), theta), 0.0, 1e-13);
  }
}

TEST(Overlap, ExamplesAndDirectSum) {
  const auto spec = FermionModelSpec::make(12, 3, 5);
  EXPECT_NEAR(std::abs(w_overlap(4, 4, spec) - cplx(5.0 / 12)), 0.0, 1e-15);
  const auto full = FermionModelSpec::make(12, 3, 12);
  for (int n = 2; n <= 12; ++n) EXPECT_NEAR(std::abs(w_overlap(1, n, full)), 0.0, 1e-14);
  for (int n = 1; n <= 12; ++n) {
    for (int np = 1; np <= 12; ++np) {
      cplx direct = 0.0;
      for (int x = 1; x <= 5; ++x) direct += std::polar(1.0, 2 * kPi * (np - n) * x / 12);
      direct /= 12.0;
      EXPECT_NEAR(std::abs(w_overlap(n, np, spec) - direct), 0.0, 1e-14);
      if (n != np) {
        EXPECT_LE(std::abs(w_overlap(n, np, spec)), 1.0 / cyclic_distance(n, np, 12) + 1e-14);
      }
    }
  }
  EXPECT_EQ(cyclic_distance(1, 12, 12), 1);
  EXPECT_EQ(cyclic_distance(3, 9, 12), 6);
}

TEST(Correlation, Basics) {
  const std::vector<int> m{2, 5};
  const auto c = correlation_matrix(OccupationSet::from_modes(m, 7));
  for (int x = 0; x < 7; ++x) EXPECT_NEAR(std::abs(c(x, x) - cplx(2.0 / 7)), 0.0, 1e-15);
  EXPECT_LE((c - c.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((c * c - c).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(c.trace().real(), 2.0, 1e-14);
  const std::vector<int> all{1, 2, 3, 4, 5, 6, 7};
  const auto id = correlation_matrix(OccupationSet::from_modes(all, 7));
  EXPECT_LE((id - ComplexMatrix::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Correlation, MatchesTwoPointFunctions) {
  const int L = 6;
  const JordanWigner jw(L);
  for (auto b : enumerate_sets(L, 2)) {
    const OccupationSet g(b, L);
    const auto psi = jw.slater(g.modes());
    const auto c = correlation_matrix(g);
    for (int x = 1; x <= L; ++x) {
      for (int y = 1; y <= L; ++y) {
        const cplx direct = (psi.adjoint() * jw.cdag(x) * jw.c[static_cast<std::size_t>(y - 1)] * psi)(0, 0);
        EXPECT_NEAR(std::abs(direct - c(x - 1, y - 1)), 0.0, 1e-12);
      }
    }
  }
}

TEST(FockSpace, AgreesWithJordanWigner) {
  const int L = 6, N = 2;
  const JordanWigner jw(L);
  const auto spec = FermionModelSpec::make(L, N, 3);
  const FockSpace space(L, N);
  const auto ops = fock_oracle(spec);
  std::vector<Eigen::Index> idx;
  for (auto b : space.basis()) idx.push_back(static_cast<Eigen::Index>(b));
  const auto hj = jw.hopping(L, spec.theta);
  const auto nj = jw.number(3);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      EXPECT_NEAR(std::abs(ops.h(ii, jj) - hj(idx[i], idx[j])), 0.0, 1e-14);
      EXPECT_NEAR(std::abs(ops.n_ell(ii, jj) - nj(idx[i], idx[j])), 0.0, 1e-14);
    }
  }
  for (auto b : enumerate_sets(L, N)) {
    const OccupationSet g(b, L);
    const auto a = space.slater_state(g);
    const auto full = jw.slater(g.modes());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      EXPECT_NEAR(std::abs(a(static_cast<Eigen::Index>(i)) - full(idx[i])), 0.0, 1e-12);
    }
    EXPECT_NEAR(expect(full, nj), spec.v() * N, 1e-12);
  }
}

TEST(FockSpace, SingleParticleSpectrumAndNumberConservation) {
  const auto spec = FermionModelSpec::make(4, 1, 2);
  const auto ops = fock_oracle(spec);
  ASSERT_EQ(ops.h.rows(), 4);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ops.h);
  auto eps = single_particle_energies(4, spec.theta);
  std::sort(eps.begin(), eps.end());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(es.eigenvalues()(i), eps[static_cast<std::size_t>(i)], 1e-13);

  const JordanWigner jw(5);
  const ComplexMatrix h = jw.hopping(5, 0.3);
  const ComplexMatrix n = jw.number(5);
  EXPECT_LE((h * n - n * h).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(FockSpace(20, 10), CapacityError);
}

TEST(NlMoments, ClosedFormAndOracle) {
  const auto spec = FermionModelSpec::make(8, 3, 4);
  const std::vector<int> m{1, 2, 5};
  const auto g = OccupationSet::from_modes(m, 8);
  const auto r = nl_moments(g, spec);
  EXPECT_NEAR(r.mean, 1.5, 1e-15);
  const JordanWigner jw(8);
  const auto psi = jw.slater(m);
  const ComplexMatrix n = jw.number(4);
  const double mean = expect(psi, n);
  const double second = expect(psi, n * n);
  EXPECT_NEAR(r.mean, mean, 1e-10);
  EXPECT_NEAR(r.variance, second - mean * mean, 1e-10);
  EXPECT_NEAR(r.wick_second, second, 1e-10);
}

TEST(NlMoments, WholeChainIsConserved) {
  const auto spec = FermionModelSpec::make(7, 3, 7);
  for (auto b : enumerate_sets(7, 3)) {
    const auto r = nl_moments(OccupationSet(b, 7), spec);
    EXPECT_NEAR(r.mean, 3.0, 1e-14);
    EXPECT_NEAR(r.variance, 0.0, 1e-13);
  }
}

TEST(CorrectionSum, BoundAndMonotone) {
  for (int L : {9, 27, 81}) {
    const int ell = static_cast<int>(std::lround(L / 3.0));
    EXPECT_LE(overlap_pair_sum(L, ell), 2.0 * ell);
  }
  {
    const auto spec = FermionModelSpec::make(9, 1, 3);
    const std::vector<int> one{1};
    const auto c = correction_sum(OccupationSet::from_modes(one, 9), spec);
    EXPECT_DOUBLE_EQ(c.occupied, 0.0);
    double direct = 0.0;
    for (int n = 1; n <= 9; ++n) {
      for (int m = n + 1; m <= 9; ++m) direct += std::norm(w_overlap(n, m, spec));
    }
    EXPECT_NEAR(c.all_pairs, direct, 1e-13);
  }
  const auto spec = FermionModelSpec::make(10, 4, 3);
  std::vector<int> modes;
  double prev = 0.0;
  for (int n : {2, 3, 7, 8, 9}) {
    modes.push_back(n);
    const auto c = correction_sum(OccupationSet::from_modes(modes, 10), spec);
    EXPECT_GE(c.occupied, prev);
    prev = c.occupied;
  }
  const auto full = FermionModelSpec::make(10, 4, 10);
  const std::vector<int> some{1, 4, 6};
  EXPECT_NEAR(correction_sum(OccupationSet::from_modes(some, 10), full).all_pairs, 0.0, 1e-13);
}

TEST(HlMoments, OracleAndIdentities) {
  const auto spec = FermionModelSpec::make(9, 3, 3);
  const std::vector<int> m{1, 3, 4};
  const auto g = OccupationSet::from_modes(m, 9);
  const auto r = hl_moments(g, spec);
  EXPECT_NEAR(r.mean, spec.v() * many_body_energy(g, spec.theta), 1e-14);
  const JordanWigner jw(9);
  const auto psi = jw.slater(m);
  const ComplexMatrix hl = jw.hopping(3, spec.theta);
  EXPECT_NEAR(expect(psi, hl), r.mean, 1e-10);
  EXPECT_NEAR(expect(psi, hl * hl), r.second, 1e-9);
  EXPECT_NEAR(r.mode_second, r.second, 1e-10);
  EXPECT_TRUE(r.remainder_ok);
  EXPECT_TRUE(r.variance_ok);
}

TEST(HlMoments, WholeChainIsConserved) {
  const auto spec = FermionModelSpec::make(8, 3, 8);
  for (auto b : enumerate_sets(8, 3)) {
    const OccupationSet g(b, 8);
    const auto r = hl_moments(g, spec);
    EXPECT_NEAR(r.mean, many_body_energy(g, spec.theta), 1e-13);
    EXPECT_NEAR(r.variance, 0.0, 1e-12);
  }
}

TEST(Offdiagonal, SelectionRulesAgainstOracle) {
  const int L = 6, N = 2;
  const auto spec = FermionModelSpec::make(L, N, 3);
  const FockSpace space(L, N);
  const auto ops = fock_oracle(spec);
  const auto sets = enumerate_sets(L, N);
  std::vector<Eigen::VectorXcd> states;
  for (auto b : sets) states.push_back(space.slater_state(OccupationSet(b, L)));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = 0; j < sets.size(); ++j) {
      const OccupationSet a(sets[i], L), b(sets[j], L);
      const cplx n1 = (states[i].adjoint() * ops.n_ell * states[j])(0, 0);
      const cplx n2 = (states[i].adjoint() * ops.n_ell * ops.n_ell * states[j])(0, 0);
      const cplx h1 = (states[i].adjoint() * ops.h_ell * states[j])(0, 0);
      const cplx h2 = (states[i].adjoint() * ops.h_ell * ops.h_ell * states[j])(0, 0);
      EXPECT_NEAR(std::abs(offdiagonal_element(a, b, Observable::kNl, spec) - n1), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(offdiagonal_element(a, b, Observable::kNlSquared, spec) - n2), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(offdiagonal_element(a, b, Observable::kHl, spec) - h1), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(offdiagonal_element(a, b, Observable::kHlSquared, spec) - h2), 0.0, 1e-12);
      if (std::popcount(sets[i] ^ sets[j]) == 2) {
        const int n = std::countr_zero(sets[i] & ~sets[j]) + 1;
        const int m = std::countr_zero(sets[j] & ~sets[i]) + 1;
        EXPECT_NEAR(std::abs(n1), std::abs(w_overlap(n, m, spec)), 1e-12);
      }
      if (i == j) {
        const auto r = nl_moments(a, spec);
        EXPECT_NEAR(std::abs(n2 - cplx(r.second)), 0.0, 1e-12);
      }
    }
  }
}

TEST(Offdiagonal, ThreeModeDifferenceVanishes) {
  const auto spec = FermionModelSpec::make(8, 3, 4);
  const std::vector<int> a{1, 2, 3}, b{4, 5, 6};
  const auto ga = OccupationSet::from_modes(a, 8), gb = OccupationSet::from_modes(b, 8);
  EXPECT_EQ(offdiagonal_element(ga, gb, Observable::kNlSquared, spec), cplx(0.0));
  EXPECT_EQ(offdiagonal_element(ga, gb, Observable::kHlSquared, spec), cplx(0.0));
}

// Oracle: exhaustive enumeration of the closed-form variance.
TEST(MaxNlVariance, EnumerationAndWitness) {
  const auto spec = FermionModelSpec::make(12, 4, 6);
  const auto r = max_nl_variance(spec);
  EXPECT_TRUE(r.exhaustive);
  double best = 0.0;
  for (auto b : enumerate_sets(12, 4)) best = std::max(best, nl_moments(OccupationSet(b, 12), spec).variance);
  EXPECT_NEAR(r.max_variance, best, 1e-12);

  const auto big = FermionModelSpec::make(48, 16, 24);
  const auto w = max_nl_variance(big, 1000);
  EXPECT_FALSE(w.exhaustive);
  EXPECT_NEAR(w.max_variance, 0.25 * 16, 1e-12);
  EXPECT_NEAR(nl_moments(w.witness, big).variance, w.max_variance, 1e-10);
}

TEST(ZGamma, Examples) {
  std::vector<int> all{1, 2, 3, 4, 5};
  EXPECT_NEAR(std::abs(z_gamma(OccupationSet::from_modes(all, 5))), 0.0, 1e-15);
  const std::vector<int> one{1};
  EXPECT_NEAR(std::abs(z_gamma(OccupationSet::from_modes(one, 5)) - std::polar(1.0, 2 * kPi / 5)), 0.0, 1e-15);
  std::vector<cplx> z;
  for (auto b : enumerate_sets(5, 2)) z.push_back(z_gamma(OccupationSet(b, 5)));
  ASSERT_EQ(z.size(), 10u);
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_GT(std::abs(z[i]), 1e-9);
    for (std::size_t j = i + 1; j < z.size(); ++j) EXPECT_GT(std::abs(z[i] - z[j]), 1e-9);
  }
}

TEST(DegeneracyScan, PrimeChain) {
  const auto grid = theta_grid(5, 10'000);
  const auto scan = degeneracy_scan(5, 2, grid);
  EXPECT_LE(scan.flagged_count(), 100u);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(degeneracy_scan(5, 1, zero).flagged_count(), 1u);
}

TEST(DegeneracyScan, OddChainPairSums) {
  const auto grid = theta_grid(9, 2000);
  const auto scan = degeneracy_scan(9, 2, grid);
  ASSERT_EQ(scan.pair_flagged.size(), grid.size());
  EXPECT_LE(scan.pair_flagged_count(), 20u);
}

TEST(DegeneracyScan, Grid) {
  const auto g = theta_grid(4, 2);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_DOUBLE_EQ(g[0], 0.5 * kPi / 8);
  EXPECT_DOUBLE_EQ(g[1], 1.5 * kPi / 8);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(degeneracy_scan(5, 2, bad), ValidationError);
}

TEST(Wick, RandomInstancesMatchOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int L = 4 + static_cast<int>(rng() % 5);
    const int N = 1 + static_cast<int>(rng() % 3);
    const int ell = 1 + static_cast<int>(rng() % static_cast<unsigned>(L));
    FermionModelSpec spec = FermionModelSpec::make(L, N, ell);
    spec.theta = (0.05 + 0.9 * std::uniform_real_distribution<double>()(rng)) * kPi / L;
    const auto sets = enumerate_sets(L, N);
    const OccupationSet g(sets[rng() % sets.size()], L);
    const FockSpace space(L, N);
    const auto ops = fock_oracle(spec);
    const auto psi = space.slater_state(g);
    const auto q = partial_hopping_kernel(spec);
    const auto w = wick_moments(q, correlation_matrix(g));
    EXPECT_NEAR(w.mean, expect(psi, ops.h_ell), 1e-10);
    EXPECT_NEAR(w.second, expect(psi, ops.h_ell * ops.h_ell), 1e-10);
    const auto mm = mode_moments(partial_hopping_mode_kernel(spec), g.bits(), L);
    EXPECT_NEAR(mm.second, w.second, 1e-10);
  }
}

}  // namespace
