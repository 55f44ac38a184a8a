#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eqnorm/dynamics.hpp"
#include "eqnorm/error.hpp"
#include "eqnorm/spectral.hpp"
#include "eqnorm/spins.hpp"

namespace {

using namespace eqnorm;

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

ComplexMatrix random_hermitian(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  }
  return 0.5 * (m + m.adjoint());
}

TEST(WindowState, RejectsNonUnitNorm) {
  EXPECT_THROW(WindowState({cplx(1.0), cplx(1.0)}), ValidationError);
  EXPECT_THROW(WindowState::normalized({cplx(0.0)}), ValidationError);
  EXPECT_NEAR(WindowState::normalized({cplx(3.0), cplx(0.0, 4.0)}).norm(), 1.0, 1e-15);
}

TEST(Evolve, TimeZeroIsIdentity) {
  const WindowState s({cplx(0.6), cplx(0.0, 0.8)});
  const std::vector<double> e{0.3, -1.2};
  const auto out = evolve(s, e, 0.0);
  EXPECT_EQ(out.coefficients(), s.coefficients());
}

TEST(Evolve, SingleComponentPicksUpPhase) {
  const WindowState s({cplx(0.0), cplx(1.0)});
  const std::vector<double> e{0.0, 0.7};
  for (double t : {0.5, 3.0, 100.0}) {
    const auto c = evolve(s, e, t).coefficients()[1];
    EXPECT_NEAR(std::abs(c), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(c - std::exp(cplx(0.0, -0.7 * t))), 0.0, 1e-12);
  }
}

TEST(Evolve, NormConserved) {
  const auto s = sample_uniform(50, 3);
  std::vector<double> e(50);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::sin(1.0 + static_cast<double>(i));
  for (double t : {0.1, 17.0, 1e4}) EXPECT_NEAR(evolve(s, e, t).norm(), 1.0, 1e-12);
}

TEST(ExpectationSeries, TwoLevelCosine) {
  const double omega = 1.3;
  const WindowState s({cplx(kInvSqrt2), cplx(kInvSqrt2)});
  ComplexMatrix a(2, 2);
  a << 0.0, 0.5, 0.5, 0.0;
  const std::vector<double> e{0.0, omega};
  const auto grid = TimeGrid::uniform(10.0, 101);
  const auto series = expectation_series(s, a, e, grid);
  ASSERT_EQ(series.size(), 101u);
  for (std::size_t k = 0; k < series.size(); ++k) {
    EXPECT_NEAR(series[k], std::cos(omega * grid.points[k]) / 2, 1e-12);
  }
}

TEST(ExpectationSeries, IdentityAndDiagonalAreConstant) {
  const auto s = sample_uniform(6, 8);
  const std::vector<double> e{0.0, 0.1, 0.5, 0.9, 1.3, 2.0};
  const auto grid = TimeGrid::uniform(20.0, 50);
  for (double v : expectation_series(s, ComplexMatrix::Identity(6, 6), e, grid)) {
    EXPECT_NEAR(v, 1.0, 1e-12);
  }
  Eigen::VectorXd d(6);
  d << 1, -2, 3, 0.5, 0.25, 7;
  double expected = 0.0;
  for (std::size_t i = 0; i < 6; ++i) expected += std::norm(s.coefficients()[i]) * d(static_cast<Eigen::Index>(i));
  for (double v : expectation_series(s, d.cast<cplx>().asDiagonal(), e, grid)) {
    EXPECT_NEAR(v, expected, 1e-12);
  }
}

TEST(ExpectationSeries, FirstPointIsDirectExpectation) {
  const auto s = sample_uniform(8, 9);
  const ComplexMatrix a = random_hermitian(8, 10);
  std::vector<double> e(8);
  for (std::size_t i = 0; i < 8; ++i) e[i] = 0.37 * static_cast<double>(i * i);
  Eigen::VectorXcd c(8);
  for (Eigen::Index i = 0; i < 8; ++i) c(i) = s.coefficients()[static_cast<std::size_t>(i)];
  const double direct = (c.adjoint() * a * c)(0, 0).real();
  const auto series = expectation_series(s, a, e, TimeGrid::uniform(5.0, 3));
  EXPECT_NEAR(series[0], direct, 1e-12);
}

// Oracle: precession of independent spins, <S^x_tot>(t) = 1/2 sum_j cos(h_j t)
// for the product state with every spin along +x.
TEST(ExpectationSeries, FreeSpinPrecession) {
  spins::SpinModelSpec spec;
  spec.n = 5;
  spec.seed = 4;
  const auto h = spins::draw_fields(spec);
  const auto sd = eigendecompose(spins::build_free_hamiltonian(h));
  const auto w = select_window(sd, sd.eigenvalues(0) - 1.0, 100.0);
  std::vector<cplx> c(w.size(), cplx(1.0 / std::sqrt(32.0)));
  const WindowState s(c);
  const auto block = window_block(spins::sx_total(5), sd, w);
  const auto grid = TimeGrid::uniform(30.0, 200);
  const auto series = expectation_series(s, block, window_energies(sd, w), grid);
  for (std::size_t k = 0; k < series.size(); ++k) {
    double want = 0.0;
    for (double hj : h) want += 0.5 * std::cos(hj * grid.points[k]);
    EXPECT_NEAR(series[k], want, 1e-10);
  }
}

TEST(LongTimeAverage, NondegenerateDropsCrossTerms) {
  const WindowState s({cplx(kInvSqrt2), cplx(kInvSqrt2)});
  ComplexMatrix a(2, 2);
  a << 0.0, 0.0, 0.0, 1.0;
  const std::vector<double> e{0.0, 1.0};
  EXPECT_NEAR(long_time_average(s, a, e, 1e-9), 0.5, 1e-15);
}

TEST(LongTimeAverage, DegeneratePairKeepsCrossTerm) {
  const WindowState s({cplx(kInvSqrt2), cplx(kInvSqrt2)});
  ComplexMatrix a(2, 2);
  a << 0.2, 0.5, 0.5, 0.6;
  const std::vector<double> e{1.0, 1.0};
  EXPECT_NEAR(long_time_average(s, a, e, 1e-9), 0.5 * (0.2 + 0.6) + 0.5, 1e-15);
}

TEST(LongTimeAverage, GridMeanConvergesWithT) {
  const auto s = sample_uniform(10, 12);
  const ComplexMatrix a = random_hermitian(10, 13);
  std::vector<double> e(10);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::sqrt(2.0 + static_cast<double>(i)) + 0.1 * static_cast<double>(i);
  const double lta = long_time_average(s, a, e, 1e-9);
  const double gap = min_level_spacing(e, 1e-9);
  std::vector<double> err;
  for (double f : {1e2, 1e3, 1e4}) {
    const auto grid = TimeGrid::uniform(f / gap, 200'000);
    const auto series = expectation_series(s, a, e, grid);
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    err.push_back(std::abs(mean - lta));
  }
  EXPECT_GT(err[0], err[2]);
  EXPECT_LT(err[2], 0.01 * a.cwiseAbs().maxCoeff());
}

TEST(GoodSet, ConstantObservableIsAlwaysGood) {
  const auto s = sample_uniform(4, 2);
  const std::vector<double> e{0.0, 0.3, 0.7, 1.9};
  TheoremParams p;
  // (A - mc)^2 = 0 for A = mc * identity.
  const auto r = good_set(s, ComplexMatrix::Zero(4, 4), e, TimeGrid::uniform(10.0, 100), p, 1.0);
  EXPECT_DOUBLE_EQ(r.fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.threshold, 0.01);
}

TEST(GoodSet, AllAboveThreshold) {
  const auto r = good_set_from_series({1.0, 2.0, 3.0}, 0.5);
  EXPECT_DOUBLE_EQ(r.fraction, 0.0);
  const auto r2 = good_set_from_series({0.1, 2.0, 0.5, 3.0}, 0.5);
  EXPECT_DOUBLE_EQ(r2.fraction, 0.5);
}

// Markov step: a small grid mean of d(t) forces a large good fraction.
TEST(GoodSet, MarkovConsistency) {
  TheoremParams p{0.3, 0.2, 0.5};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = sample_uniform(12, seed);
    ComplexMatrix a = 0.05 * random_hermitian(12, seed + 100);
    const ComplexMatrix dev = a * a;
    std::vector<double> e(12);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::log(2.0 + static_cast<double>(i));
    const auto r = good_set(s, dev, e, TimeGrid::uniform(200.0, 2000), p, 1.0);
    double mean = 0.0;
    for (double v : r.series) mean += v;
    mean /= static_cast<double>(r.series.size());
    if (mean <= p.eta * p.eta * p.delta) EXPECT_GE(r.fraction, 1.0 - p.delta);
  }
}

TEST(Chebyshev, Examples) {
  EXPECT_NEAR(chebyshev_tail({0.01, 0.1, 0.1}), 0.01, 1e-15);
  EXPECT_DOUBLE_EQ(chebyshev_tail({0.3, 0.1, 0.3}), 1.0);
  EXPECT_DOUBLE_EQ(chebyshev_tail({0.0, 0.1, 0.3}), 0.0);
  EXPECT_THROW(chebyshev_tail({0.1, 0.1, 0.0}), ValidationError);
}

TEST(MeasurementDistribution, PointMassAndUniform) {
  const std::vector<double> av{-1.0, 2.0};
  const auto sd = eigendecompose(HermitianOperator::diagonal(av));
  const std::vector<cplx> eig{cplx(0.0), cplx(1.0)};
  const auto d1 = measurement_distribution(eig, sd);
  ASSERT_EQ(d1.outcomes().size(), 2u);
  EXPECT_DOUBLE_EQ(d1.outcomes()[1].first, 2.0);
  EXPECT_NEAR(d1.outcomes()[1].second, 1.0, 1e-15);
  EXPECT_NEAR(d1.outcomes()[0].second, 0.0, 1e-15);
  const std::vector<cplx> half{cplx(kInvSqrt2), cplx(0.0, kInvSqrt2)};
  const auto d2 = measurement_distribution(half, sd);
  ASSERT_EQ(d2.outcomes().size(), 2u);
  EXPECT_NEAR(d2.outcomes()[0].second, 0.5, 1e-15);
  EXPECT_NEAR(d2.outcomes()[1].second, 0.5, 1e-15);
  EXPECT_NEAR(d2.tail_mass(0.5, 1.5), 1.0, 1e-15);
  EXPECT_NEAR(d2.tail_mass(2.0, 0.5), 0.5, 1e-15);
}

// Second moment of the outcome distribution around mc equals d(t).
TEST(MeasurementDistribution, SecondMomentIsDeviation) {
  const HermitianOperator h(random_hermitian(10, 31));
  const HermitianOperator a(random_hermitian(10, 32));
  const auto sd = eigendecompose(h);
  const auto w = select_window(sd, sd.eigenvalues(2), sd.eigenvalues(7) - sd.eigenvalues(2));
  const double mc = mc_average(ObservableSpec(a, 1.0), sd, w);
  const auto s = sample_uniform(w.size(), 5);
  const auto sda = eigendecompose(a);
  const auto dev = deviation_block(a, mc, sd, w);
  const auto grid = TimeGrid::uniform(4.0, 5);
  const auto d = good_set(s, dev, window_energies(sd, w), grid, TheoremParams{}, 1.0).series;
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const auto st = evolve(s, window_energies(sd, w), grid.points[k]);
    const auto full = to_full_space(st, sd, w);
    const auto md = measurement_distribution(full, sda);
    EXPECT_NEAR(md.total(), 1.0, 1e-12);
    EXPECT_NEAR(md.second_moment(mc), d[k], 1e-9);
  }
}

TEST(SampleUniform, Basics) {
  const auto one = sample_uniform(1, 77);
  EXPECT_NEAR(std::abs(one.coefficients()[0]), 1.0, 1e-15);
  EXPECT_EQ(sample_uniform(5, 3).coefficients(), sample_uniform(5, 3).coefficients());
  EXPECT_NE(sample_uniform(5, 3).coefficients(), sample_uniform(5, 4).coefficients());
}

TEST(SampleUniform, WeightsAverageToOneOverDim) {
  const std::size_t dim = 7;
  const int samples = 10'000;
  std::vector<double> sum(dim, 0.0), sum2(dim, 0.0);
  for (int k = 0; k < samples; ++k) {
    const auto s = sample_uniform(dim, 1000 + static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < dim; ++i) {
      const double p = std::norm(s.coefficients()[i]);
      sum[i] += p;
      sum2[i] += p * p;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    const double mean = sum[i] / samples;
    const double se = std::sqrt((sum2[i] / samples - mean * mean) / samples);
    EXPECT_LE(std::abs(mean - 1.0 / dim), 3 * se) << i;
  }
}

TEST(ConditionCd, Examples) {
  const TheoremParams p{0.1, 0.1, 0.5};
  const auto s = sample_uniform(4, 9);
  const std::vector<double> zero(4, 0.0);
  EXPECT_TRUE(check_condition_cd(s, zero, p, 2.0));
  const std::vector<double> big(4, 4 * (2.0 * 0.1) * (2.0 * 0.1) * 0.1);
  EXPECT_FALSE(check_condition_cd(s, big, p, 2.0));
}

TEST(LevelSpacing, DefaultTmax) {
  const std::vector<double> e{0.0, 0.0, 0.5, 0.75};
  EXPECT_DOUBLE_EQ(min_level_spacing(e, 1e-12), 0.25);
  EXPECT_DOUBLE_EQ(default_t_max(e, 1e-12), 200.0);
  const std::vector<double> flat{1.0, 1.0};
  EXPECT_DOUBLE_EQ(default_t_max(flat, 1e-12), 1.0);
}

TEST(TimeGrid, Uniform) {
  const auto g = TimeGrid::uniform(2.0, 5);
  EXPECT_EQ(g.points, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  EXPECT_EQ(TimeGrid::uniform(3.0, 1).points, (std::vector<double>{0.0}));
}

}  // namespace
