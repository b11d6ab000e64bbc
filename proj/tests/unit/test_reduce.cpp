#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>

#include "deskzone/error.hpp"
#include "deskzone/reduce.hpp"
#include "deskzone/rng.hpp"
#include "test_support.hpp"

using namespace deskzone;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (auto& v : m.data()) v = rng.normal();
  return m;
}

Matrix random_states(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (auto& v : m.data()) v = 1.0 + static_cast<double>(rng.below(3));
  return m;
}

double column_distance(const Matrix& m, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) s += std::pow(m(r, a) - m(r, b), 2);
  return std::sqrt(s);
}

double max_abs_reconstruction_error(const Matrix& m, const SvdFactors& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < f.rank(); ++k) v += f.u(i, k) * f.sigma[k] * f.v(j, k);
      worst = std::max(worst, std::abs(v - m(i, j)));
    }
  return worst;
}

}  // namespace

TEST(Svd, IdentityHasUnitSingularValues) {
  Matrix id(3, 3);
  for (std::size_t i = 0; i < 3; ++i) id(i, i) = 1.0;
  const auto f = svd_decompose(id);
  ASSERT_EQ(f.rank(), 3u);
  for (double s : f.sigma) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Svd, RankOneTwoByTwo) {
  Matrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 2;
  m(1, 1) = 4;
  const auto f = svd_decompose(m);
  ASSERT_EQ(f.rank(), 1u);  // the zero singular value is below the rank threshold
  EXPECT_NEAR(f.sigma[0], 5.0, 1e-12);
}

TEST(Svd, RandomMatrixReconstructsAndMatchesEigen) {
  const Matrix m = random_matrix(200, 10, 1);
  const auto f = svd_decompose(m);
  ASSERT_EQ(f.rank(), 10u);
  EXPECT_LT(max_abs_reconstruction_error(m, f), 1e-8);

  Eigen::MatrixXd e(200, 10);
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t j = 0; j < 10; ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues();
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(f.sigma[k], s(static_cast<Eigen::Index>(k)), 1e-9 * s(0));
}

TEST(Svd, FactorsAreOrthonormalSortedAndSignFixed) {
  const Matrix m = random_states(96, 12, 2);
  const auto f = svd_decompose(m);
  const std::size_t r = f.rank();
  for (std::size_t a = 0; a < r; ++a) {
    if (a > 0) {
      EXPECT_GE(f.sigma[a - 1], f.sigma[a]);
    }
    for (std::size_t b = 0; b < r; ++b) {
      double uu = 0.0, vv = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) uu += f.u(i, a) * f.u(i, b);
      for (std::size_t j = 0; j < m.cols(); ++j) vv += f.v(j, a) * f.v(j, b);
      EXPECT_NEAR(uu, a == b ? 1.0 : 0.0, 1e-8);
      EXPECT_NEAR(vv, a == b ? 1.0 : 0.0, 1e-8);
    }
    std::size_t arg = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (std::abs(f.u(i, a)) > std::abs(f.u(arg, a))) arg = i;
    EXPECT_GT(f.u(arg, a), 0.0);
  }
}

TEST(Svd, RejectsWideAndNonFinite) {
  EXPECT_THROW(svd_decompose(Matrix(2, 3)), InputError);
  Matrix m(3, 2, 1.0);
  m(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(svd_decompose(m), InputError);
}

TEST(Project, FullRankIsAnIsometry) {
  const Matrix m = random_states(192, 15, 3);
  const auto f = svd_decompose(m);
  const auto r = project(m, f, f.rank());
  for (std::size_t a = 0; a < m.cols(); ++a)
    for (std::size_t b = a + 1; b < m.cols(); ++b) {
      const double d = column_distance(m, a, b);
      EXPECT_NEAR(column_distance(r.coords, a, b), d, 1e-6 * d);
    }
}

TEST(Project, RankOneKeepsDistancesExactly) {
  Matrix m(50, 4);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = (1.0 + static_cast<double>(i % 3)) * (1.0 + static_cast<double>(j));
  const auto f = svd_decompose(m);
  ASSERT_EQ(f.rank(), 1u);
  const auto r = project(m, f, 1);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) EXPECT_NEAR(column_distance(r.coords, a, b), column_distance(m, a, b), 1e-8);
}

TEST(Project, IdenticalColumnsStayIdentical) {
  Matrix m = random_states(96, 5, 4);
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, 3) = m(i, 1);
  const auto f = svd_decompose(m);
  const auto r = project(m, f, f.rank());
  for (std::size_t k = 0; k < r.d; ++k) EXPECT_NEAR(r.coords(k, 3), r.coords(k, 1), 1e-12);
}

TEST(Project, DimensionOutOfRange) {
  const Matrix m = random_matrix(20, 4, 5);
  const auto f = svd_decompose(m);
  EXPECT_THROW(project(m, f, 0), InputError);
  EXPECT_THROW(project(m, f, f.rank() + 1), InputError);
}

TEST(Truncation, MatchesTailSingularValuesAndIsMonotone) {
  const Matrix m = random_states(96, 20, 6);
  const auto f = svd_decompose(m);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t d = 1; d <= f.rank(); ++d) {
    double tail = 0.0;
    for (std::size_t k = d; k < f.rank(); ++k) tail += f.sigma[k] * f.sigma[k];
    const double err = truncation_error(m, f, d);
    EXPECT_NEAR(err, std::sqrt(tail), 1e-8);
    EXPECT_LE(err, prev + 1e-12);
    prev = err;
  }
}

TEST(Factors, CsvRoundTrip) {
  deskzone::testing::TempDir dir("factors");
  const auto f = svd_decompose(random_matrix(30, 6, 7));
  write_factors(dir.path().string(), f);
  const auto back = read_factors(dir.path().string());
  EXPECT_EQ(back.sigma, f.sigma);
  EXPECT_EQ(back.u, f.u);
  EXPECT_EQ(back.v, f.v);
}
