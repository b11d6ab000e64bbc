#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "deskzone/diversity.hpp"
#include "deskzone/error.hpp"
#include "deskzone/rng.hpp"
#include "deskzone/stats.hpp"

using namespace deskzone;

namespace {

double zd(const std::vector<std::vector<double>>& v) {
  std::vector<std::span<const double>> spans(v.begin(), v.end());
  return zone_diversity(spans);
}

ScheduleSet schedule_set(const std::vector<std::vector<double>>& rows) {
  ScheduleSet s;
  s.values = Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.occupant_ids.push_back("o" + std::to_string(i));
    std::copy(rows[i].begin(), rows[i].end(), s.values.row(i).begin());
  }
  return s;
}

std::vector<std::vector<double>> random_vectors(Rng& rng, std::size_t n, std::size_t len) {
  std::vector<std::vector<double>> v(n, std::vector<double>(len));
  for (auto& r : v)
    for (auto& x : r) x = rng.normal();
  return v;
}

}  // namespace

TEST(PairwiseDistance, Examples) {
  const std::vector<double> a{1, 1}, b{3, 3}, c{1, 2, 3}, d{3, 2, 1};
  EXPECT_DOUBLE_EQ(pairwise_distance(a, a), 0.0);
  EXPECT_NEAR(pairwise_distance(a, b), std::sqrt(8.0), 1e-12);
  EXPECT_NEAR(pairwise_distance(c, d), std::sqrt(8.0), 1e-12);
  EXPECT_THROW(pairwise_distance(a, c), InputError);
}

TEST(PairwiseDistance, SymmetricAndTriangle) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto v = random_vectors(rng, 3, 7);
    const double ab = pairwise_distance(v[0], v[1]), ba = pairwise_distance(v[1], v[0]);
    EXPECT_EQ(ab, ba);
    EXPECT_LE(ab, pairwise_distance(v[0], v[2]) + pairwise_distance(v[2], v[1]) + 1e-12);
  }
}

TEST(ZoneDiversity, Examples) {
  EXPECT_NEAR(zd({{0, 0}, {3, 4}}), 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(zd({{1, 2}, {1, 2}, {1, 2}}), 0.0);
  EXPECT_NEAR(zd({{0}, {1}, {3}}), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(zd({{7, 7}}), 0.0);
}

TEST(ZoneDiversity, CopiesOfOneScheduleAreZero) {
  for (std::size_t k = 1; k < 8; ++k) EXPECT_DOUBLE_EQ(zd(std::vector<std::vector<double>>(k, {1, 3, 2})), 0.0);
}

TEST(ZoneDiversity, PermutationInvariant) {
  Rng rng(2);
  auto v = random_vectors(rng, 6, 5);
  const double base = zd(v);
  for (int t = 0; t < 20; ++t) {
    rng.shuffle(v);
    EXPECT_NEAR(zd(v), base, 1e-12);
  }
}

TEST(LayoutDiversity, IdenticalOccupantsGiveZero) {
  auto frame = LayoutFrame::uniform(2, 2, {"o0", "o1", "o2", "o3"});
  EXPECT_DOUBLE_EQ(layout_diversity(Layout(frame), schedule_set({{1, 2}, {1, 2}, {1, 2}, {1, 2}})).total, 0.0);
  // Each zone holds one identical pair.
  EXPECT_DOUBLE_EQ(layout_diversity(Layout(frame), schedule_set({{1, 1}, {1, 1}, {3, 3}, {3, 3}})).total, 0.0);
}

TEST(LayoutDiversity, SwapChangesOnlyTheTwoZones) {
  Rng rng(3);
  auto frame = LayoutFrame::uniform(3, 3, {"o0", "o1", "o2", "o3", "o4", "o5", "o6", "o7", "o8"});
  const auto set = schedule_set(random_vectors(rng, 9, 4));
  Layout l(frame);
  const auto before = layout_diversity(l, set);
  l.swap_desks(0, 3);
  const auto after = layout_diversity(l, set);
  EXPECT_EQ(after.per_zone[2], before.per_zone[2]);
  EXPECT_NE(after.per_zone[0], before.per_zone[0]);
  EXPECT_NEAR(after.total, after.per_zone[0] + after.per_zone[1] + after.per_zone[2], 1e-12);
}

TEST(LayoutDiversity, MissingVectorIsAnError) {
  auto frame = LayoutFrame::uniform(1, 2, {"o0", "zz"});
  EXPECT_THROW(align_to_frame(schedule_set({{1}, {2}}), *frame), InputError);
}

TEST(DiversityReport, CsvSchema) {
  auto frame = LayoutFrame::uniform(2, 1, {"o0", "o1"});
  std::ostringstream out;
  write_diversity_report(out, layout_diversity(Layout(frame), schedule_set({{1}, {2}})));
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "zone_id,diversity");
}

TEST(Ols, PerfectLine) {
  const std::vector<double> x{1, 2, 3}, y{2, 4, 6};
  const auto r = ols_regress(x, y);
  EXPECT_NEAR(r.slope, 2.0, 1e-12);
  EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
  EXPECT_TRUE(r.exact_fit);
  EXPECT_EQ(r.p_value, 0.0);
  EXPECT_EQ(r.slope_std_err, 0.0);
}

TEST(Ols, MatchesClosedFormWithStudentT) {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 2, 6};
  const auto r = ols_regress(x, y);
  // Closed form: xbar = 1.5, ybar = 3, Sxx = 5, Sxy = 7.
  const double slope = 7.0 / 5.0, intercept = 3.0 - slope * 1.5;
  double sse = 0.0;
  for (std::size_t i = 0; i < 4; ++i) sse += std::pow(y[i] - intercept - slope * x[i], 2);
  const double se = std::sqrt(sse / 2.0 / 5.0);
  const double t = slope / se;
  const double p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(2.0), std::abs(t)));
  EXPECT_NEAR(r.slope, slope, 1e-12);
  EXPECT_NEAR(r.intercept, intercept, 1e-12);
  EXPECT_NEAR(r.slope_std_err, se, 1e-12);
  EXPECT_NEAR(r.t_statistic, t, 1e-10);
  EXPECT_NEAR(r.p_value, p, 1e-10);
  EXPECT_EQ(r.n, 4u);
}

TEST(Ols, ConstantResponse) {
  const std::vector<double> x{1, 2, 3, 4}, y{5, 5, 5, 5};
  const auto r = ols_regress(x, y);
  EXPECT_EQ(r.slope, 0.0);
  EXPECT_EQ(r.r_squared, 0.0);
}

TEST(Ols, DegenerateInputs) {
  const std::vector<double> c{2, 2, 2}, y{1, 2, 3};
  try {
    ols_regress(c, y);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate regressor"), std::string::npos);
  }
  const std::vector<double> two{1, 2};
  EXPECT_THROW(ols_regress(two, two), InputError);
  EXPECT_THROW(ols_regress(y, two), InputError);
}

TEST(Ols, RSquaredIsSquaredCorrelation) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(20), y(20);
    for (std::size_t i = 0; i < 20; ++i) {
      x[i] = rng.normal();
      y[i] = 0.5 * x[i] + rng.normal();
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / 20, my = std::accumulate(y.begin(), y.end(), 0.0) / 20;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    const auto r = ols_regress(x, y);
    EXPECT_NEAR(r.r_squared, sxy * sxy / (sxx * syy), 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Stats, IncompleteBetaMatchesBoost) {
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    const double a = 0.05 + 60.0 * rng.uniform(), b = 0.05 + 60.0 * rng.uniform(), x = rng.uniform();
    EXPECT_NEAR(stats::incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-10) << a << ' ' << b << ' ' << x;
  }
  EXPECT_EQ(stats::incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(stats::incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(Stats, StudentTMatchesBoost) {
  for (double df : {1.0, 2.0, 5.0, 30.0, 200.0})
    for (double t : {-40.0, -3.0, -0.5, 0.0, 0.7, 2.5, 12.0}) {
      boost::math::students_t dist(df);
      EXPECT_NEAR(stats::student_t_cdf(t, df), boost::math::cdf(dist, t), 1e-10);
      EXPECT_NEAR(stats::student_t_two_tailed(t, df), 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))),
                  1e-10);
    }
}
