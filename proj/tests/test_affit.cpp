#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "grownet/affit.hpp"
#include "grownet/errors.hpp"
#include "grownet/netsim.hpp"
#include "grownet/rate.hpp"
#include "grownet/rng.hpp"

using namespace grownet;

namespace {

std::vector<int64_t> geometric_grid(double k_lo, double k_hi, int points) {
  std::set<int64_t> ks;
  for (int j = 0; j < points; ++j) {
    double f = static_cast<double>(j) / (points - 1);
    ks.insert(std::llround(k_lo * std::pow(k_hi / k_lo, f)));
  }
  return {ks.begin(), ks.end()};
}

BinnedRate rate_from(const std::vector<int64_t>& ks, const std::vector<double>& values) {
  BinnedRate rate;
  for (size_t i = 0; i < ks.size(); ++i) rate.bins.push_back({ks[i], values[i], 1});
  return rate;
}

BinnedRate curve(const AttachmentFunction& af, double c, const std::vector<int64_t>& ks) {
  std::vector<double> values;
  for (int64_t k : ks) values.push_back(c * af.eval(k));
  return rate_from(ks, values);
}

}  // namespace

TEST_CASE("noiseless curves are recovered exactly") {
  auto ks = geometric_grid(1, 2000, 50);
  auto fit = fit_af(curve(AttachmentFunction::log_linear(0.7), 2.0, ks),
                    AttachmentFunction::Form::log_linear);
  CHECK(fit.param == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(fit.c == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(fit.rss < 1e-9);
  CHECK(fit.n_points == static_cast<int64_t>(ks.size()));
  CHECK(fit.form == AttachmentFunction::Form::log_linear);

  auto nl = fit_af(curve(AttachmentFunction::nonlinear(1.3), 0.5, ks),
                   AttachmentFunction::Form::nonlinear);
  CHECK(nl.param == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(nl.c == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(nl.rss < 1e-9);
}

TEST_CASE("log-linear fit equals closed-form least squares") {
  SplitMix64 rng(2718);
  auto ks = geometric_grid(2, 800, 40);
  std::vector<double> values;
  for (int64_t k : ks)
    values.push_back(1.7 * std::pow(static_cast<double>(k + 1), 0.9) *
                     std::exp(0.3 * (rng.next_double() - 0.5)));
  auto rate = rate_from(ks, values);
  auto fit = fit_af(rate, AttachmentFunction::Form::log_linear);

  double su = 0.0, sy = 0.0;
  auto n = static_cast<double>(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) {
    su += std::log1p(static_cast<double>(ks[i]));
    sy += std::log(values[i]);
  }
  double ub = su / n, yb = sy / n, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < ks.size(); ++i) {
    double du = std::log1p(static_cast<double>(ks[i])) - ub;
    sxx += du * du;
    sxy += du * (std::log(values[i]) - yb);
  }
  double slope = sxy / sxx;
  double rss = 0.0;
  for (size_t i = 0; i < ks.size(); ++i) {
    double r = (std::log(values[i]) - yb) - slope * (std::log1p(static_cast<double>(ks[i])) - ub);
    rss += r * r;
  }
  CHECK(fit.param == doctest::Approx(slope).epsilon(1e-8));
  CHECK(fit.c == doctest::Approx(std::exp(yb - slope * ub)).epsilon(1e-8));
  CHECK(fit.rss == doctest::Approx(rss).epsilon(1e-8));

  double dn = n;
  CHECK(fit.aic == doctest::Approx(dn * std::log(fit.rss / dn) + 4.0).epsilon(1e-12));
  CHECK(fit.bic == doctest::Approx(dn * std::log(fit.rss / dn) + 2.0 * std::log(dn)).epsilon(1e-12));
}

TEST_CASE("rescaling the rate moves only the scale parameter") {
  SplitMix64 rng(99);
  auto ks = geometric_grid(1, 500, 30);
  std::vector<double> values;
  for (int64_t k : ks)
    values.push_back(0.8 * AttachmentFunction::nonlinear(0.9).eval(k) *
                     std::exp(0.2 * (rng.next_double() - 0.5)));
  auto rate = rate_from(ks, values);
  std::vector<double> scaled_values;
  for (double v : values) scaled_values.push_back(123.0 * v);
  auto scaled = rate_from(ks, scaled_values);

  for (auto family : {AttachmentFunction::Form::log_linear, AttachmentFunction::Form::nonlinear}) {
    auto a = fit_af(rate, family);
    auto b = fit_af(scaled, family);
    CHECK(b.param == doctest::Approx(a.param).epsilon(1e-6));
    CHECK(b.c == doctest::Approx(a.c * 123.0).epsilon(1e-6));
    CHECK(b.rss == doctest::Approx(a.rss).epsilon(1e-9));
    CHECK(b.aic == doctest::Approx(a.aic).epsilon(1e-9));
    CHECK(b.bic == doctest::Approx(a.bic).epsilon(1e-9));
  }
  auto sa = loglinearity_score(rate);
  auto sb = loglinearity_score(scaled);
  CHECK(sb.score == doctest::Approx(sa.score).epsilon(1e-9));
  CHECK(sb.segments.size() == sa.segments.size());
}

TEST_CASE("the information criteria do not punish the true family") {
  // data drawn around an exactly log-linear curve: the log-linear fit should
  // stay within the usual 2-unit band of the nonlinear one on average
  SplitMix64 rng(515151);
  auto ks = geometric_grid(1, 1000, 60);
  double mean_gap = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> values;
    for (int64_t k : ks)
      values.push_back(2.0 * static_cast<double>(k + 1) *
                       std::exp(0.25 * (rng.next_double() - 0.5)));
    auto rate = rate_from(ks, values);
    auto ll = fit_af(rate, AttachmentFunction::Form::log_linear);
    auto nl = fit_af(rate, AttachmentFunction::Form::nonlinear);
    mean_gap += ll.aic - nl.aic;
  }
  mean_gap /= reps;
  CHECK(mean_gap <= 2.0);
}

TEST_CASE("fit input validation") {
  auto ks = geometric_grid(1, 100, 12);
  auto rate = curve(AttachmentFunction::linear(), 1.0, ks);
  CHECK_THROWS_AS(fit_af(rate, AttachmentFunction::Form::linear), ConfigError);
  CHECK_THROWS_AS(fit_af(rate, AttachmentFunction::Form::uniform), ConfigError);

  BinnedRate two;
  two.bins = {{1, 1.0, 1}, {2, 2.0, 1}};
  CHECK_THROWS_AS(fit_af(two, AttachmentFunction::Form::log_linear), FitError);

  // non-positive rates are excluded before the minimum-count check
  BinnedRate mixed;
  mixed.bins = {{1, 1.0, 1}, {2, 0.0, 1}, {3, -1.0, 1}, {4, 2.0, 1}};
  CHECK_THROWS_AS(fit_af(mixed, AttachmentFunction::Form::log_linear), FitError);
  mixed.bins.push_back({5, 3.0, 1});
  auto fit = fit_af(mixed, AttachmentFunction::Form::log_linear);
  CHECK(fit.n_points == 3);
}

TEST_CASE("family comparison on binned data") {
  auto ks = geometric_grid(1, 2000, 40);
  auto redner = curve(AttachmentFunction::nonlinear(1.0), 3.0, ks);
  auto ll = fit_af(redner, AttachmentFunction::Form::log_linear);
  auto nl = fit_af(redner, AttachmentFunction::Form::nonlinear);
  auto cmp = compare_af({ll, nl});
  CHECK(cmp.winner == "nonlinear");
  REQUIRE(cmp.ranked.size() == 2);
  CHECK(cmp.ranked[0].form == AttachmentFunction::Form::nonlinear);
  CHECK(cmp.ranked[0].aic <= cmp.ranked[1].aic);

  auto solo = compare_af({ll});
  CHECK(solo.winner == "log_linear");
  CHECK(solo.ranked.size() == 1);

  auto other = fit_af(curve(AttachmentFunction::linear(), 1.0, ks),
                      AttachmentFunction::Form::log_linear);
  CHECK_THROWS_AS(compare_af({ll, other}), ConfigError);
  CHECK_THROWS_AS(compare_af({}), ConfigError);
}

TEST_CASE("log-linearity score of a single straight segment") {
  auto ks = geometric_grid(5, 300, 20);
  std::vector<double> values;  // exact power of k: a straight line in ln k
  for (int64_t k : ks) values.push_back(1.5 * std::pow(static_cast<double>(k), 0.8));
  auto fit = loglinearity_score(rate_from(ks, values));
  REQUIRE(fit.segments.size() == 1);
  double lo = static_cast<double>(ks.front()), hi = static_cast<double>(ks.back());
  CHECK(fit.score == doctest::Approx(std::log10(hi - lo)).epsilon(1e-9));
  CHECK(fit.score_logk == doctest::Approx(std::log10(hi / lo)).epsilon(1e-9));
  CHECK(fit.segments[0].slope == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("log-linearity score finds a planted breakpoint") {
  auto ks = geometric_grid(1, 1000, 60);
  std::vector<double> values;
  for (int64_t k : ks) {
    double x = std::log(static_cast<double>(k));
    double b = std::log(50.0);
    double y = x <= b ? 0.5 * x : 0.5 * b + 1.5 * (x - b);
    values.push_back(std::exp(y));
  }
  auto fit = loglinearity_score(rate_from(ks, values));
  REQUIRE(fit.segments.size() >= 2);
  bool found = false;
  for (size_t i = 0; i + 1 < fit.segments.size(); ++i) {
    double k_break = std::exp(fit.segments[i].x_hi);
    if (std::abs(k_break - 50.0) <= 5.0) found = true;
    CHECK(fit.segments[i].x_hi == doctest::Approx(fit.segments[i + 1].x_lo));
  }
  CHECK(found);
  // the longest segment is the upper one, from the break to the end
  CHECK(fit.score == doctest::Approx(std::log10(1000.0 - 50.0)).epsilon(0.05));
}

TEST_CASE("log-linearity score input validation") {
  auto ks = geometric_grid(1, 100, 12);
  auto rate = curve(AttachmentFunction::linear(), 1.0, ks);
  CHECK_THROWS_AS(loglinearity_score(rate, 0), ConfigError);
  BinnedRate few;
  few.bins = {{1, 1.0, 1}, {2, 2.0, 1}, {3, 3.0, 1}, {5, 5.0, 1}};
  CHECK_THROWS_AS(loglinearity_score(few), FitError);  // needs 2 * max_segments bins
  CHECK_NOTHROW(loglinearity_score(few, 2));

  // degree-zero bins carry no ln k abscissa and are dropped
  auto with_zero = rate;
  with_zero.bins.insert(with_zero.bins.begin(), {0, 0.9, 1});
  auto a = loglinearity_score(rate);
  auto b = loglinearity_score(with_zero);
  CHECK(a.score == doctest::Approx(b.score).epsilon(1e-12));
}
