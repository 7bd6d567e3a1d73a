#include "grownet/affit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "grownet/errors.hpp"
#include "grownet/io_util.hpp"
#include "grownet/optimize.hpp"

namespace grownet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Form = AttachmentFunction::Form;

uint64_t digest_bins(const BinnedRate& rate) {
  std::string bytes;
  bytes.reserve(rate.bins.size() * 24 + 8);
  auto put = [&bytes](const void* p, size_t n) {
    bytes.append(static_cast<const char*>(p), n);
  };
  put(&rate.half_width, sizeof rate.half_width);
  for (const RatePoint& b : rate.bins) {
    put(&b.k, sizeof b.k);
    put(&b.a_hat, sizeof b.a_hat);
    put(&b.support, sizeof b.support);
  }
  return fnv1a64(bytes);
}

// Residual sum of squares of ln a_hat against ln A(k; theta) with the
// multiplicative scale profiled out (its log is the mean residual).
double profiled_rss(const std::vector<double>& u, const std::vector<double>& y,
                    double ybar, Form form, double theta, double* ln_c) {
  size_t n = u.size();
  double gbar = 0.0;
  std::vector<double> g(n);
  for (size_t i = 0; i < n; ++i) {
    g[i] = form == Form::log_linear ? theta * u[i] : u[i] - std::log1p(theta * u[i]);
    gbar += g[i];
  }
  gbar /= static_cast<double>(n);
  double rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = (y[i] - ybar) - (g[i] - gbar);
    rss += r * r;
  }
  if (ln_c) *ln_c = ybar - gbar;
  return rss;
}

std::string form_name(Form form) {
  switch (form) {
    case Form::linear: return "linear";
    case Form::uniform: return "uniform";
    case Form::log_linear: return "log_linear";
    case Form::nonlinear: return "nonlinear";
  }
  return "unknown";
}

// Least-squares continuous piecewise-linear fit with hinge basis
// [1, x, max(0, x - t_j)]; solved by normal equations (at most 6 columns).
struct HingeFit {
  double rss = kInf;
  std::vector<double> beta;
};

HingeFit fit_hinges(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& knots) {
  size_t n = x.size();
  size_t p = 2 + knots.size();
  auto basis = [&](size_t i, size_t j) -> double {
    if (j == 0) return 1.0;
    if (j == 1) return x[i];
    return std::max(0.0, x[i] - knots[j - 2]);
  };
  std::vector<std::vector<double>> m(p, std::vector<double>(p, 0.0));
  std::vector<double> rhs(p, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < p; ++j) {
      double bj = basis(i, j);
      rhs[j] += bj * y[i];
      for (size_t l = j; l < p; ++l) m[j][l] += bj * basis(i, l);
    }
  }
  for (size_t j = 0; j < p; ++j)
    for (size_t l = 0; l < j; ++l) m[j][l] = m[l][j];

  for (size_t col = 0; col < p; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < p; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-10) return {};
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      double f = m[r][col] / m[col][col];
      for (size_t cc = col; cc < p; ++cc) m[r][cc] -= f * m[col][cc];
      rhs[r] -= f * rhs[col];
    }
  }
  HingeFit out;
  out.beta.resize(p);
  for (size_t j = 0; j < p; ++j) out.beta[j] = rhs[j] / m[j][j];
  out.rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double pred = 0.0;
    for (size_t j = 0; j < p; ++j) pred += out.beta[j] * basis(i, j);
    double r = y[i] - pred;
    out.rss += r * r;
  }
  return out;
}

double gcv_of(double rss, size_t n, size_t n_knots) {
  double c_eff = 2.0 + 4.0 * static_cast<double>(n_knots);
  double dn = static_cast<double>(n);
  if (c_eff >= dn) return kInf;
  double d = 1.0 - c_eff / dn;
  return (rss / dn) / (d * d);
}

}  // namespace

std::string AFFit::label() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%s=%.6g)", form_name(form).c_str(),
                form == Form::log_linear ? "alpha" : "beta", param);
  return buf;
}

AFFit fit_af(const BinnedRate& rate, AttachmentFunction::Form family) {
  if (family != Form::log_linear && family != Form::nonlinear)
    throw ConfigError("fit_af: family must be log_linear or nonlinear");

  std::vector<double> u, y;
  for (const RatePoint& b : rate.bins) {
    if (!(b.a_hat > 0.0) || b.k < 0) continue;
    u.push_back(std::log1p(static_cast<double>(b.k)));
    y.push_back(std::log(b.a_hat));
  }
  int64_t n = static_cast<int64_t>(u.size());
  if (n < 3)
    throw FitError("fit_af: need at least 3 bins with positive rate, have " +
                   std::to_string(n));
  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= static_cast<double>(n);

  auto obj = [&](double theta) {
    return profiled_rss(u, y, ybar, family, theta, nullptr);
  };
  double theta;
  if (family == Form::log_linear) {
    // quadratic in alpha, so the section search lands on the OLS solution
    theta = golden_section_min(obj, -10.0, 10.0, 1e-12);
  } else {
    // R(beta) need not be unimodal globally; bracket on a log grid first
    size_t best_i = 0;
    double best_v = kInf;
    std::vector<double> grid;
    for (int e = -32; e <= 24; ++e) grid.push_back(std::pow(10.0, e / 8.0));
    for (size_t i = 0; i < grid.size(); ++i) {
      double v = obj(grid[i]);
      if (v < best_v) {
        best_v = v;
        best_i = i;
      }
    }
    double lo = grid[best_i == 0 ? 0 : best_i - 1];
    double hi = grid[std::min(best_i + 1, grid.size() - 1)];
    theta = golden_section_min(obj, lo, hi, 1e-12);
  }

  AFFit out;
  out.form = family;
  out.param = theta;
  double ln_c = 0.0;
  out.rss = profiled_rss(u, y, ybar, family, theta, &ln_c);
  out.c = std::exp(ln_c);
  out.n_points = n;
  // RSS can reach exact zero on synthetic data; floor it inside the log so
  // the information criteria stay finite
  double dn = static_cast<double>(n);
  double ln_mse = std::log(std::max(out.rss, 1e-300) / dn);
  out.aic = dn * ln_mse + 2.0 * 2.0;
  out.bic = dn * ln_mse + 2.0 * std::log(dn);
  out.data_digest = digest_bins(rate);
  return out;
}

AFComparison compare_af(const std::vector<AFFit>& fits) {
  if (fits.empty()) throw ConfigError("compare_af: need at least one fit");
  for (const AFFit& f : fits)
    if (f.data_digest != fits[0].data_digest || f.n_points != fits[0].n_points)
      throw ConfigError("compare_af: fits describe different binned data");
  AFComparison out;
  out.ranked = fits;
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const AFFit& a, const AFFit& b) { return a.aic < b.aic; });
  out.winner = form_name(out.ranked[0].form);
  return out;
}

SegmentedFit loglinearity_score(const BinnedRate& rate, int max_segments) {
  if (max_segments < 1)
    throw ConfigError("loglinearity_score: max_segments must be >= 1");

  std::vector<double> x, y;
  for (const RatePoint& b : rate.bins) {
    if (b.k <= 0 || !(b.a_hat > 0.0)) continue;
    x.push_back(std::log(static_cast<double>(b.k)));
    y.push_back(std::log(b.a_hat));
  }
  size_t n = x.size();
  if (n < 2 * static_cast<size_t>(max_segments))
    throw FitError("loglinearity_score: need at least " +
                   std::to_string(2 * max_segments) + " usable bins, have " +
                   std::to_string(n));

  std::vector<double> knots;
  HingeFit current = fit_hinges(x, y, knots);
  double current_gcv = gcv_of(current.rss, n, 0);

  while (static_cast<int>(knots.size()) + 1 < max_segments) {
    // a fit at machine precision takes no knots; rounding jitter in the
    // residuals would otherwise buy spurious ones
    if (current.rss <= static_cast<double>(n) * 1e-20) break;
    double best_gcv = current_gcv;
    double best_t = 0.0;
    HingeFit best_fit;
    bool found = false;
    // candidate knots at interior bin abscissae with two points on each side
    for (size_t i = 1; i + 2 < n; ++i) {
      double t = x[i];
      if (std::find(knots.begin(), knots.end(), t) != knots.end()) continue;
      std::vector<double> trial = knots;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), t), t);
      HingeFit f = fit_hinges(x, y, trial);
      double g = gcv_of(f.rss, n, trial.size());
      if (g < best_gcv) {
        best_gcv = g;
        best_t = t;
        best_fit = std::move(f);
        found = true;
      }
    }
    if (!found) break;
    knots.insert(std::upper_bound(knots.begin(), knots.end(), best_t), best_t);
    current = std::move(best_fit);
    current_gcv = best_gcv;
  }

  SegmentedFit out;
  out.gcv = current_gcv;
  std::vector<double> bounds;
  bounds.push_back(x.front());
  bounds.insert(bounds.end(), knots.begin(), knots.end());
  bounds.push_back(x.back());

  auto eval = [&](double xx) {
    double v = current.beta[0] + current.beta[1] * xx;
    for (size_t j = 0; j < knots.size(); ++j)
      v += current.beta[2 + j] * std::max(0.0, xx - knots[j]);
    return v;
  };

  double best_raw = 0.0, best_dec = 0.0;
  double slope = current.beta[1];
  for (size_t s = 0; s + 1 < bounds.size(); ++s) {
    if (s > 0) slope += current.beta[1 + s];
    SegmentedFit::Segment seg;
    seg.x_lo = bounds[s];
    seg.x_hi = bounds[s + 1];
    seg.slope = slope;
    seg.intercept = eval(seg.x_lo) - slope * seg.x_lo;
    out.segments.push_back(seg);
    best_raw = std::max(best_raw, std::exp(seg.x_hi) - std::exp(seg.x_lo));
    best_dec = std::max(best_dec, (seg.x_hi - seg.x_lo) / std::log(10.0));
  }
  out.score = std::log10(best_raw);
  out.score_logk = best_dec;
  return out;
}

}  // namespace grownet
