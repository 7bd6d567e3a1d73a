#include "grownet/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <utility>

#include "grownet/errors.hpp"
#include "grownet/optimize.hpp"

namespace grownet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln of the continuous density shape at real x > 0. Constant density factors
// (1/sigma*sqrt(2pi), lambda, ...) are dropped everywhere; they cancel against
// the normalizing sum, so masses and likelihood differences are unaffected.
double log_shape(Family family, double p1, double p2, double x) {
  switch (family) {
    case Family::log_normal: {
      double z = (std::log(x) - p1) / p2;
      return -std::log(x) - 0.5 * z * z;
    }
    case Family::power_law:
      return -p1 * std::log(x);
    case Family::exponential:
      return -p1 * x;
  }
  return -kInf;
}

// (d/dx) ln shape, for the Euler-Maclaurin correction terms.
double dlog_shape(Family family, double p1, double p2, double x) {
  switch (family) {
    case Family::log_normal:
      return -(1.0 + (std::log(x) - p1) / (p2 * p2)) / x;
    case Family::power_law:
      return -p1 / x;
    case Family::exponential:
      return -p1;
  }
  return 0.0;
}

// ln erfc(z), finite for large z where erfc underflows.
double log_erfc(double z) {
  if (z < 15.0) return std::log(std::erfc(z));
  double a = 1.0 / (2.0 * z * z);
  return -z * z - std::log(z) - 0.5 * std::log(M_PI) + std::log1p(-a * (1.0 - 3.0 * a));
}

// ln integral_b^inf shape(u) du, closed form per family.
double log_shape_integral(Family family, double p1, double p2, double b) {
  switch (family) {
    case Family::log_normal: {
      double z = (std::log(b) - p1) / (p2 * std::sqrt(2.0));
      return std::log(p2) + 0.5 * std::log(M_PI / 2.0) + log_erfc(z);
    }
    case Family::power_law:
      return (1.0 - p1) * std::log(b) - std::log(p1 - 1.0);
    case Family::exponential:
      return -p1 * b - std::log(p1);
  }
  return -kInf;
}

// ln sum_{x=a}^{inf} shape(x) over integers. The exponential family has a
// closed geometric form. The others sum explicitly through the mode plus a
// fixed margin and close the remainder with an Euler-Maclaurin estimate
// (integral + f(b)/2 - f'(b)/12); the neglected term is O(f'''(b)) and is
// far below the 1e-9 normalization budget for every parameter region the
// fitters can reach. Direct summation alone cannot meet that budget: a
// shallow power law pushes the 1e-12 residual-mass cutoff beyond any
// enumerable range.
double log_tail_sum(Family family, double p1, double p2, int64_t a) {
  if (family == Family::exponential) {
    return -p1 * static_cast<double>(a) - std::log(-std::expm1(-p1));
  }
  double mode = 1.0;
  if (family == Family::log_normal) {
    double lm = p1 - p2 * p2;
    mode = lm > 42.0 ? 1.7e18 : std::exp(lm);
  }
  int64_t b = a;
  if (mode > static_cast<double>(a)) b = static_cast<int64_t>(std::ceil(mode));
  b = std::min(b + 48, a + 100000);

  double r = log_shape(family, p1, p2, static_cast<double>(a));
  if (mode > static_cast<double>(a)) {
    int64_t xm = std::min<int64_t>(static_cast<int64_t>(mode), b - 1);
    r = std::max(r, log_shape(family, p1, p2, static_cast<double>(xm)));
    r = std::max(r, log_shape(family, p1, p2, static_cast<double>(xm + 1)));
  }
  if (!std::isfinite(r)) return r;

  double acc = 0.0;
  for (int64_t x = a; x < b; ++x)
    acc += std::exp(log_shape(family, p1, p2, static_cast<double>(x)) - r);
  double fb = std::exp(log_shape(family, p1, p2, static_cast<double>(b)) - r);
  double fpb = fb * dlog_shape(family, p1, p2, static_cast<double>(b));
  acc += std::exp(log_shape_integral(family, p1, p2, static_cast<double>(b)) - r);
  acc += 0.5 * fb - fpb / 12.0;
  return r + std::log(acc);
}

// Fitted-parameter boxes for the derivative-free searches. gamma and lambda
// live in positive ranges; mu is unbounded and sigma has a wide positive box
// that keeps the discretized sum well conditioned.
constexpr double kGammaLo = 1.0 + 1e-6;
constexpr double kGammaHi = 25.0;
constexpr double kSigmaLo = 0.05;
constexpr double kSigmaHi = 50.0;

std::pair<double, double> mle_params(const TailData& tail, Family family, int64_t k_min) {
  switch (family) {
    case Family::exponential: {
      // exact MLE of the geometric form: lambda = ln(1 + 1/(mean - k_min))
      double xbar = tail.sum_x / static_cast<double>(tail.n);
      return {std::log1p(1.0 / (xbar - static_cast<double>(k_min))), 0.0};
    }
    case Family::power_law: {
      // likelihood is concave in gamma, so a bracketed section search is exact
      auto nll = [&](double g) { return -tail_log_likelihood(tail, family, g, 0.0, k_min); };
      return {golden_section_min(nll, kGammaLo, kGammaHi, 1e-11), 0.0};
    }
    case Family::log_normal: {
      double n = static_cast<double>(tail.n);
      double mu0 = tail.sum_lnx / n;
      double sd0 = std::sqrt(std::max(tail.sum_lnx2 / n - mu0 * mu0, 1e-6));
      auto nll = [&](const std::vector<double>& p) {
        if (p[1] < kSigmaLo || p[1] > kSigmaHi) return kInf;
        return -tail_log_likelihood(tail, family, p[0], p[1], k_min);
      };
      // The truncated-likelihood surface has a ridge where mu runs far below
      // the moment estimate while sigma widens; a coarse grid locates the
      // basin before the simplex polish.
      static constexpr double kSigmaGrid[] = {0.5, 0.75, 1.0, 1.5, 2.25, 3.5, 5.0, 7.5, 10.0};
      std::vector<double> best = {mu0, sd0};
      double best_v = nll(best);
      for (int i = -2; i <= 14; ++i) {
        double mu = mu0 - static_cast<double>(i) * sd0;
        for (double s : kSigmaGrid) {
          double v = nll({mu, sd0 * s});
          if (v < best_v) {
            best_v = v;
            best = {mu, sd0 * s};
          }
        }
      }
      auto fit = nelder_mead(nll, best, {std::max(0.25 * sd0, 0.02), std::max(0.2 * best[1], 0.02)},
                             1e-13, 4000);
      auto alt = nelder_mead(nll, {mu0, sd0},
                             {std::max(0.5 * sd0, 0.05), std::max(0.5 * sd0, 0.05)}, 1e-13, 4000);
      if (nll(alt) < nll(fit)) fit = alt;
      return {fit[0], fit[1]};
    }
  }
  return {0.0, 0.0};
}

TailData tail_from_sorted(const std::vector<int64_t>& xs, const std::vector<int32_t>& counts) {
  TailData out;
  out.values.reserve(xs.size());
  for (int64_t x : xs) {
    int64_t c = counts[static_cast<size_t>(x)];
    double lx = std::log(static_cast<double>(x));
    out.values.emplace_back(x, c);
    out.n += c;
    out.sum_x += static_cast<double>(c) * static_cast<double>(x);
    out.sum_lnx += static_cast<double>(c) * lx;
    out.sum_lnx2 += static_cast<double>(c) * lx * lx;
  }
  return out;
}

}  // namespace

std::string family_label(Family family) {
  switch (family) {
    case Family::log_normal: return "log_normal";
    case Family::power_law: return "power_law";
    case Family::exponential: return "exponential";
  }
  return "unknown";
}

double DistributionModel::log_mass(int64_t x) const {
  if (x < k_min) return -kInf;
  return log_shape(family, p1, p2, static_cast<double>(x)) - log_norm;
}

double DistributionModel::mass(int64_t x) const {
  return x < k_min ? 0.0 : std::exp(log_mass(x));
}

double DistributionModel::cdf(int64_t x) const {
  if (x < k_min) return 0.0;
  double lt = log_tail_sum(family, p1, p2, x + 1) - log_norm;
  return std::clamp(1.0 - std::exp(lt), 0.0, 1.0);
}

DistributionModel make_model(Family family, double p1, double p2, int64_t k_min) {
  if (k_min < 1) throw ConfigError("make_model: k_min must be >= 1");
  switch (family) {
    case Family::log_normal:
      if (!std::isfinite(p1) || !std::isfinite(p2) || !(p2 > 0.0))
        throw ConfigError("make_model: log_normal needs finite mu and sigma > 0");
      break;
    case Family::power_law:
      if (!std::isfinite(p1) || !(p1 > 1.0))
        throw ConfigError("make_model: power_law needs gamma > 1");
      break;
    case Family::exponential:
      if (!std::isfinite(p1) || !(p1 > 0.0))
        throw ConfigError("make_model: exponential needs lambda > 0");
      break;
  }
  DistributionModel m;
  m.family = family;
  m.p1 = p1;
  m.p2 = p2;
  m.k_min = k_min;
  m.log_norm = log_tail_sum(family, p1, p2, k_min);
  return m;
}

TailData tail_of(const DegreeHistogram& hist, int64_t k_min) {
  TailData out;
  for (int64_t k = std::max<int64_t>(k_min - 1, 0);
       k < static_cast<int64_t>(hist.counts.size()); ++k) {
    int64_t c = hist.counts[static_cast<size_t>(k)];
    if (c == 0) continue;
    int64_t x = k + 1;
    double lx = std::log(static_cast<double>(x));
    out.values.emplace_back(x, c);
    out.n += c;
    out.sum_x += static_cast<double>(c) * static_cast<double>(x);
    out.sum_lnx += static_cast<double>(c) * lx;
    out.sum_lnx2 += static_cast<double>(c) * lx * lx;
  }
  return out;
}

double tail_log_likelihood(const TailData& tail, Family family, double p1, double p2,
                           int64_t k_min) {
  if (tail.n <= 0) return -kInf;
  double n = static_cast<double>(tail.n);
  double ll = 0.0;
  switch (family) {
    case Family::log_normal:
      if (!std::isfinite(p1) || !(p2 > 0.0)) return -kInf;
      ll = -tail.sum_lnx -
           (tail.sum_lnx2 - 2.0 * p1 * tail.sum_lnx + n * p1 * p1) / (2.0 * p2 * p2);
      break;
    case Family::power_law:
      if (!(p1 > 1.0)) return -kInf;
      ll = -p1 * tail.sum_lnx;
      break;
    case Family::exponential:
      if (!(p1 > 0.0)) return -kInf;
      ll = -p1 * tail.sum_x;
      break;
  }
  ll -= n * log_tail_sum(family, p1, p2, k_min);
  return std::isfinite(ll) ? ll : -kInf;
}

double ks_statistic(const TailData& tail, const DistributionModel& model) {
  // The empirical CDF steps only at observed values and both CDFs are
  // monotone, so the supremum over all integers is attained at an observed
  // value or at the integer just before one.
  double d = 0.0;
  double n = static_cast<double>(tail.n);
  int64_t cum = 0;
  int64_t prev = model.k_min - 1;
  for (const auto& [x, c] : tail.values) {
    if (x - 1 >= model.k_min && x - 1 > prev)
      d = std::max(d, std::fabs(static_cast<double>(cum) / n - model.cdf(x - 1)));
    cum += c;
    d = std::max(d, std::fabs(static_cast<double>(cum) / n - model.cdf(x)));
    prev = x;
  }
  return d;
}

TailFit fit_mle(const DegreeHistogram& hist, Family family, int64_t k_min, int64_t min_tail) {
  if (k_min < 1) throw ConfigError("fit_mle: k_min must be >= 1");
  if (min_tail < 2) min_tail = 2;
  TailData tail = tail_of(hist, k_min);
  if (tail.n < min_tail)
    throw FitError("fit_mle: tail at k_min=" + std::to_string(k_min) + " has " +
                   std::to_string(tail.n) + " points, need " + std::to_string(min_tail));
  if (tail.values.size() < 2)
    throw FitError("fit_mle: tail at k_min=" + std::to_string(k_min) +
                   " is a single repeated value");
  auto [p1, p2] = mle_params(tail, family, k_min);
  double ll = tail_log_likelihood(tail, family, p1, p2, k_min);
  if (!std::isfinite(ll))
    throw AnalysisError("fit_mle: likelihood not finite at optimum (" + family_label(family) +
                        ", p1=" + std::to_string(p1) + ", p2=" + std::to_string(p2) +
                        ", k_min=" + std::to_string(k_min) + ")");
  TailFit out;
  out.model = make_model(family, p1, p2, k_min);
  out.k_min = k_min;
  out.ks_stat = ks_statistic(tail, out.model);
  out.log_likelihood = ll;
  out.n_tail = tail.n;
  return out;
}

TailFit gof_test(const DegreeHistogram& hist, const TailFit& fit, int64_t n_bootstrap,
                 uint64_t seed, int threads) {
  if (n_bootstrap < 1) throw ConfigError("gof_test: n_bootstrap must be >= 1");
  if (fit.model.k_min != fit.k_min)
    throw ConfigError("gof_test: fit and model disagree on k_min");
  TailData tail = tail_of(hist, fit.k_min);
  if (tail.n <= 0) throw FitError("gof_test: empty tail");
  if (tail.n != fit.n_tail) throw ConfigError("gof_test: fit does not match histogram");

  int64_t total = hist.total_nodes;
  double p_tail = static_cast<double>(tail.n) / static_cast<double>(total);
  ModelSampler sampler(fit.model);
  double ks_obs = fit.ks_stat;
  Family family = fit.model.family;
  int64_t k_min = fit.k_min;

  std::vector<uint8_t> exceed(static_cast<size_t>(n_bootstrap), 0);
  auto run_block = [&](int64_t lo, int64_t hi) {
    std::vector<int32_t> counts(static_cast<size_t>(sampler.max_value()) + 1, 0);
    std::vector<int64_t> touched;
    for (int64_t r = lo; r < hi; ++r) {
      SplitMix64 rng(split_stream(seed, static_cast<uint64_t>(r)));
      touched.clear();
      // Mixture resample of the full dataset size. Body draws land below
      // k_min by construction and cannot enter the fixed-cutoff refit or the
      // KS distance, so only the tail/body split needs actual sampling.
      for (int64_t i = 0; i < total; ++i) {
        if (rng.next_double() < p_tail) {
          int64_t x = sampler.draw(rng);
          if (counts[static_cast<size_t>(x)]++ == 0) touched.push_back(x);
        }
      }
      std::sort(touched.begin(), touched.end());
      TailData rep = tail_from_sorted(touched, counts);
      for (int64_t x : touched) counts[static_cast<size_t>(x)] = 0;

      // A replicate too degenerate to refit counts as exceeding, which can
      // only make the p-value conservative; it needs a tail of a handful of
      // points to happen at all.
      double ks_rep = kInf;
      if (rep.values.size() >= 2) {
        try {
          auto [q1, q2] = mle_params(rep, family, k_min);
          DistributionModel m = make_model(family, q1, q2, k_min);
          ks_rep = ks_statistic(rep, m);
        } catch (const AnalysisError&) {
          ks_rep = kInf;
        }
      }
      exceed[static_cast<size_t>(r)] = ks_rep > ks_obs ? 1 : 0;
    }
  };

  int64_t nthreads = std::clamp<int64_t>(threads, 1, n_bootstrap);
  if (nthreads == 1) {
    run_block(0, n_bootstrap);
  } else {
    std::vector<std::thread> pool;
    int64_t block = (n_bootstrap + nthreads - 1) / nthreads;
    for (int64_t lo = 0; lo < n_bootstrap; lo += block)
      pool.emplace_back(run_block, lo, std::min(lo + block, n_bootstrap));
    for (auto& th : pool) th.join();
  }

  int64_t over = 0;
  for (uint8_t e : exceed) over += e;
  TailFit out = fit;
  out.p_value = static_cast<double>(over) / static_cast<double>(n_bootstrap);
  out.gof_seed = seed;
  out.gof_replicates = n_bootstrap;
  if (n_bootstrap < 100) {
    if (!out.note.empty()) out.note += "; ";
    out.note += "p-value from fewer than 100 replicates; resolution is coarse";
  }
  return out;
}

TailFit select_kmin(const DegreeHistogram& hist, Family family, KminCriterion criterion,
                    uint64_t seed, int64_t n_bootstrap, int threads, int64_t min_tail) {
  if (min_tail < 2) min_tail = 2;
  TailData full = tail_of(hist, 1);
  if (full.values.empty()) throw FitError("select_kmin: empty histogram");

  std::vector<int64_t> candidates;
  int64_t suffix_n = full.n;
  for (size_t i = 0; i < full.values.size(); ++i) {
    if (suffix_n < min_tail || full.values.size() - i < 2) break;
    candidates.push_back(full.values[i].first);
    suffix_n -= full.values[i].second;
  }
  if (candidates.empty()) throw FitError("select_kmin: no cutoff leaves enough tail points");

  if (criterion == KminCriterion::min_ks) {
    TailFit best;
    bool have = false;
    std::vector<std::pair<int64_t, double>> scan;
    for (int64_t v : candidates) {
      TailFit f;
      try {
        f = fit_mle(hist, family, v, min_tail);
      } catch (const FitError&) {
        continue;
      }
      scan.emplace_back(v, f.ks_stat);
      if (!have || f.ks_stat < best.ks_stat) {
        best = f;
        have = true;
      }
    }
    if (!have) throw FitError("select_kmin: no candidate produced a fit");
    best.kmin_scan = std::move(scan);
    return best;
  }

  // min_p010: smallest cutoff whose bootstrap p-value reaches 0.10, scanning
  // upward. A short screening pass discards clearly rejected cutoffs before
  // spending the full replicate budget; the screen reuses the same seed, so
  // its replicates are a prefix of the full run.
  if (n_bootstrap < 1) throw ConfigError("select_kmin: n_bootstrap must be >= 1");
  int64_t screen_b = std::min<int64_t>(100, n_bootstrap);
  std::vector<std::pair<int64_t, double>> scan;
  for (int64_t v : candidates) {
    TailFit f;
    try {
      f = fit_mle(hist, family, v, min_tail);
    } catch (const FitError&) {
      continue;
    }
    scan.emplace_back(v, f.ks_stat);
    TailFit tested = gof_test(hist, f, screen_b, seed, threads);
    if (screen_b < n_bootstrap) {
      if (tested.p_value < 0.02) continue;
      tested = gof_test(hist, f, n_bootstrap, seed, threads);
    }
    if (tested.p_value >= 0.10) {
      tested.kmin_scan = std::move(scan);
      return tested;
    }
  }
  throw FitError("select_kmin: no cutoff reaches p >= 0.10");
}

FamilyRanking compare_families(const DegreeHistogram& hist, const std::vector<TailFit>& fits) {
  if (fits.size() < 2) throw ConfigError("compare_families: need at least two fits");
  int64_t k_min = fits[0].k_min;
  for (const auto& f : fits)
    if (f.k_min != k_min || f.model.k_min != k_min)
      throw ConfigError("compare_families: fits use different k_min cutoffs");
  TailData tail = tail_of(hist, k_min);
  if (tail.n < 2) throw ConfigError("compare_families: tail has fewer than two points");
  for (const auto& f : fits)
    if (f.n_tail != tail.n)
      throw ConfigError("compare_families: fit does not match the histogram tail");

  FamilyRanking out;
  out.ranked = fits;
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const TailFit& a, const TailFit& b) {
                     return a.log_likelihood > b.log_likelihood;
                   });

  double n = static_cast<double>(tail.n);
  for (size_t i = 0; i < out.ranked.size(); ++i) {
    for (size_t j = i + 1; j < out.ranked.size(); ++j) {
      const TailFit& a = out.ranked[i];
      const TailFit& b = out.ranked[j];
      double diff = a.log_likelihood - b.log_likelihood;
      double mean = diff / n;
      double var = 0.0;
      for (const auto& [x, c] : tail.values) {
        double d = a.model.log_mass(x) - b.model.log_mass(x);
        var += static_cast<double>(c) * (d - mean) * (d - mean);
      }
      var /= n - 1.0;
      double z = var > 0.0 ? diff / std::sqrt(var * n) : 0.0;
      out.pairwise.push_back({a.model.family, b.model.family, diff, z});
    }
  }

  double gap = out.ranked[0].log_likelihood - out.ranked[1].log_likelihood;
  out.tie = std::fabs(gap) <= 1e-9 * (1.0 + std::fabs(out.ranked[0].log_likelihood));
  out.winner = out.tie ? "tie" : family_label(out.ranked[0].model.family);
  return out;
}

std::vector<std::pair<int64_t, double>> cumulative(const DegreeHistogram& hist) {
  if (hist.total_nodes <= 0) throw ConfigError("cumulative: empty histogram");
  int64_t k_max = hist.max_degree();
  int64_t k_lo = 0;
  while (hist.count(k_lo) == 0) ++k_lo;
  std::vector<std::pair<int64_t, double>> out;
  out.reserve(static_cast<size_t>(k_max - k_lo + 1));
  double total = static_cast<double>(hist.total_nodes);
  int64_t at_least = hist.total_nodes;
  for (int64_t k = k_lo; k <= k_max; ++k) {
    out.emplace_back(k, static_cast<double>(at_least) / total);
    at_least -= hist.count(k);
  }
  return out;
}

double eval_lcurve(const LogNormalFormCurve& curve, double k) {
  if (!(k >= 1.0)) throw ConfigError("eval_lcurve: k must be >= 1");
  double lk = std::log(k);
  return curve.b0 * std::exp(-curve.b1 * lk - curve.b2 * lk * lk);
}

ModelSampler::ModelSampler(const DistributionModel& model) : x0_(model.k_min) {
  constexpr size_t cap = 4000000;
  long double cum = 0.0L;
  int64_t x = x0_;
  for (;;) {
    cum += static_cast<long double>(model.mass(x));
    cum_.push_back(static_cast<double>(std::min(cum, 1.0L)));
    if (cum >= 1.0L - 1e-12L || cum_.size() >= cap) break;
    ++x;
  }
}

int64_t ModelSampler::draw(SplitMix64& rng) const {
  double u = rng.next_double();
  size_t idx = static_cast<size_t>(
      std::upper_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
  if (idx >= cum_.size()) idx = cum_.size() - 1;
  return x0_ + static_cast<int64_t>(idx);
}

}  // namespace grownet
