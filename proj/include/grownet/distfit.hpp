#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "grownet/growth.hpp"
#include "grownet/rng.hpp"

namespace grownet {

enum class Family { log_normal, power_law, exponential };
std::string family_label(Family family);

// Discretized model over the shifted variable x = k+1: the mass at integer
// x >= k_min is the continuous density evaluated at x, renormalized by the
// exact sum over the support (constant density factors cancel). k_min is
// reported on the x scale, so k_min = 1 covers the full domain including
// zero-degree nodes.
struct DistributionModel {
  Family family = Family::log_normal;
  double p1 = 0.0;  // mu | gamma | lambda
  double p2 = 0.0;  // sigma | unused | unused
  int64_t k_min = 1;
  double log_norm = 0.0;  // ln of the normalizing sum

  double log_mass(int64_t x) const;  // ln P(X = x), x on the k+1 scale
  double mass(int64_t x) const;
  double cdf(int64_t x) const;  // P(X <= x); 0 below k_min
};

DistributionModel make_model(Family family, double p1, double p2, int64_t k_min);

// Tail-restricted dataset on the x = k+1 scale with sufficient statistics.
struct TailData {
  std::vector<std::pair<int64_t, int64_t>> values;  // (x, count), x ascending
  int64_t n = 0;
  double sum_x = 0.0, sum_lnx = 0.0, sum_lnx2 = 0.0;
};

TailData tail_of(const DegreeHistogram& hist, int64_t k_min);

// Log-likelihood of the tail under the discretized family at the given
// parameters (exact up to the family's constant density factor, which cancels
// against the normalization).
double tail_log_likelihood(const TailData& tail, Family family, double p1, double p2,
                           int64_t k_min);

// Exact supremum distance between the empirical CDF of the tail and the model
// CDF over all integers of the support.
double ks_statistic(const TailData& tail, const DistributionModel& model);

struct TailFit {
  DistributionModel model;
  int64_t k_min = 1;
  double ks_stat = 0.0;
  double p_value = -1.0;  // negative until gof_test fills it in
  double log_likelihood = 0.0;
  int64_t n_tail = 0;
  uint64_t gof_seed = 0;
  int64_t gof_replicates = 0;
  std::string note;
  std::vector<std::pair<int64_t, double>> kmin_scan;  // (k_min, ks) when scanned
};

// Maximum-likelihood fit of one family to the tail x >= k_min. Requires at
// least min_tail tail points and two distinct values.
TailFit fit_mle(const DegreeHistogram& hist, Family family, int64_t k_min,
                int64_t min_tail = 10);

enum class KminCriterion {
  min_ks,   // smallest KS distance over candidate cutoffs
  min_p010  // smallest k_min whose bootstrap p-value reaches 0.10
};

// Scans every distinct observed value as a cutoff candidate (subject to the
// min_tail floor), refits, and selects per the criterion. min_p010 runs the
// goodness-of-fit bootstrap per candidate (cheap screening pass first) and
// needs seed/n_bootstrap; min_ks ignores them.
TailFit select_kmin(const DegreeHistogram& hist, Family family,
                    KminCriterion criterion = KminCriterion::min_ks, uint64_t seed = 0,
                    int64_t n_bootstrap = 1000, int threads = 1, int64_t min_tail = 10);

// Semiparametric bootstrap p-value: synthetic datasets draw tail values from
// the fitted model and body values from the empirical body, are refitted at
// the same k_min, and the p-value is the fraction with a larger KS distance.
// Deterministic given seed, independent of threads.
TailFit gof_test(const DegreeHistogram& hist, const TailFit& fit, int64_t n_bootstrap,
                 uint64_t seed, int threads = 1);

struct FamilyRanking {
  std::vector<TailFit> ranked;  // descending log-likelihood
  struct Pairwise {
    Family first, second;
    double log_ratio = 0.0;  // ll(first) - ll(second)
    double vuong_z = 0.0;    // normalized likelihood-ratio statistic
  };
  std::vector<Pairwise> pairwise;
  std::string winner;  // family label, or "tie"
  bool tie = false;
};

// Ranks fits sharing one k_min by log-likelihood; mismatched supports error.
FamilyRanking compare_families(const DegreeHistogram& hist, const std::vector<TailFit>& fits);

// Empirical complementary cumulative distribution: (k, C(k)) for every
// integer k between the smallest and largest observed degree, on the raw
// degree scale; C at the smallest observed degree is 1.
std::vector<std::pair<int64_t, double>> cumulative(const DegreeHistogram& hist);

struct LogNormalFormCurve {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
};

// Reference overlay L(k) = b0*exp(-b1*ln k - b2*ln^2 k), defined for k >= 1.
double eval_lcurve(const LogNormalFormCurve& curve, double k);

// Inverse-CDF sampler on a cumulative table extended to quantile 1 - 1e-12
// (capped; draws beyond the table clamp to its last value).
class ModelSampler {
 public:
  explicit ModelSampler(const DistributionModel& model);
  int64_t draw(SplitMix64& rng) const;  // x on the k+1 scale
  int64_t max_value() const { return x0_ + static_cast<int64_t>(cum_.size()) - 1; }

 private:
  int64_t x0_ = 1;
  std::vector<double> cum_;
};

}  // namespace grownet
