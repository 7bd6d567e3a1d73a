#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grownet/date.hpp"
#include "grownet/growth.hpp"

namespace grownet {

struct RatePoint {
  int64_t k = 0;
  double a_hat = 0.0;
  int64_t support = 0;  // contributing edge observations
};

// Points are sorted by k; ks with no observations are omitted (0/0 = 0
// convention), so support > 0 and a_hat > 0 for every retained point.
struct AttachmentRateEstimate {
  std::vector<RatePoint> points;
  std::string estimator;  // jeong | newman_corrected | newman_uncorrected
  double z = 0.0;         // sum of the applied normalizing factors (n_1/m_2 when T=2)
  std::string note;
};

enum class NewmanVariant { corrected, uncorrected };

// Bi-epochal estimate A(k) = (n_1/m_2)*(m_2(k)/n_1(k)). Requires exactly two
// steps; m_2 = 0 yields an empty estimate with a note.
AttachmentRateEstimate jeong_rate(const GrowthSequence& seq);

// Multi-step estimate A(k) = (1/W(k)) * sum_{t>1} w_t(k)*z_t*(m_t(k)/n_{t-1}(k))
// with per-step normalizer z_t = N_{t-1}/m_t (the bi-epochal constant applied
// step by step; N_{t-1} stands in for the total attachment propensity, which
// grows with the node count), weights w_t(k) = m_t when n_{t-1}(k) != 0 and
// zero otherwise, and W(k) the sum of the w_t(k). The uncorrected variant
// divides by sum_t m_t instead of W(k); it reproduces the high-k waterfall
// bias and is kept as a labeled diagnostic. z_scale only rescales the curve;
// shape fits are invariant.
AttachmentRateEstimate newman_rate(const GrowthSequence& seq, NewmanVariant variant,
                                   double z_scale = 1.0);

struct BinnedRate {
  std::vector<RatePoint> bins;  // k, support-weighted mean of a_hat, support
  double half_width = 0.025;
};

// Averages a_hat over the closed window [k*(1-h), k*(1+h)] around every
// observed k, weighting by support.
BinnedRate bin_rate(const AttachmentRateEstimate& est, double half_width = 0.025);

struct StepRange {
  int64_t first = 1, last = 0;  // inclusive; empty when last < first
};

struct WindowAlpha {
  std::string window;  // human-readable window label
  int64_t first_step = 0, last_step = 0;
  double alpha = 0.0;
  double c = 0.0;       // fitted scale
  int64_t n_points = 0; // bins used by the fit
};

struct WindowedAlphaResult {
  std::vector<WindowAlpha> values;
  std::vector<std::string> warnings;  // one per omitted window
};

// Corrected Newman restricted to the steps of each window (degree histograms
// still accumulate over the full history), binned, then fitted by the
// log-linear family. Windows must be chronological and non-overlapping;
// windows with no measurable steps are omitted with a warning.
WindowedAlphaResult windowed_alpha_steps(const GrowthSequence& seq,
                                         const std::vector<StepRange>& windows);
WindowedAlphaResult windowed_alpha(const GrowthSequence& seq,
                                   const std::vector<DateInterval>& windows);

}  // namespace grownet
