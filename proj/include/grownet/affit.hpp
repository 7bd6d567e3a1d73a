#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grownet/netsim.hpp"
#include "grownet/rate.hpp"

namespace grownet {

struct AFFit {
  AttachmentFunction::Form form = AttachmentFunction::Form::log_linear;
  double param = 0.0;  // alpha (log_linear) or beta (nonlinear)
  double c = 1.0;      // multiplicative scale
  double rss = 0.0;    // residual sum of squares in log space
  int64_t n_points = 0;
  double aic = 0.0, bic = 0.0;
  uint64_t data_digest = 0;  // fingerprint of the binned data fitted
  std::string label() const;
};

// Least squares in log space: minimizes sum over bins with a_hat > 0 of
// (ln a_hat - ln(c*A(k; theta)))^2, profiling out ln c. family must be
// log_linear or nonlinear; both carry p = 2 fitted quantities (shape, scale),
// so AIC/BIC orderings are comparable between them. Fewer than 3 usable bins
// is a fit error.
AFFit fit_af(const BinnedRate& rate, AttachmentFunction::Form family);

struct AFComparison {
  std::vector<AFFit> ranked;  // ascending AIC
  std::string winner;
};

// Ranks fits of the same binned data by AIC (ties break toward the earlier
// fit). Fits carrying different data digests are a configuration error.
AFComparison compare_af(const std::vector<AFFit>& fits);

struct SegmentedFit {
  struct Segment {
    double x_lo = 0.0, x_hi = 0.0;  // in ln k
    double slope = 0.0, intercept = 0.0;
  };
  std::vector<Segment> segments;
  double gcv = 0.0;
  double score = 0.0;       // log10 of the raw-k extent of the longest segment
  double score_logk = 0.0;  // widest segment extent in decades of k
};

// Greedy continuous piecewise-linear fit of ln a_hat against ln k (k = 0 bins
// are dropped): hinge knots are inserted at observed bin abscissae while the
// generalized cross-validation criterion improves, with penalty 3 per knot.
// The score is log10 of the raw-k extent spanned by the longest fitted
// segment; score_logk measures extent in decades instead, per segment, and
// takes the widest.
SegmentedFit loglinearity_score(const BinnedRate& rate, int max_segments = 5);

}  // namespace grownet
