#include "grownet/rate.hpp"

#include <algorithm>
#include <cmath>

#include "grownet/affit.hpp"
#include "grownet/errors.hpp"

namespace grownet {

namespace {

// Shared estimator core; only steps in [t_first, t_last] are measured, while
// degrees always accumulate over the whole sequence. Each step's ratio is
// normalized by that step's N_{t-1}/m_t before weighting: the estimator rests
// on the total attachment propensity growing in proportion to the node count,
// so the pre-step node count is the per-step stand-in for it. Two passes: the
// first collects Z and the occupancy-gated W(k) (a class accrues m_t while it
// is non-empty, tracked as segments over the running measured-edge total), the
// second accumulates the per-step terms against the fixed W(k) so that a
// two-step sequence reduces to the bi-epochal estimate without rounding.
AttachmentRateEstimate newman_core(const GrowthSequence& seq, NewmanVariant variant,
                                   double z_scale, int64_t t_first, int64_t t_last) {
  const int64_t T = seq.num_steps();
  t_first = std::max<int64_t>(t_first, 2);

  std::vector<int64_t> deg;
  deg.reserve(static_cast<size_t>(seq.num_nodes()));
  std::vector<int64_t> n;
  std::vector<double> W, active;
  double D = 0.0, Z = 0.0;
  int64_t M = 0;

  {
    auto grow = [&](int64_t k) {
      if (k >= static_cast<int64_t>(n.size())) {
        n.resize(static_cast<size_t>(k) + 1, 0);
        W.resize(static_cast<size_t>(k) + 1, 0.0);
        active.resize(static_cast<size_t>(k) + 1, 0.0);
      }
    };
    auto class_add = [&](int64_t k) {
      grow(k);
      if (n[static_cast<size_t>(k)]++ == 0) active[static_cast<size_t>(k)] = D;
    };
    auto class_del = [&](int64_t k) {
      if (--n[static_cast<size_t>(k)] == 0) W[static_cast<size_t>(k)] += D - active[static_cast<size_t>(k)];
    };
    auto promote = [&](NodeId v) {
      class_del(deg[static_cast<size_t>(v)]);
      class_add(++deg[static_cast<size_t>(v)]);
    };
    auto apply_step = [&](const StepView& v) {
      for (NodeId dst : v.cross_dst) promote(dst);
      for (int64_t i = 0; i < v.node_count; ++i) {
        deg.push_back(0);
        class_add(0);
      }
      for (NodeId dst : v.intra_dst) promote(dst);
    };

    apply_step(seq.step(1));
    for (int64_t t = 2; t <= T; ++t) {
      StepView v = seq.step(t);
      auto m_t = static_cast<int64_t>(v.cross_src.size());
      if (t >= t_first && t <= t_last && m_t > 0) {
        Z += static_cast<double>(deg.size()) / static_cast<double>(m_t);
        M += m_t;
        D += static_cast<double>(m_t);
      }
      apply_step(v);
    }
    for (size_t k = 0; k < n.size(); ++k)
      if (n[k] > 0) W[k] += D - active[k];
  }

  AttachmentRateEstimate est;
  est.estimator = variant == NewmanVariant::corrected ? "newman_corrected" : "newman_uncorrected";
  est.z = Z * z_scale;
  if (M == 0) {
    est.z = 0.0;
    est.note = "no cross edges in the measured steps; empty estimate";
    return est;
  }

  deg.clear();
  n.assign(n.size(), 0);
  std::vector<double> acc(n.size(), 0.0);
  std::vector<int64_t> support(n.size(), 0), scratch(n.size(), 0), touched;

  {
    auto class_add = [&](int64_t k) { ++n[static_cast<size_t>(k)]; };
    auto class_del = [&](int64_t k) { --n[static_cast<size_t>(k)]; };
    auto promote = [&](NodeId v) {
      class_del(deg[static_cast<size_t>(v)]);
      class_add(++deg[static_cast<size_t>(v)]);
    };
    auto apply_step = [&](const StepView& v) {
      for (NodeId dst : v.cross_dst) promote(dst);
      for (int64_t i = 0; i < v.node_count; ++i) {
        deg.push_back(0);
        class_add(0);
      }
      for (NodeId dst : v.intra_dst) promote(dst);
    };

    apply_step(seq.step(1));
    for (int64_t t = 2; t <= T; ++t) {
      StepView v = seq.step(t);
      auto m_t = static_cast<int64_t>(v.cross_src.size());
      if (t >= t_first && t <= t_last && m_t > 0) {
        double z_t = static_cast<double>(deg.size()) / static_cast<double>(m_t);
        for (NodeId dst : v.cross_dst) {
          int64_t kd = deg[static_cast<size_t>(dst)];
          if (scratch[static_cast<size_t>(kd)]++ == 0) touched.push_back(kd);
        }
        for (int64_t kd : touched) {
          auto ki = static_cast<size_t>(kd);
          int64_t c = scratch[ki];
          scratch[ki] = 0;
          double ratio = static_cast<double>(c) / static_cast<double>(n[ki]);
          double weight = variant == NewmanVariant::corrected
                              ? static_cast<double>(m_t) / W[ki]
                              : static_cast<double>(m_t) / static_cast<double>(M);
          acc[ki] += weight * (z_t * ratio);
          support[ki] += c;
        }
        touched.clear();
      }
      apply_step(v);
    }
  }

  for (size_t k = 0; k < acc.size(); ++k)
    if (support[k] > 0)
      est.points.push_back({static_cast<int64_t>(k), z_scale * acc[k], support[k]});
  return est;
}

}  // namespace

AttachmentRateEstimate jeong_rate(const GrowthSequence& seq) {
  if (seq.num_steps() != 2) throw ConfigError("bi-epochal estimator requires a two-step sequence");
  StepView s1 = seq.step(1), s2 = seq.step(2);

  std::vector<int64_t> deg(static_cast<size_t>(s1.node_count), 0);
  for (NodeId dst : s1.intra_dst) ++deg[static_cast<size_t>(dst)];
  std::vector<int64_t> n1k, m2k;
  auto grow = [](std::vector<int64_t>& v, int64_t k) {
    if (k >= static_cast<int64_t>(v.size())) v.resize(static_cast<size_t>(k) + 1, 0);
  };
  for (int64_t d : deg) {
    grow(n1k, d);
    ++n1k[static_cast<size_t>(d)];
  }

  AttachmentRateEstimate est;
  est.estimator = "jeong";
  auto m2 = static_cast<int64_t>(s2.cross_src.size());
  if (m2 == 0) {
    est.note = "no cross edges in the second step; empty estimate";
    return est;
  }
  for (NodeId dst : s2.cross_dst) {
    int64_t kd = deg[static_cast<size_t>(dst)];
    grow(m2k, kd);
    ++m2k[static_cast<size_t>(kd)];
  }
  double z = static_cast<double>(s1.node_count) / static_cast<double>(m2);
  est.z = z;
  for (size_t k = 0; k < m2k.size(); ++k) {
    if (m2k[k] == 0) continue;
    double ratio = static_cast<double>(m2k[k]) / static_cast<double>(n1k[k]);
    est.points.push_back({static_cast<int64_t>(k), z * ratio, m2k[k]});
  }
  return est;
}

AttachmentRateEstimate newman_rate(const GrowthSequence& seq, NewmanVariant variant,
                                   double z_scale) {
  if (seq.num_steps() < 2) throw ConfigError("estimator requires at least two steps");
  if (!(z_scale > 0.0)) throw ConfigError("z scale must be positive");
  return newman_core(seq, variant, z_scale, 2, seq.num_steps());
}

BinnedRate bin_rate(const AttachmentRateEstimate& est, double half_width) {
  if (!(half_width >= 0.0)) throw ConfigError("bin half-width must be non-negative");
  BinnedRate out;
  out.half_width = half_width;
  const auto& pts = est.points;
  const size_t n = pts.size();
  if (n == 0) return out;

  std::vector<double> pwa(n + 1, 0.0), pw(n + 1, 0.0);
  std::vector<int64_t> ps(n + 1, 0);
  for (size_t i = 0; i < n; ++i) {
    auto s = static_cast<double>(pts[i].support);
    pwa[i + 1] = pwa[i] + pts[i].a_hat * s;
    pw[i + 1] = pw[i] + s;
    ps[i + 1] = ps[i] + pts[i].support;
  }

  size_t lo = 0, hi = 0;
  for (size_t i = 0; i < n; ++i) {
    auto k = static_cast<double>(pts[i].k);
    double k_lo = k * (1.0 - half_width), k_hi = k * (1.0 + half_width);
    while (lo < n && static_cast<double>(pts[lo].k) < k_lo) ++lo;
    if (hi < lo) hi = lo;
    while (hi < n && static_cast<double>(pts[hi].k) <= k_hi) ++hi;
    out.bins.push_back({pts[i].k, (pwa[hi] - pwa[lo]) / (pw[hi] - pw[lo]), ps[hi] - ps[lo]});
  }
  return out;
}

namespace {

void measure_window(const GrowthSequence& seq, int64_t first, int64_t last,
                    const std::string& label, WindowedAlphaResult& result) {
  AttachmentRateEstimate est =
      newman_core(seq, NewmanVariant::corrected, 1.0, first, last);
  if (est.points.empty()) {
    result.warnings.push_back("window " + label + ": no measurable edges; omitted");
    return;
  }
  BinnedRate bins = bin_rate(est, 0.025);
  AFFit fit;
  try {
    fit = fit_af(bins, AttachmentFunction::Form::log_linear);
  } catch (const FitError& e) {
    result.warnings.push_back("window " + label + ": " + e.what() + "; omitted");
    return;
  }
  result.values.push_back({label, first, last, fit.param, fit.c, fit.n_points});
}

}  // namespace

WindowedAlphaResult windowed_alpha_steps(const GrowthSequence& seq,
                                         const std::vector<StepRange>& windows) {
  const int64_t T = seq.num_steps();
  int64_t prev_last = 0;
  for (const auto& w : windows) {
    if (w.first < 1 || w.last > T || w.last < w.first)
      throw ConfigError("step window out of range");
    if (w.first <= prev_last)
      throw ConfigError("step windows must be chronological and non-overlapping");
    prev_last = w.last;
  }
  WindowedAlphaResult result;
  for (const auto& w : windows)
    measure_window(seq, w.first, w.last,
                   "steps " + std::to_string(w.first) + ".." + std::to_string(w.last), result);
  return result;
}

WindowedAlphaResult windowed_alpha(const GrowthSequence& seq,
                                   const std::vector<DateInterval>& windows) {
  if (!seq.has_step_dates())
    throw ConfigError("sequence carries no step dates; use step windows instead");
  const auto& dates = seq.step_dates();
  for (size_t i = 1; i < dates.size(); ++i)
    if (dates[i] < dates[i - 1]) throw ConfigError("step dates are not chronological");
  for (size_t i = 0; i < windows.size(); ++i) {
    if (!windows[i].valid()) throw ConfigError("window start must not exceed end");
    if (i > 0 && !(windows[i - 1].end < windows[i].start))
      throw ConfigError("date windows must be chronological and non-overlapping");
  }

  WindowedAlphaResult result;
  for (const auto& w : windows) {
    auto lo = std::lower_bound(dates.begin(), dates.end(), w.start);
    auto hi = std::upper_bound(dates.begin(), dates.end(), w.end);
    auto first = static_cast<int64_t>(lo - dates.begin()) + 1;
    auto last = static_cast<int64_t>(hi - dates.begin());
    std::string label = w.start.to_string() + ":" + w.end.to_string();
    if (last < first || last < 2) {
      result.warnings.push_back("window " + label + ": no measurable steps; omitted");
      continue;
    }
    measure_window(seq, first, last, label, result);
  }
  return result;
}

}  // namespace grownet
