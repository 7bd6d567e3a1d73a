#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace grownet {

// Golden-section minimization on [lo, hi] for a unimodal objective.
template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol = 1e-10,
                          int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::fabs(a) + std::fabs(b)); ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// Nelder-Mead simplex minimization for small dimension. The objective may
// return +inf outside its feasible box.
template <class F>
std::vector<double> nelder_mead(F&& f, std::vector<double> x0,
                                const std::vector<double>& step,
                                double tol = 1e-12, int max_iter = 2000) {
  const size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  for (size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    for (size_t i = 0; i <= n; ++i)
      for (size_t j = i + 1; j <= n; ++j)
        if (vals[j] < vals[i]) {
          std::swap(vals[i], vals[j]);
          std::swap(pts[i], pts[j]);
        }
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::fabs(vals[n] - vals[0]) <=
        tol * (1.0 + std::fabs(vals[0]) + std::fabs(vals[n])))
      break;

    std::vector<double> centroid(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + coef * (pts[n][j] - centroid[j]);
      return p;
    };

    auto refl = blend(-1.0);
    double frefl = f(refl);
    if (frefl < vals[0]) {
      auto expd = blend(-2.0);
      double fexpd = f(expd);
      if (fexpd < frefl) {
        pts[n] = expd;
        vals[n] = fexpd;
      } else {
        pts[n] = refl;
        vals[n] = frefl;
      }
    } else if (frefl < vals[n - 1]) {
      pts[n] = refl;
      vals[n] = frefl;
    } else {
      auto contr = blend(frefl < vals[n] ? -0.5 : 0.5);
      double fcontr = f(contr);
      if (fcontr < std::min(frefl, vals[n])) {
        pts[n] = contr;
        vals[n] = fcontr;
      } else {
        // shrink toward the best vertex
        for (size_t i = 1; i <= n; ++i) {
          for (size_t j = 0; j < n; ++j)
            pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  order();
  return pts[0];
}

}  // namespace grownet
