#include "tube/linalg.hpp"

#include <vector>

#include "tube/errors.hpp"

namespace tube {

Mat gram_schmidt(const Mat& columns, const Mat& g, int* rank) {
  const int n = static_cast<int>(columns.cols());
  Mat out = columns;
  int r = 0;
  for (int i = 0; i < n; ++i) {
    Vec v = out.col(i);
    for (int j = 0; j < r; ++j) {
      const double c = out.col(j).dot(g * v);
      v -= c * out.col(j);
    }
    const double nrm2 = v.dot(g * v);
    if (nrm2 > 1e-24) {
      out.col(r) = v / std::sqrt(nrm2);
      ++r;
    }
  }
  if (rank) *rank = r;
  out.conservativeResize(Eigen::NoChange, r);
  return out;
}

void cumulative_integral(double h, const std::vector<Vec>& f, std::vector<Vec>& out) {
  const int n = static_cast<int>(f.size());
  out.resize(n);
  if (n == 0) return;
  out[0] = Vec::Zero(f[0].size());
  if (n == 1) return;
  if (n < 4) {
    for (int k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
    return;
  }
  // Integrate the cubic through the four samples nearest each interval.
  // Weights come from integrating the Lagrange basis over the interval
  // [t_j, t_{j+1}] inside the stencil {t_{j-1},...,t_{j+2}} (interior) and
  // over the leading interval of a one-sided stencil at the ends.
  auto add_interval = [&](int k, int i0, double w0, double w1, double w2, double w3) {
    out[k + 1] = out[k] + h * (w0 * f[i0] + w1 * f[i0 + 1] + w2 * f[i0 + 2] + w3 * f[i0 + 3]);
  };
  add_interval(0, 0, 9.0 / 24, 19.0 / 24, -5.0 / 24, 1.0 / 24);
  for (int k = 1; k + 2 < n; ++k)
    add_interval(k, k - 1, -1.0 / 24, 13.0 / 24, 13.0 / 24, -1.0 / 24);
  add_interval(n - 2, n - 4, 1.0 / 24, -5.0 / 24, 19.0 / 24, 9.0 / 24);
}

}  // namespace tube
