#include "rdlab/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdlab {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  build(false, 0.0, 0.0);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y,
                             double left_slope, double right_slope)
    : x_(std::move(x)), y_(std::move(y)) {
  build(true, left_slope, right_slope);
}

void MonotoneCubic::build(bool use_end_slopes, double ls, double rs) {
  const size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 nodes");
  std::vector<double> d(n - 1);  // secant slopes
  for (size_t i = 0; i + 1 < n; ++i) {
    const double h = x_[i + 1] - x_[i];
    if (!(h > 0)) throw std::invalid_argument("MonotoneCubic: x must increase");
    d[i] = (y_[i + 1] - y_[i]) / h;
  }
  m_.assign(n, 0.0);
  m_[0] = use_end_slopes ? ls : d[0];
  m_[n - 1] = use_end_slopes ? rs : d[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m_[i] = 0.0;  // local extremum of the data
    } else {
      // Harmonic mean weighted by interval widths keeps the slope inside the
      // monotonicity region for nonuniform grids.
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  // Clamp interior and end slopes into the Fritsch-Carlson monotone region.
  for (size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
    if (a < 0.0) m_[i] = 0.0;
    if (b < 0.0) m_[i + 1] = 0.0;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m_[i] = tau * a * d[i];
      m_[i + 1] = tau * b * d[i];
    }
  }
}

size_t MonotoneCubic::locate(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  const size_t i = static_cast<size_t>(
      std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
  return i - 1;
}

double MonotoneCubic::operator()(double x) const {
  const size_t i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  const size_t i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
  const double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
  return g00 * y_[i] + g10 * m_[i] + g01 * y_[i + 1] + g11 * m_[i + 1];
}

}  // namespace rdlab
