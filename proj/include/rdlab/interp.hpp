#pragma once
#include <vector>

namespace rdlab {

// Monotone shape-preserving cubic interpolant (Fritsch-Carlson slopes).
// Interpolating monotone data yields a monotone interpolant; optional
// analytic end slopes override the one-sided estimates.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  MonotoneCubic(std::vector<double> x, std::vector<double> y,
                double left_slope, double right_slope);

  double operator()(double x) const;
  double derivative(double x) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  void build(bool use_end_slopes, double ls, double rs);
  size_t locate(double x) const;
  std::vector<double> x_, y_, m_;  // nodes, values, node slopes
};

}  // namespace rdlab
