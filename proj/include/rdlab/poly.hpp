#pragma once
#include <vector>
#include <cstddef>

namespace rdlab {

// Dense polynomial in one variable with double coefficients, lowest degree first.
class Poly {
 public:
  Poly() : c_{0.0} {}
  explicit Poly(std::vector<double> c);
  static Poly monomial(int k, double a = 1.0);
  static Poly constant(double a) { return Poly(std::vector<double>{a}); }

  double operator()(double u) const;  // Horner evaluation
  Poly derivative() const;
  Poly antiderivative() const;  // integration constant 0
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double coeff(int k) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(double s) const;
  // Substitute q for the variable: result(u) = (*this)(q(u)).
  Poly compose(const Poly& q) const;
  void trim(double eps = 0.0);

 private:
  std::vector<double> c_;
};

}  // namespace rdlab
