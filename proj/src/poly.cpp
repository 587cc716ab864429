#include "rdlab/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdlab {

Poly::Poly(std::vector<double> c) : c_(std::move(c)) {
  if (c_.empty()) c_.push_back(0.0);
}

Poly Poly::monomial(int k, double a) {
  if (k < 0) throw std::invalid_argument("monomial degree must be >= 0");
  std::vector<double> c(static_cast<size_t>(k) + 1, 0.0);
  c.back() = a;
  return Poly(std::move(c));
}

double Poly::operator()(double u) const {
  double r = 0.0;
  for (size_t i = c_.size(); i-- > 0;) r = r * u + c_[i];
  return r;
}

double Poly::coeff(int k) const {
  if (k < 0 || static_cast<size_t>(k) >= c_.size()) return 0.0;
  return c_[static_cast<size_t>(k)];
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<double> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
  return Poly(std::move(d));
}

Poly Poly::antiderivative() const {
  std::vector<double> d(c_.size() + 1, 0.0);
  for (size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / static_cast<double>(k + 1);
  return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] -= o.c_[k];
  return Poly(std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Poly(std::move(r));
}

Poly Poly::operator*(double s) const {
  std::vector<double> r(c_);
  for (double& v : r) v *= s;
  return Poly(std::move(r));
}

Poly Poly::compose(const Poly& q) const {
  Poly r = Poly::constant(0.0);
  for (size_t i = c_.size(); i-- > 0;) r = r * q + Poly::constant(c_[i]);
  return r;
}

void Poly::trim(double eps) {
  while (c_.size() > 1 && std::abs(c_.back()) <= eps) c_.pop_back();
}

}  // namespace rdlab
