#include "nsgfb/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nsgfb {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(int degree, double c) {
  std::vector<double> coeffs(degree + 1, 0.0);
  coeffs[degree] = c;
  return Polynomial(std::move(coeffs));
}

Polynomial Polynomial::binomial_power(double a, double b, int n) {
  Polynomial result = constant(1.0);
  const Polynomial factor({a, b});
  for (int k = 0; k < n; ++k) result = result * factor;
  return result;
}

double Polynomial::max_abs_coefficient() const {
  double best = 0.0;
  for (double c : coeffs_) best = std::max(best, std::abs(c));
  return best;
}

double Polynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  std::vector<double> out(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k] += coeffs_[k];
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) out[k] += other.coeffs_[k];
  return Polynomial(std::move(out));
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (is_zero() || other.is_zero()) return {};
  std::vector<double> out(coeffs_.size() + other.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < other.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * other.coeffs_[j];
  }
  return Polynomial(std::move(out));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> out = coeffs_;
  for (double& c : out) c *= s;
  return Polynomial(std::move(out));
}

std::string Polynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k) os << " + ";
    os << coeffs_[k];
    if (k) os << " t^" << k;
  }
  return os.str();
}

Polynomial spline_lowpass(int n) { return Polynomial::binomial_power(1.0, -0.5, n); }

Polynomial spline_highpass(int n) { return Polynomial::monomial(n, std::pow(0.5, n)); }

double sup_abs_on_grid(const Polynomial& p, double lo, double hi, int samples) {
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = samples == 1 ? lo : lo + (hi - lo) * s / (samples - 1);
    best = std::max(best, std::abs(p(t)));
  }
  return best;
}

}  // namespace nsgfb
