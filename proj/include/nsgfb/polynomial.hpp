#pragma once

#include <span>
#include <string>
#include <vector>

namespace nsgfb {

/// Real polynomial with ascending coefficients p_0 + p_1 t + ... + p_L t^L.
/// Trailing exact zeros are trimmed, so the zero polynomial has no coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  static Polynomial constant(double c);
  static Polynomial monomial(int degree, double c = 1.0);
  /// (a + b t)^n
  static Polynomial binomial_power(double a, double b, int n);

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  std::span<const double> view() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// Degree; the zero polynomial reports 0.
  int degree() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  double coefficient(int k) const { return k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : 0.0; }
  double max_abs_coefficient() const;

  double operator()(double t) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;

  std::string to_string() const;

 private:
  void trim();
  std::vector<double> coeffs_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/// Spline low-pass (1 - t/2)^n.
Polynomial spline_lowpass(int n);
/// Spline high-pass (t/2)^n.
Polynomial spline_highpass(int n);

/// max over [lo, hi] of |p(t)| sampled on a uniform grid (endpoints included).
double sup_abs_on_grid(const Polynomial& p, double lo, double hi, int samples);

}  // namespace nsgfb
