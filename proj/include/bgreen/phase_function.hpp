#pragma once
#include <vector>

#include "bgreen/geometry.hpp"

namespace bgreen {

/// Scattering law: single-scattering albedo c and Legendre coefficients
/// beta_0..beta_L of the phase function expansion
///   p(W,W') = (1/4pi) sum_l beta_l P_l(W.W').
/// Invariants checked at construction: beta_0 = 1, |beta_l| < 2l+1, 0 < c < 1.
class PhaseFunction {
public:
  PhaseFunction(double c, std::vector<double> beta);

  double c() const { return c_; }
  int L() const { return static_cast<int>(beta_.size()) - 1; }
  double beta(int l) const { return l <= L() ? beta_[l] : 0.0; }
  const std::vector<double>& beta() const { return beta_; }

  /// omega_l^m = beta_l (l-m)!/(l+m)!   (m may be negative)
  double omega(int l, int m) const;

  /// h_l = 2l+1 - Theta(L-l) c beta_l
  double h(int l) const { return 2 * l + 1 - (l <= L() ? c_ * beta_[l] : 0.0); }

  /// p(W, W'), evaluated through the Legendre sum in W.W'.
  double eval(const Direction& omega, const Direction& omega_prime) const;

  /// Minimum of (1/2) sum_l beta_l P_l(mu) over a dense mu scan; negative
  /// values mean the expansion is not a valid density.
  double min_density() const;

private:
  double c_;
  std::vector<double> beta_;
};

/// (l-m)!/(l+m)! for any |m| <= l, as an exact product.
double factorial_ratio(int l, int m);

} // namespace bgreen
