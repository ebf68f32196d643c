#pragma once
#include <complex>
#include <vector>

#include "bgreen/geometry.hpp"
#include "bgreen/phase_function.hpp"

namespace bgreen {

using Complex = std::complex<double>;

/// (2m-1)!! with (-1)!! = 1.
double double_factorial_odd(int m);

/// Ferrers (real-argument) associated Legendre P_l^m(mu), entries l = |m|..lmax.
/// Includes the Condon-Shortley (-1)^m; negative m via the symmetry
/// P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.  Requires |mu| <= 1.
std::vector<double> assoc_legendre_p(int lmax, int m, double mu);

/// Analytically continued P_l^m(z) off the cut (-inf, 1], paper convention
/// P_m^m(z) = (2m-1)!! (z-1)^{m/2}(z+1)^{m/2} (no (-1)^m), principal branches.
/// Negative m via P_l^{-m}(z) = (l-m)!/(l+m)! P_l^m(z).
std::vector<Complex> assoc_legendre_p(int lmax, int m, Complex z);

/// Continued Legendre functions of the second kind Q_l^m(z), same cut.
/// Q_m^m from the defining integral (closed evaluation); the recurrence is run
/// in the numerically stable direction (continued fraction + downward when the
/// growth ratio |z + sqrt(z^2-1)| is away from 1, upward otherwise).
/// Negative m via Q_l^{-m}(z) = (l-m)!/(l+m)! Q_l^m(z).
std::vector<Complex> assoc_legendre_q(int lmax, int m, Complex z);

/// Chandrasekhar polynomials of the first kind, entries l = |m|..lmax:
/// g_m^m = (2m-1)!!, g_{m+1}^m = z h_m g_m^m, then the three-term recurrence
/// with h_l = 2l+1 - Theta(L-l) c beta_l.  Negative m runs the signed
/// recurrence from the converted initial terms.
std::vector<Complex> chandrasekhar_g(int lmax, int m, Complex z, const PhaseFunction& phase);

/// Second kind: rho_m^m = 0, rho_{m+1}^m = z/(2m-1)!!, same recurrence.
std::vector<Complex> chandrasekhar_rho(int lmax, int m, Complex z, const PhaseFunction& phase);

enum class NegMKind { chandrasekhar_g, chandrasekhar_rho, legendre_p_real };

/// Value for order -m from the order +m value, m > 0: all three kinds share
/// the factor (-1)^m (l-m)!/(l+m)!.
Complex negative_m_convert(NegMKind kind, int l, int m, Complex value);

/// Wigner d-matrix d^l_{m'm}(theta), rows/cols m', m in [-l, l].  Convention
/// pinned by  R_khat Y_lm = sum_{m'} e^{-i m' phi_k} d^l_{m'm}(theta_k) Y_lm';
/// evaluated through the Jacobi-polynomial factorization.
class WignerD {
public:
  WignerD(int l, double theta);

  int l() const { return l_; }
  double operator()(int mprime, int m) const {
    return d_[static_cast<std::size_t>(mprime + l_) * (2 * l_ + 1) + (m + l_)];
  }

private:
  int l_;
  std::vector<double> d_;
};

/// Bessel function of the first kind, integer order m >= 0, x >= 0.
/// Ascending series for small x, backward (Miller) recurrence with the
/// J_0 + 2 sum J_2k = 1 normalization otherwise.
double bessel_j(int m, double x);

/// Y_lm with the normalization sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m e^{im phi}.
Complex spherical_harmonic(int l, int m, const Direction& omega);

} // namespace bgreen
