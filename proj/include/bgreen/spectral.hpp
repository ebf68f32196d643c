#pragma once
#include <vector>

#include "bgreen/fourier_kernel.hpp"
#include "bgreen/geometry.hpp"
#include "bgreen/phase_function.hpp"
#include "bgreen/special_functions.hpp"

namespace bgreen {

/// khat-independent per-z tables: continued P, Q and Chandrasekhar g, rho for
/// every azimuthal order, plus the dispersion function Lambda^m.  Shareable
/// across all khat at the same k.
class SpectralZTables {
public:
  SpectralZTables(double k, const PhaseFunction& phase, int lmax);

  double k() const { return k_; }
  Complex z() const { return Complex(0.0, 1.0 / k_); }
  int L() const { return phase_.L(); }
  int lmax() const { return lmax_; }
  const PhaseFunction& phase() const { return phase_; }

  Complex q(int l, int m) const;    // continued Q_l^m(z), signed m, l <= lmax+1
  Complex p_mm(int m) const;        // continued P_{|m|}^m(z), signed m
  Complex g(int l, int m) const;    // Chandrasekhar first kind, signed m
  Complex rho(int l, int m) const;  // second kind, signed m
  Complex lambda(int m) const;      // dispersion Lambda^{|m|}(z); 1 for |m| > L

private:
  double k_;
  PhaseFunction phase_;
  int lmax_;
  std::vector<std::vector<Complex>> q_, g_, rho_; // per |m| (q) / signed m (g, rho)
  std::vector<Complex> pmm_;                      // per |m| = 0..L
  std::vector<Complex> lambda_;                   // per |m| = 0..L
};

/// Dispersion function Lambda^m(z), m >= 0: returned in the Wronskian form
///   (L+1-m)!/(L+m)! * P_m^m/g_m^m * [g_{L+1}Q_L - g_L Q_{L+1}],
/// cross-checked against the sum form 1 - cz sum_l w_l^m Q_l^m P_m^m g_l/g_m
/// (the two must agree to 1e-10 relative).  Lambda = 1 for m > L.
Complex dispersion_lambda(int m, Complex z, const PhaseFunction& phase);

/// Source moment S_l^m = Theta(L-l) c beta_l (z/(z-khat.W0)) *
///   e^{im phi0} [R_khat P_l^m(mu0) e^{-im phi0}];  zero for l > L.
Complex source_moment(int l, int m, const FourierPoint& kpoint, const Direction& omega0,
                      const PhaseFunction& phase);

/// Closed inhomogeneous part of the three-term ladder:
///   chi_l^m = g_|m|^m { sum_{j=|m|+1}^{l} (2|m|)! (j-m)!/(j+m)! [rho_j g_l - g_j rho_l] S_j
///             - z/(|m|+1-m) (rho_l / rho_{|m|+1}) S_|m| }.
Complex chi(int l, int m, const FourierPoint& kpoint, const Direction& omega0,
            const PhaseFunction& phase);

/// Seed moment psibar_{|m|}^m, |m| <= L (zero otherwise):
///   (cz/Lambda^m) sum_{l=|m|}^L w_l^m Q_l^m P_{|m|}^m
///       [ (z/(z-khat.W0)) P_l^m(khat.W0) e^{im phi0} e^{-im phi0'} + chi_l^m/g_{|m|}^m ].
Complex psi_bar_seed(int m, const FourierPoint& kpoint, const Direction& omega0,
                     const PhaseFunction& phase);

/// Ladder psibar_l^m for l = |m|..lmax.  Entries l <= L follow
/// psibar_l = (g_l psibar_{|m|} + chi_l)/g_{|m|}; for l > L the exact
/// continuation psibar_l = psibar_L * Q_l^m/Q_L^m is used (the source vanishes
/// there, and the decaying solution of the free recurrence is Q), which avoids
/// the growing-mode cancellation of the literal form.
std::vector<Complex> psi_bar_ladder(int lmax, int m, const FourierPoint& kpoint,
                                    const Direction& omega0, const PhaseFunction& phase);

/// kappa_lm(k) = sum_{m'=-min(l,L)}^{min(l,L)} sqrt((2l+1)(l-m')!/(4pi (l+m')!))
///               e^{-i m' phi0} d^l_{m m'}(theta_k) psibar_l^{m'}.
Complex kappa_lm(int l, int m, const FourierPoint& kpoint, const Direction& omega0,
                 const PhaseFunction& phase);

/// All spectral quantities at one (k, khat): sources, chi, seeds, the psibar
/// ladder and the kappa table, built once and queried by the inversion.
class ModeTable {
public:
  /// wigner, when given, holds d^l(theta_k) for l = 0..lmax (they depend on
  /// theta_k only, so callers sweeping k at fixed mu_k grids share them).
  static ModeTable build(const SpectralZTables& tables, const Direction& khat,
                         const Direction& omega0, int lmax,
                         const std::vector<WignerD>* wigner = nullptr);
  static ModeTable build(const FourierPoint& kpoint, const Direction& omega0,
                         const PhaseFunction& phase, int lmax);

  int L() const { return L_; }
  int lmax() const { return lmax_; }

  Complex source(int l, int m) const;
  Complex chi_at(int l, int m) const;     // stored for l <= L+1
  Complex seed(int m) const { return std::abs(m) > L_ ? Complex(0) : seed_[m + L_]; }
  Complex lambda(int m) const { return lambda_[std::min(std::abs(m), L_ + 1)]; }
  Complex psi_bar(int l, int m) const;
  Complex kappa(int l, int m) const { return kappa_[idx(l, m)]; }

  /// max_m |psibar_lmax^m| / |psibar_max(L,|m|)^m| — a-posteriori truncation indicator.
  double tail_ratio() const;

  /// Reconstruction sum_{l,m} Y_lm(W) e^{-i m phi_k} kappa_lm — the
  /// Fourier-space smooth flux psibar(k, W).
  Complex psi_bar_field(const Direction& omega) const;

private:
  int L_ = 0, lmax_ = 0;
  double k_ = 0;
  Direction khat_, omega0_;
  std::vector<std::vector<Complex>> source_, chi_, psibar_; // per m+L
  std::vector<Complex> seed_;
  std::vector<Complex> lambda_; // per |m| 0..L, then 1.0 sentinel
  std::vector<Complex> kappa_;  // l(l+1)+m, l = 0..lmax

  std::size_t idx(int l, int m) const { return static_cast<std::size_t>(l) * (l + 1) + m; }
};

} // namespace bgreen
