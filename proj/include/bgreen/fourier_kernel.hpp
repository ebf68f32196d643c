#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bgreen/geometry.hpp"
#include "bgreen/phase_function.hpp"
#include "bgreen/special_functions.hpp"

namespace bgreen {

/// Wave vector k = k khat with the spectral argument z = i/k.
struct FourierPoint {
  double k;
  Direction khat;

  FourierPoint(double k_, Direction khat_) : k(k_), khat(khat_) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("FourierPoint: k must be finite and > 0");
  }
  Complex z() const { return Complex(0.0, 1.0 / k); }
};

/// L_{jl}^m(z) = (z/2) int_{-1}^1 P_j^m P_l^m/(z-mu) dmu for |m| <= j,l <= L.
/// Production evaluation by the Neumann-type product z P_min^m(z) Q_max^m(z)
/// (row j=|m| is the paper's closed relation); in debug builds the product is
/// cross-validated against the quadrature of the defining integral.
Eigen::MatrixXcd build_L_matrix(int m, Complex z, const PhaseFunction& phase);

/// Quadrature of the defining integral (oracle path; subtracted-singularity
/// scheme once the pole z = i/k comes close to the interval).
Eigen::MatrixXcd build_L_matrix_quadrature(int m, Complex z, const PhaseFunction& phase,
                                           double tol = 1e-12);

/// {P^m(khat,W)}_j = P_j^m(khat.W) e^{i m phi0} e^{-i m phi_rot(W)}, where
/// phi_rot is the azimuth of W in the frame whose z-axis is khat and phi0 is
/// the lab azimuth of the source direction.
Eigen::VectorXcd build_P_vector(int m, const FourierPoint& kpoint, const Direction& omega,
                                double omega0_phi, const PhaseFunction& phase);

/// Per-z factorizations of [I - c L^m W^m] for all m in [-L, L]; L^m depends
/// on z only, so one workspace serves every khat at this k.
class FourierWorkspace {
public:
  FourierWorkspace(double k, const PhaseFunction& phase);

  double k() const { return k_; }
  Complex z() const { return Complex(0.0, 1.0 / k_); }
  const PhaseFunction& phase() const { return phase_; }

  /// M(k, W, W0) = sum_m P^m(khat,W)^dag W^m [I - c L^m W^m]^{-1} P^m(khat,W0)
  Complex M(const Direction& khat, const Direction& omega, const Direction& omega0) const;

  /// Moments psibar_l^m, l = |m|..L, of the uncollided-subtracted flux:
  /// [I - c L^m W^m] psibar = c L^m W^m (z/(z - khat.W0)) P^m(khat, W0).
  Eigen::VectorXcd psi_bar(int m, const Direction& khat, const Direction& omega0) const;

  /// Fourier-space smooth flux psibar(k, W) = (c/4pi) M / ((1+i k.W)(1+i k.W0)).
  Complex psi_bar_field(const Direction& khat, const Direction& omega,
                        const Direction& omega0) const;

private:
  double k_;
  PhaseFunction phase_;
  std::vector<Eigen::MatrixXcd> lmat_;                      // per m+L
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;   // of I - c L W
  std::vector<Eigen::MatrixXcd> wdiag_;
};

/// One-shot conveniences over a temporary workspace.
Complex compute_M(const FourierPoint& kpoint, const Direction& omega,
                  const Direction& omega0, const PhaseFunction& phase);
Eigen::VectorXcd psi_bar_matrix_route(int m, const FourierPoint& kpoint,
                                      const Direction& omega0, const PhaseFunction& phase);

} // namespace bgreen
