#pragma once
#include <optional>
#include <string>
#include <vector>

#include "bgreen/geometry.hpp"
#include "bgreen/phase_function.hpp"
#include "bgreen/quadrature.hpp"
#include "bgreen/spectral.hpp"

namespace bgreen {

/// Quadrature controls for the Fourier inversion.  k nodes are distributed
/// over period-matched Gauss-Legendre panels on [k_min, k_max]; the k > k_max
/// remainder follows the tail model.
struct QuadratureSpec {
  double k_max = 200.0;
  int n_k = 2400;
  int n_mu = 64;
  int n_phi = 64;
  int lmax = 24;
  TailModel tail = TailModel::inverse_square;
  double k_min = 1e-6;

  void validate() const;

  static QuadratureSpec fast();
  static QuadratureSpec accurate();
  /// Reads BG_QUAD_PROFILE ({fast, accurate}); accurate when unset.
  static QuadratureSpec from_env();

  /// lmax for a degree-L phase function: max(2L + 8, lmax floor).
  int effective_lmax(int L) const { return std::max(2 * L + 8, lmax); }
};

struct SingularTerm {
  enum class Kind { uncollided, once_collided };
  Kind kind;
  double weight = 0;      // smooth prefactor of the delta support
  double tau = 0, tau0 = 0;
  std::string support;    // human-readable delta constraints
};

struct FluxResult {
  double smooth = 0;          // psi(r, W)
  double quadrature_error = 0;
  std::vector<SingularTerm> singular;
};

enum class Route { matrix, spectral };

/// G_0 = e^{-r}/r^2 delta(W - rhat) delta(W - W0).
SingularTerm uncollided_term(double r, const Direction& omega, const Direction& omega0);

/// Once-collided term: weight c p(W,W0) Theta(pi - tau - tau0)
/// exp(-r (sin tau + sin tau0)/sin(tau+tau0)) / (r sin tau sin tau0) on the
/// support delta(|phi - phi0| - pi) about rhat.
SingularTerm once_collided_term(double r, const Direction& omega, const Direction& omega0,
                                const PhaseFunction& phase);

/// Smooth flux psi(r, W) by full 3D spherical quadrature of the chosen route's
/// Fourier integrand; singular terms attached structurally.
FluxResult invert_full(const Vec3& r_vec, const Direction& omega, const Direction& omega0,
                       const PhaseFunction& phase, const QuadratureSpec& quad, Route route,
                       int threads = 1);

/// 2D (k, mu_k) quadrature with the analytic azimuthal Bessel reduction.
/// Requires a phi_k-independent spectrum, i.e. omega0 = +-zhat.
FluxResult invert_bessel(const Vec3& r_vec, const Direction& omega, const Direction& omega0,
                         const PhaseFunction& phase, const QuadratureSpec& quad,
                         int threads = 1);

struct DensityResult {
  double u_total = 0, u_uncollided = 0, u_scattered = 0, error = 0;
};

/// Energy density of the isotropic point source,
///   u(r) = e^{-r}/r^2 + (1/(2 pi^2 r)) int_0^inf k sin(kr) v0(k) dk,
/// with v0(k) the solid-angle-averaged Fourier kernel evaluated through the
/// dispersion-normalized spectral form (cross-checked against the matrix
/// route).  The integrand must be real to 1e-12 relative; violations raise
/// NumericalConsistencyError.
DensityResult energy_density(double r, const PhaseFunction& phase, const QuadratureSpec& quad,
                             int threads = 1);

/// Appendix-style isotropic closed form,
///   u(r) = e^{-r}/r^2 + (2c/pi) int_0^inf sin(kr)/r [atan k]^2/(k - c atan k) dk,
/// through the same tail-handled quadrature machinery.
DensityResult isotropic_reference_density(double r, double c, const QuadratureSpec& quad,
                                          int threads = 1);
DensityResult isotropic_reference_density(double r, double c);

/// Solid-angle-averaged Fourier kernel v0(k) (real part; the imaginary residue
/// is returned for reality checks).  route selects the spectral closed form or
/// the dense matrix solve.
Complex density_kernel_v0(double k, const PhaseFunction& phase, Route route);

} // namespace bgreen
