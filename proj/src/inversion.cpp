#include "bgreen/inversion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>

#include "bgreen/errors.hpp"
#include "bgreen/fourier_kernel.hpp"
#include "bgreen/parallel.hpp"

namespace bgreen {

void QuadratureSpec::validate() const {
  if (!(k_max > 0) || !(k_min > 0) || !(k_min < k_max))
    throw DomainError("QuadratureSpec: need 0 < k_min < k_max");
  if (n_k < 2 || n_mu < 2 || n_phi < 2) throw DomainError("QuadratureSpec: node counts >= 2");
  if (lmax < 1) throw DomainError("QuadratureSpec: lmax >= 1");
}

QuadratureSpec QuadratureSpec::fast() {
  QuadratureSpec q;
  q.k_max = 80;
  q.n_k = 640;
  q.n_mu = 48;
  q.n_phi = 64;
  q.lmax = 20;
  return q;
}

QuadratureSpec QuadratureSpec::accurate() { return QuadratureSpec{}; }

QuadratureSpec QuadratureSpec::from_env() {
  const char* p = std::getenv("BG_QUAD_PROFILE");
  if (p != nullptr && std::strcmp(p, "fast") == 0) return fast();
  if (p != nullptr && std::strcmp(p, "accurate") != 0 && std::strlen(p) > 0)
    throw DomainError("BG_QUAD_PROFILE must be 'fast' or 'accurate'");
  return accurate();
}

SingularTerm uncollided_term(double r, const Direction&, const Direction&) {
  if (!(r > 0)) throw DomainError("uncollided_term: r must be > 0 (source point is singular)");
  SingularTerm t;
  t.kind = SingularTerm::Kind::uncollided;
  t.weight = std::exp(-r) / (r * r);
  t.support = "omega == rhat == omega0";
  return t;
}

SingularTerm once_collided_term(double r, const Direction& omega, const Direction& omega0,
                                const PhaseFunction& phase) {
  if (!(r > 0)) throw DomainError("once_collided_term: r must be > 0");
  SingularTerm t;
  t.kind = SingularTerm::Kind::once_collided;
  // tau, tau0 relative to rhat; the caller fixes rhat = zhat of this local frame
  t.tau = omega.theta;
  t.tau0 = omega0.theta;
  const double st = std::sin(t.tau), st0 = std::sin(t.tau0);
  if (t.tau + t.tau0 > M_PI) {
    t.weight = 0.0;
    t.support = "empty (tau + tau0 > pi)";
    return t;
  }
  if (st * st0 == 0.0 || t.tau + t.tau0 == M_PI)
    throw DomainError("once_collided_term: coplanar-degenerate geometry (sin tau sin tau0 = 0 "
                      "or tau + tau0 = pi)");
  t.weight = phase.c() * phase.eval(omega, omega0) *
             std::exp(-r * (st + st0) / std::sin(t.tau + t.tau0)) / (r * st * st0);
  t.support = "|phi - phi0| = pi about rhat, tau + tau0 <= pi";
  return t;
}

namespace {

// Richardson tail on accumulated panel sums; mirrors integrate_oscillatory.
TailedIntegral tail_extrapolate(const std::vector<double>& edges,
                                const std::vector<double>& panel, TailModel tail) {
  const int n_panels = static_cast<int>(panel.size());
  TailedIntegral out;
  std::vector<double> partial(n_panels);
  double run = 0;
  for (int p = 0; p < n_panels; ++p) {
    run += panel[p];
    partial[p] = run;
  }
  out.value = run;
  if (tail == TailModel::none || n_panels < 6) {
    out.error = n_panels >= 2 ? std::abs(panel[n_panels - 1]) : 0.0;
    return out;
  }
  const double head = std::abs(panel[std::max(0, n_panels / 2)]);
  const double last = std::abs(panel[n_panels - 1]);
  if (last > 10 * head + 1e-12 * std::abs(run))
    throw TailDivergenceError("k-integral panel sums grow toward k_max");
  auto fit = [&](int q) {
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (int j = n_panels - q; j < n_panels; ++j) {
      const double X = 1.0 / edges[j + 1], Y = partial[j];
      s1 += 1;
      sx += X;
      sxx += X * X;
      sy += Y;
      sxy += X * Y;
    }
    const double det = s1 * sxx - sx * sx;
    return (sxx * sy - sx * sxy) / det;
  };
  const double u6 = fit(std::min(6, n_panels)), u3 = fit(3);
  out.value = u6;
  out.error = std::abs(u6 - u3) + 1e-15 * std::abs(u6);
  return out;
}

Complex v0_spectral(double k, const PhaseFunction& phase) {
  const Complex z(0.0, 1.0 / k);
  const int L = phase.L();
  const auto Q = assoc_legendre_q(L + 1, 0, z);
  const auto G = chandrasekhar_g(L + 1, 0, z, phase);
  const auto R = chandrasekhar_rho(L + 1, 0, z, phase);
  const Complex lam0 = double(L + 1) * (G[L + 1] * Q[L] - G[L] * Q[L + 1]);
  const double c = phase.c();
  Complex acc = 0.0;
  for (int l = 0; l <= L; ++l) {
    Complex chibar = 0.0; // solid-angle average of chi_l^0 / g_0
    for (int j = 1; j <= l; ++j)
      chibar += (R[j] * G[l] - G[j] * R[l]) * (c * phase.beta(j) * 4.0 * M_PI) * z * Q[j];
    if (l >= 1) chibar -= z * (R[l] / R[1]) * (c * 4.0 * M_PI) * z * Q[0];
    acc += phase.beta(l) * Q[l] * (4.0 * M_PI * z * Q[l] + chibar);
  }
  return c * z * acc / lam0;
}

Complex v0_matrix(double k, const PhaseFunction& phase) {
  const Complex z(0.0, 1.0 / k);
  const int L = phase.L(), n = L + 1;
  const Eigen::MatrixXcd Lm = build_L_matrix(0, z, phase);
  const auto Q = assoc_legendre_q(L, 0, z);
  Eigen::VectorXcd q(n);
  for (int l = 0; l <= L; ++l) q(l) = 4 * M_PI * z * Q[l];
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n, n);
  for (int l = 0; l <= L; ++l) W(l, l) = phase.beta(l);
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) - phase.c() * Lm * W;
  const Eigen::VectorXcd v = Eigen::PartialPivLU<Eigen::MatrixXcd>(A).solve(
      phase.c() * (Lm * (W * q)));
  return v(0);
}

} // namespace

Complex density_kernel_v0(double k, const PhaseFunction& phase, Route route) {
  return route == Route::spectral ? v0_spectral(k, phase) : v0_matrix(k, phase);
}

namespace {

// u_scattered = int_0^inf a(k) sin(kr) dk with a(k) ~ A_inf/k at large k:
// the asymptote integrates to A_inf pi/2 exactly, the remainder decays ~1/k^2.
struct SinIntegralResult {
  double value, error;
};

SinIntegralResult sin_integral_with_asymptote(const std::function<double(double)>& a,
                                              double r, const QuadratureSpec& quad,
                                              int threads) {
  // two-point Richardson estimate of A_inf = lim k a(k)
  const double k1 = 1e7, k2 = 2e7;
  const double f1 = k1 * a(k1), f2 = k2 * a(k2);
  const double A_inf = (k2 * f2 - k1 * f1) / (k2 - k1);

  const auto edges = oscillatory_panel_edges(quad.k_min, quad.k_max, r);
  auto f = [&](double k) { return (a(k) - A_inf / k) * std::sin(k * r); };
  const TailedIntegral t = integrate_oscillatory(f, edges, quad.n_k, quad.tail, threads);
  return {A_inf * M_PI / 2 + t.value, t.error};
}

} // namespace

DensityResult energy_density(double r, const PhaseFunction& phase, const QuadratureSpec& quad,
                             int threads) {
  if (!(r > 0)) throw DomainError("energy_density: r must be > 0");
  quad.validate();

  // dual-route kernel consistency (spectral closed form vs dense solve)
  for (double kc : {0.5, 2.0, 20.0}) {
    const Complex a = v0_spectral(kc, phase), b = v0_matrix(kc, phase);
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
      throw NumericalConsistencyError("energy_density: spectral and matrix kernels disagree");
  }

  std::atomic<double> worst_imag{0.0};
  auto a = [&](double k) {
    const Complex v0 = v0_spectral(k, phase);
    const double scale = std::max(std::abs(v0.real()), 1e-280);
    const double rel = std::abs(v0.imag()) / scale;
    double cur = worst_imag.load(std::memory_order_relaxed);
    while (rel > cur && !worst_imag.compare_exchange_weak(cur, rel)) {
    }
    return k * v0.real() / (2 * M_PI * M_PI * r);
  };
  const SinIntegralResult s = sin_integral_with_asymptote(a, r, quad, threads);
  if (worst_imag.load() > 1e-12)
    throw NumericalConsistencyError(
        "energy_density: integrand has imaginary residue > 1e-12 relative (convention error)");

  DensityResult out;
  out.u_uncollided = std::exp(-r) / (r * r);
  out.u_scattered = s.value;
  out.u_total = out.u_uncollided + out.u_scattered;
  out.error = s.error;
  return out;
}

DensityResult isotropic_reference_density(double r, double c, const QuadratureSpec& quad,
                                          int threads) {
  if (!(r > 0)) throw DomainError("isotropic_reference_density: r must be > 0");
  if (!(c > 0 && c < 1)) throw DomainError("isotropic_reference_density: need 0 < c < 1");
  quad.validate();
  auto a = [&](double k) {
    const double t = std::atan(k);
    return 2 * c / M_PI * t * t / (r * (k - c * t));
  };
  const SinIntegralResult s = sin_integral_with_asymptote(a, r, quad, threads);
  DensityResult out;
  out.u_uncollided = std::exp(-r) / (r * r);
  out.u_scattered = s.value;
  out.u_total = out.u_uncollided + out.u_scattered;
  out.error = s.error;
  return out;
}

DensityResult isotropic_reference_density(double r, double c) {
  return isotropic_reference_density(r, c, QuadratureSpec::from_env(), 1);
}

namespace {

int phi_nodes_for(double x_max, int lmax, int n_phi_min) {
  int n = std::max(n_phi_min, static_cast<int>(std::ceil(1.15 * x_max) + lmax + 24));
  if (n % 2 == 1) ++n;
  return n;
}

struct AngularResult {
  double re = 0;
  double im_rel = 0;
};

} // namespace

FluxResult invert_full(const Vec3& r_vec, const Direction& omega, const Direction& omega0,
                       const PhaseFunction& phase, const QuadratureSpec& quad, Route route,
                       int threads) {
  quad.validate();
  const double r = r_vec.norm();
  if (!(r > 0)) throw DomainError("invert_full: |r| must be > 0");
  const int lmax = quad.effective_lmax(phase.L());
  const bool axial_source = std::sin(omega0.theta) < 1e-14;

  const auto& glmu = GaussLegendre::get(quad.n_mu);
  const Vec3 w_unit = omega.unit(), w0_unit = omega0.unit();

  // theta_k-only tables shared across every k panel
  std::vector<std::vector<WignerD>> wig;
  std::vector<Complex> ylm;
  if (route == Route::spectral) {
    wig.reserve(quad.n_mu);
    for (int i = 0; i < quad.n_mu; ++i) {
      std::vector<WignerD> per_l;
      per_l.reserve(lmax + 1);
      const double theta = std::acos(glmu.x[i]);
      for (int l = 0; l <= lmax; ++l) per_l.emplace_back(l, theta);
      wig.push_back(std::move(per_l));
    }
    ylm.resize(static_cast<std::size_t>(lmax + 1) * (lmax + 1));
    for (int l = 0; l <= lmax; ++l)
      for (int m = -l; m <= l; ++m)
        ylm[static_cast<std::size_t>(l) * (l + 1) + m] = spherical_harmonic(l, m, omega);
  }

  std::atomic<double> worst_im{0.0};
  auto inner = [&](double k) -> double {
    // angular integral  int dmu int dphi e^{i k.r} psibar(k, W) * k^2/(2pi)^3
    Complex acc = 0.0;
    std::unique_ptr<SpectralZTables> zt;
    std::unique_ptr<FourierWorkspace> ws;
    if (route == Route::spectral)
      zt = std::make_unique<SpectralZTables>(k, phase, lmax);
    else
      ws = std::make_unique<FourierWorkspace>(k, phase);
    std::vector<Complex> Km(2 * lmax + 1);
    for (int i = 0; i < quad.n_mu; ++i) {
      const double mu_k = glmu.x[i];
      const double theta_k = std::acos(mu_k);
      const int nphi = phi_nodes_for(k * r, lmax, quad.n_phi);
      Complex phi_acc = 0.0;
      if (route == Route::spectral && axial_source) {
        // kappa is phi_k-independent here: field(phi_k) = sum_m K_m e^{-im phi_k}
        const ModeTable mt =
            ModeTable::build(*zt, Direction(theta_k, 0.0), omega0, lmax, &wig[i]);
        for (int m = -lmax; m <= lmax; ++m) {
          Complex s = 0.0;
          for (int l = std::abs(m); l <= lmax; ++l)
            s += ylm[static_cast<std::size_t>(l) * (l + 1) + m] * mt.kappa(l, m);
          Km[m + lmax] = s;
        }
        for (int j = 0; j < nphi; ++j) {
          const double phi_k = 2 * M_PI * j / nphi;
          const Direction khat(theta_k, phi_k);
          const Complex planewave = std::exp(Complex(0.0, k * khat.unit().dot(r_vec)));
          const Complex e1 = std::exp(Complex(0.0, -phi_k));
          Complex em = std::exp(Complex(0.0, lmax * phi_k)); // e^{-i m phi}, m = -lmax
          Complex f = 0.0;
          for (int m = -lmax; m <= lmax; ++m) {
            f += Km[m + lmax] * em;
            em *= e1;
          }
          phi_acc += planewave * f;
        }
      } else {
        for (int j = 0; j < nphi; ++j) {
          const double phi_k = 2 * M_PI * j / nphi;
          const Direction khat(theta_k, phi_k);
          const Complex planewave = std::exp(Complex(0.0, k * khat.unit().dot(r_vec)));
          Complex field;
          if (route == Route::spectral) {
            const ModeTable full = ModeTable::build(*zt, khat, omega0, lmax, &wig[i]);
            Complex f = 0.0;
            for (int l = 0; l <= lmax; ++l)
              for (int m = -l; m <= l; ++m)
                f += ylm[static_cast<std::size_t>(l) * (l + 1) + m] *
                     std::exp(Complex(0.0, -m * phi_k)) * full.kappa(l, m);
            field = f;
          } else {
            const Complex ikw(1.0, k * khat.unit().dot(w_unit));
            const Complex ikw0(1.0, k * khat.unit().dot(w0_unit));
            field = phase.c() / (4 * M_PI) * ws->M(khat, omega, omega0) / (ikw * ikw0);
          }
          phi_acc += planewave * field;
        }
      }
      acc += glmu.w[i] * phi_acc * (2 * M_PI / nphi);
    }
    acc *= k * k / std::pow(2 * M_PI, 3);
    const double rel = std::abs(acc.imag()) / std::max(std::abs(acc.real()), 1e-280);
    double cur = worst_im.load(std::memory_order_relaxed);
    while (rel > cur && !worst_im.compare_exchange_weak(cur, rel)) {
    }
    return acc.real();
  };

  const auto edges = oscillatory_panel_edges(quad.k_min, quad.k_max, r);
  const TailedIntegral t = integrate_oscillatory(inner, edges, quad.n_k, quad.tail, threads);

  FluxResult out;
  out.smooth = t.value;
  out.quadrature_error = t.error + std::abs(t.value) * worst_im.load() * 1e-2;
  const Direction rhat = Direction::from_unit(r_vec);
  out.singular.push_back(uncollided_term(r, omega, omega0));
  {
    // once-collided geometry relative to rhat
    const double tau = std::acos(std::clamp(rhat.unit().dot(w_unit), -1.0, 1.0));
    const double tau0 = std::acos(std::clamp(rhat.unit().dot(w0_unit), -1.0, 1.0));
    if (std::sin(tau) * std::sin(tau0) > 0 && tau + tau0 < M_PI) {
      SingularTerm t1;
      t1.kind = SingularTerm::Kind::once_collided;
      t1.tau = tau;
      t1.tau0 = tau0;
      t1.weight = phase.c() * phase.eval(omega, omega0) *
                  std::exp(-r * (std::sin(tau) + std::sin(tau0)) / std::sin(tau + tau0)) /
                  (r * std::sin(tau) * std::sin(tau0));
      t1.support = "|phi - phi0| = pi about rhat, tau + tau0 <= pi";
      out.singular.push_back(t1);
    }
  }
  return out;
}

FluxResult invert_bessel(const Vec3& r_vec, const Direction& omega, const Direction& omega0,
                         const PhaseFunction& phase, const QuadratureSpec& quad, int threads) {
  quad.validate();
  const double r = r_vec.norm();
  if (!(r > 0)) throw DomainError("invert_bessel: |r| must be > 0");
  if (std::sin(omega0.theta) >= 1e-14)
    throw DomainError("invert_bessel: requires omega0 = +-zhat (phi_k-independent spectrum)");
  const int lmax = quad.effective_lmax(phase.L());
  const Direction rhat = Direction::from_unit(r_vec);
  const double sr = std::sin(rhat.theta), cr = std::cos(rhat.theta);

  const auto& glmu = GaussLegendre::get(quad.n_mu);
  // Y_lm(omega) cache and theta_k-only Wigner tables
  std::vector<Complex> ylm(static_cast<std::size_t>(lmax + 1) * (lmax + 1));
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m)
      ylm[static_cast<std::size_t>(l) * (l + 1) + m] = spherical_harmonic(l, m, omega);
  std::vector<std::vector<WignerD>> wig;
  wig.reserve(quad.n_mu);
  for (int i = 0; i < quad.n_mu; ++i) {
    std::vector<WignerD> per_l;
    per_l.reserve(lmax + 1);
    const double theta = std::acos(glmu.x[i]);
    for (int l = 0; l <= lmax; ++l) per_l.emplace_back(l, theta);
    wig.push_back(std::move(per_l));
  }

  std::atomic<double> worst_im{0.0};
  auto inner = [&](double k) -> double {
    const SpectralZTables ztab(k, phase, lmax);
    Complex acc = 0.0;
    for (int i = 0; i < quad.n_mu; ++i) {
      const double mu_k = glmu.x[i];
      const double smu = std::sqrt(std::max(0.0, 1.0 - mu_k * mu_k));
      const ModeTable mt =
          ModeTable::build(ztab, Direction(std::acos(mu_k), 0.0), omega0, lmax, &wig[i]);
      const Complex axial = std::exp(Complex(0.0, k * r * mu_k * cr));
      Complex node = 0.0;
      for (int m = -lmax; m <= lmax; ++m) {
        const double x = k * r * smu * sr;
        const double jm = bessel_j(std::abs(m), x);
        // i^m J_m is even in m: i^{-m} J_{-m} = i^m J_m
        const Complex im_pow = std::pow(Complex(0.0, 1.0), std::abs(m));
        Complex lsum = 0.0;
        for (int l = std::abs(m); l <= lmax; ++l)
          lsum += ylm[static_cast<std::size_t>(l) * (l + 1) + m] * mt.kappa(l, m);
        node += im_pow * jm * std::exp(Complex(0.0, -m * rhat.phi)) * lsum;
      }
      acc += glmu.w[i] * node * axial;
    }
    acc *= k * k / std::pow(2 * M_PI, 2);
    const double rel = std::abs(acc.imag()) / std::max(std::abs(acc.real()), 1e-280);
    double cur = worst_im.load(std::memory_order_relaxed);
    while (rel > cur && !worst_im.compare_exchange_weak(cur, rel)) {
    }
    return acc.real();
  };

  const auto edges = oscillatory_panel_edges(quad.k_min, quad.k_max, r);
  const TailedIntegral t = integrate_oscillatory(inner, edges, quad.n_k, quad.tail, threads);

  FluxResult out;
  out.smooth = t.value;
  out.quadrature_error = t.error + std::abs(t.value) * worst_im.load() * 1e-2;
  out.singular.push_back(uncollided_term(r, omega, omega0));
  return out;
}

} // namespace bgreen
