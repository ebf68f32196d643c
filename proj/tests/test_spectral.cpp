#include <doctest.h>

#include <cmath>
#include <random>

#include "bgreen/errors.hpp"
#include "bgreen/fourier_kernel.hpp"
#include "bgreen/quadrature.hpp"
#include "bgreen/spectral.hpp"

using namespace bgreen;

namespace {

// Projection oracle for the source moment: quadrature of the defining
// rotated-frame projection of the phase function against [R Y_lm]^*,
//   S_l^m / s0 = (2l+1) e^{im phi0} / (beta_l N_lm) int [R Y_lm^*(W)] p(W, W0) dW.
Complex source_projection_oracle(int l, int m, const FourierPoint& kp, const Direction& w0,
                                 const PhaseFunction& phase) {
  if (l > phase.L()) return 0.0;
  const RotatedFrame f(kp.khat);
  const Complex s0 = kp.z() / (kp.z() - f.mu_of(w0.unit()));
  const double N = std::sqrt((2 * l + 1) / (4 * M_PI) * factorial_ratio(l, m));
  const auto& gl = GaussLegendre::get(64);
  const int nphi = 128;
  Complex acc = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double th = std::acos(gl.x[i]);
    for (int j = 0; j < nphi; ++j) {
      const Direction w(th, 2 * M_PI * j / nphi);
      const Vec3 wu = w.unit();
      const double mu_r = f.mu_of(wu), phi_r = f.phi_of(wu);
      const Complex RYc =
          N * assoc_legendre_p(l, m, mu_r).back() * std::exp(Complex(0, -m * phi_r));
      acc += gl.w[i] * (2 * M_PI / nphi) * RYc * phase.eval(w, w0);
    }
  }
  return phase.c() * s0 * (double(2 * l + 1) / N) * std::exp(Complex(0, m * w0.phi)) * acc;
}

// psibar(k, W) through the scattering expansion with l <= L moments only
Complex field_from_moments(const FourierPoint& kp, const Direction& w,
                           const Direction& w0, const PhaseFunction& phase) {
  const RotatedFrame f(kp.khat);
  const Vec3 wu = w.unit();
  const double mu_r = f.mu_of(wu), phi_r = f.phi_of(wu);
  const Complex ikw(1.0, kp.k * kp.khat.unit().dot(wu));
  const Complex ikw0(1.0, kp.k * kp.khat.unit().dot(w0.unit()));
  Complex acc = phase.c() * phase.eval(w, w0) / (ikw * ikw0);
  for (int l = 0; l <= phase.L(); ++l) {
    for (int m = -l; m <= l; ++m) {
      const auto lad = psi_bar_ladder(l, m, kp, w0, phase);
      const double Nrot = std::sqrt((2 * l + 1) / (4 * M_PI) * factorial_ratio(l, m));
      const Complex RY = Nrot * assoc_legendre_p(l, m, mu_r).back() *
                         std::exp(Complex(0, m * phi_r));
      acc += phase.c() / 2.0 * phase.omega(l, m) / std::sqrt(M_PI * (2 * l + 1)) *
             std::sqrt(1.0 / factorial_ratio(l, m)) * std::exp(Complex(0, -m * w0.phi)) *
             RY * lad[l - std::abs(m)] / ikw;
    }
  }
  return acc;
}

} // namespace

TEST_CASE("source moments: truncation, axial reduction, Wigner-sum oracle") {
  const PhaseFunction p(0.8, {1.0, 1.3, 0.6});
  const FourierPoint kp(1.3, Direction(1.1, 0.6));
  const Direction w0(0.9, 2.2);
  SUBCASE("l > L vanishes") {
    CHECK(source_moment(3, 0, kp, w0, p) == Complex(0.0));
    CHECK(source_moment(5, -2, kp, w0, p) == Complex(0.0));
  }
  SUBCASE("khat = zhat keeps only m' = m") {
    const FourierPoint kz(0.8, Direction::zhat());
    for (int l = 0; l <= 2; ++l)
      for (int m = -l; m <= l; ++m) {
        const Complex z = kz.z();
        const Complex ref = p.c() * p.beta(l) * z / (z - w0.mu()) *
                            assoc_legendre_p(l, m, w0.mu()).back();
        CHECK(std::abs(source_moment(l, m, kz, w0, p) - ref) < 1e-13);
      }
  }
  SUBCASE("generic orientation matches the projection oracle") {
    for (int l = 0; l <= 2; ++l)
      for (int m = -l; m <= l; ++m)
        CHECK(std::abs(source_moment(l, m, kp, w0, p) -
                       source_projection_oracle(l, m, kp, w0, p)) < 1e-12);
  }
}

TEST_CASE("chi: boundary cases and one recurrence-step cross-check") {
  const PhaseFunction p(0.9, {1.0, 1.0});
  const FourierPoint kp(1.0, Direction::zhat());
  const Direction w0 = Direction::zhat();
  SUBCASE("l = |m| gives zero") {
    CHECK(chi(0, 0, kp, w0, p) == Complex(0.0));
    CHECK(chi(1, 1, kp, w0, p) == Complex(0.0));
  }
  SUBCASE("|m| > L gives zero") {
    CHECK(chi(3, 2, kp, w0, p) == Complex(0.0));
  }
  SUBCASE("l=2, m=0 at L=1 matches the matrix route pushed one step by Eq10a") {
    const auto psi = psi_bar_matrix_route(0, kp, w0, p);
    const Complex z = kp.z();
    const Complex S1 = source_moment(1, 0, kp, w0, p);
    // z h_1 psi_1 - 2 psi_2 - psi_0 = z S_1  =>  psi_2
    const Complex psi2 = (z * p.h(1) * psi(1) - psi(0) - z * S1) / 2.0;
    const auto g = chandrasekhar_g(2, 0, z, p);
    const Complex chi2_ref = psi2 * g[0] - g[2] * psi(0);
    const Complex chi2 = chi(2, 0, kp, w0, p);
    CHECK(std::abs(chi2 - chi2_ref) <= 1e-12 * std::max(1.0, std::abs(chi2_ref)));
  }
}

TEST_CASE("dispersion function: closed isotropic form, truncation, dual forms") {
  SUBCASE("L = 0") {
    const PhaseFunction p(0.9, {1.0});
    for (double k : {0.3, 1.0, 8.0}) {
      const Complex lam = dispersion_lambda(0, Complex(0, 1.0 / k), p);
      CHECK(std::abs(lam - Complex(1 - 0.9 / k * std::atan(k), 0)) < 1e-13);
    }
  }
  SUBCASE("|m| > L returns 1") {
    const PhaseFunction p(0.5, {1.0, 0.5});
    CHECK(dispersion_lambda(2, Complex(0, 1), p) == Complex(1.0));
  }
  SUBCASE("Wronskian and sum forms agree (checked internally), m=1 L=2") {
    const PhaseFunction p(0.7, {1.0, 1.2, 0.4});
    CHECK_NOTHROW(dispersion_lambda(1, Complex(0, 1.0 / 1.5), p));
    // direct dual evaluation
    const Complex z(0, 1.0 / 1.5);
    const auto Q = assoc_legendre_q(3, 1, z);
    const auto G = chandrasekhar_g(3, 1, z, p);
    const Complex pmm = assoc_legendre_p(1, 1, z)[0];
    Complex sum = 0;
    for (int l = 1; l <= 2; ++l) sum += p.omega(l, 1) * Q[l - 1] * pmm * G[l - 1] / G[0];
    const Complex sum_form = 1.0 - p.c() * z * sum;
    const Complex lam = dispersion_lambda(1, z, p);
    CHECK(std::abs(lam - sum_form) <= 1e-12 * std::abs(lam));
  }
}

TEST_CASE("seed: albedo scaling, isotropic closed form, matrix-route equality") {
  SUBCASE("c -> 0+ gives 0") {
    const PhaseFunction p(1e-9, {1.0, 0.5});
    CHECK(std::abs(psi_bar_seed(0, FourierPoint(1.0, Direction(0.7, 0.1)),
                                Direction(0.2, 0.9), p)) < 1e-8);
  }
  SUBCASE("L=0 closed form") {
    const PhaseFunction p(0.85, {1.0});
    const FourierPoint kp(0.9, Direction(1.2, 2.8));
    const Direction w0(0.4, 1.1);
    const Complex z = kp.z();
    const Complex q0(0, -std::atan(kp.k));
    const RotatedFrame f(kp.khat);
    const Complex s0 = z / (z - f.mu_of(w0.unit()));
    const Complex ref = p.c() * z * q0 * s0 / (1.0 - p.c() * z * q0);
    CHECK(std::abs(psi_bar_seed(0, kp, w0, p) - ref) <= 1e-13 * std::abs(ref));
  }
  SUBCASE("|m| > L returns 0") {
    const PhaseFunction p(0.5, {1.0});
    CHECK(psi_bar_seed(1, FourierPoint(1.0, Direction(0.5, 0.5)), Direction(0.2, 0.1), p) ==
          Complex(0.0));
  }
  SUBCASE("L=1 generic equals the matrix route") {
    const PhaseFunction p(0.9, {1.0, 1.0});
    const FourierPoint kp(1.7, Direction(1.0, 0.8));
    const Direction w0(2.1, 5.5);
    for (int m = -1; m <= 1; ++m) {
      const auto mat = psi_bar_matrix_route(m, kp, w0, p);
      const Complex sd = psi_bar_seed(m, kp, w0, p);
      CHECK(std::abs(sd - mat(0)) <= 1e-10 * std::max(1e-30, std::abs(mat(0))));
    }
  }
}

TEST_CASE("ladder: truncation, seed entry, Eq10a residuals, Q continuation") {
  SUBCASE("|m| > L gives all zeros") {
    const PhaseFunction p(0.5, {1.0});
    const auto lad = psi_bar_ladder(6, 2, FourierPoint(1.0, Direction(0.4, 0.2)),
                                    Direction(0.7, 0.3), p);
    for (const auto& v : lad) CHECK(v == Complex(0.0));
  }
  SUBCASE("entry l = |m| reproduces the seed exactly") {
    const PhaseFunction p(0.8, {1.0, 1.2, 0.4});
    const FourierPoint kp(2.0, Direction(0.9, 1.7));
    const Direction w0(1.3, 0.4);
    for (int m = -2; m <= 2; ++m) {
      const auto lad = psi_bar_ladder(5, m, kp, w0, p);
      CHECK(lad[0] == psi_bar_seed(m, kp, w0, p));
    }
  }
  SUBCASE("three-term residuals stay below 1e-10 (L=1, c=0.9, k=1, lmax=10)") {
    const PhaseFunction p(0.9, {1.0, 1.0});
    const FourierPoint kp(1.0, Direction(0.6, 0.0));
    const Direction w0 = Direction::zhat();
    const Complex z = kp.z();
    for (int m = -1; m <= 1; ++m) {
      const int am = std::abs(m);
      const auto lad = psi_bar_ladder(10, m, kp, w0, p);
      for (int l = std::max(1, am); l < 10; ++l) {
        const Complex up = l - 1 >= am ? lad[l - 1 - am] : Complex(0.0);
        const Complex resid = z * p.h(l) * lad[l - am] - double(l + 1 - m) * lad[l + 1 - am] -
                              double(l + m) * up -
                              z * source_moment(l, m, kp, w0, p);
        const double scale = std::max({std::abs(z * p.h(l) * lad[l - am]),
                                       std::abs(lad[l + 1 - am]) * (l + 1 - m),
                                       std::abs(up) * std::max(1, l + m), 1e-300});
        CHECK(std::abs(resid) <= 1e-10 * scale);
      }
    }
  }
  SUBCASE("entries above L follow the decaying Legendre-Q profile") {
    const PhaseFunction p(0.8, {1.0, 1.5, 0.5});
    const FourierPoint kp(1.5, Direction(1.1, 0.6));
    const Direction w0(0.9, 2.2);
    for (int m : {-2, 0, 1}) {
      const auto lad = psi_bar_ladder(12, m, kp, w0, p);
      const auto q = assoc_legendre_q(12, m, kp.z());
      const int am = std::abs(m);
      const Complex B = lad[2 - am] / q[2 - am];
      for (int l = 3; l <= 12; ++l)
        CHECK(std::abs(lad[l - am] - B * q[l - am]) <=
              1e-9 * std::max(std::abs(lad[l - am]), 1e-300));
    }
  }
}

TEST_CASE("route equivalence: ladder equals matrix route entrywise, random configs") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 12; ++trial) {
    const int L = 1 + static_cast<int>(u(rng) * 5);
    std::vector<double> beta{1.0};
    for (int l = 1; l <= L; ++l) beta.push_back((2 * u(rng) - 1) * 0.9 * (2 * l + 1));
    const PhaseFunction p(0.05 + 0.9 * u(rng), beta);
    const double k = 0.5 + 19.5 * u(rng);
    const FourierPoint kp(k, Direction(M_PI * u(rng), 2 * M_PI * u(rng)));
    const Direction w0(M_PI * u(rng), 2 * M_PI * u(rng));
    for (int m = -L; m <= L; ++m) {
      const auto mat = psi_bar_matrix_route(m, kp, w0, p);
      const auto lad = psi_bar_ladder(L, m, kp, w0, p);
      const double scale = std::max(1e-300, mat.cwiseAbs().maxCoeff());
      for (int l = std::abs(m); l <= L; ++l)
        CHECK(std::abs(lad[l - std::abs(m)] - mat(l - std::abs(m))) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("kappa: isotropic reduction and the dispersion-normalized closed form") {
  const PhaseFunction p(0.9, {1.0});
  const FourierPoint kp(1.1, Direction(0.8, 0.5));
  const Direction w0(1.9, 0.7);
  SUBCASE("L=0: kappa_00 = psibar_0 / sqrt(4 pi)") {
    const Complex kap = kappa_lm(0, 0, kp, w0, p);
    const Complex sd = psi_bar_seed(0, kp, w0, p);
    CHECK(std::abs(kap - sd / std::sqrt(4 * M_PI)) < 1e-14);
  }
  SUBCASE("L=0: matches c z Q_0 / ((1 + i k.W0) Lambda) up to the Y_00 factor") {
    const Complex z = kp.z();
    const Complex q0(0, -std::atan(kp.k));
    const Complex lam = 1.0 - p.c() * z * q0;
    const Complex ikw0(1.0, kp.k * kp.khat.unit().dot(w0.unit()));
    const Complex closed = p.c() * z * q0 / (ikw0 * lam);
    const Complex kap = kappa_lm(0, 0, kp, w0, p);
    CHECK(std::abs(kap * std::sqrt(4 * M_PI) - closed) <= 1e-12 * std::abs(closed));
  }
}

TEST_CASE("kappa reconstruction equals the moment reconstruction pointwise") {
  const PhaseFunction p(0.8, {1.0, 1.3, 0.6});
  const double k = 1.3;
  const SpectralZTables tab(k, p, 44);
  const Direction khat(1.1, 0.6), w0(0.9, 2.2);
  const ModeTable mt = ModeTable::build(tab, khat, w0, 44);
  const RotatedFrame f(khat);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 16; ++trial) {
    const Direction w(0.2 + 2.7 * u(rng), 2 * M_PI * u(rng));
    const Vec3 wu = w.unit();
    const double mu_r = f.mu_of(wu), phi_r = f.phi_of(wu);
    Complex lhs = 0;
    for (int m = -p.L(); m <= p.L(); ++m) {
      const int am = std::abs(m);
      for (int l = am; l <= mt.lmax(); ++l) {
        const double N = std::sqrt((2 * l + 1) / (4 * M_PI) * factorial_ratio(l, m));
        const Complex RY =
            N * assoc_legendre_p(l, m, mu_r).back() * std::exp(Complex(0, m * phi_r));
        lhs += N * std::exp(Complex(0, -m * w0.phi)) * mt.psi_bar(l, m) * RY;
      }
    }
    const Complex rhs = mt.psi_bar_field(w);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(lhs));
  }
}

TEST_CASE("spectral reconstruction agrees with the matrix-route field (Eq4apsi route)") {
  const PhaseFunction p(0.8, {1.0, 1.5, 0.5});
  const FourierPoint kp(2.0, Direction(1.0, 0.4));
  const Direction w0(0.7, 3.9);
  const FourierWorkspace ws(kp.k, p);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 6; ++trial) {
    const Direction w(0.15 + 2.8 * u(rng), 2 * M_PI * u(rng));
    const Complex lhs = field_from_moments(kp, w, w0, p);
    const Complex rhs = ws.psi_bar_field(kp.khat, w, w0);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
  }
}

TEST_CASE("Appendix-B identities: Wronskian and both Christoffel-Darboux forms") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(0, 1);
  for (double k : {0.5, 1.0, 5.0}) {
    const Complex z(0, 1.0 / k);
    for (int trial = 0; trial < 3; ++trial) {
      const int L = 1 + static_cast<int>(u(rng) * 9);
      std::vector<double> beta{1.0};
      for (int l = 1; l <= L; ++l) beta.push_back((2 * u(rng) - 1) * 0.9 * (2 * l + 1));
      const PhaseFunction p(0.1 + 0.85 * u(rng), beta);
      for (int m = 0; m <= std::min(L, 6); ++m) {
        const auto g = chandrasekhar_g(21, m, z, p);
        const auto r = chandrasekhar_rho(21, m, z, p);
        double f2m = 1.0;
        for (int i = 2; i <= 2 * m; ++i) f2m *= i;
        for (int l = m + 1; l <= 20; ++l) {
          const Complex lhs =
              double(l + m) * (g[l - 1 - m] * r[l - m] - g[l - m] * r[l - 1 - m]);
          const Complex rhs = z / (factorial_ratio(l, m) * f2m);
          // operand scale: the difference of the g*rho products cannot come out
          // below ~ulp of the products themselves
          const double scale = std::max(
              std::abs(rhs), double(l + m) * (std::abs(g[l - 1 - m] * r[l - m]) +
                                              std::abs(g[l - m] * r[l - 1 - m])));
          CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
        }
      }
      // second specialization: q_l = g_l/g_m, r_l = Q_l P_m^m, telescoped to l0 = L
      for (int m = 0; m <= std::min(L, 6); ++m) {
        const auto g = chandrasekhar_g(L + 1, m, z, p);
        const auto q = assoc_legendre_q(L + 1, m, z);
        const Complex pmm = assoc_legendre_p(m, m, z)[0];
        double frL = 1.0; // (L+1-m)!/(L+m)!
        for (int i = L + m + 1; i <= L + 1 - m; ++i) frL *= i;
        for (int i = L - m + 2; i <= L + m; ++i) frL /= i;
        const Complex lhs = frL * (g[L - m] * q[L + 1 - m] - g[L + 1 - m] * q[L - m]) *
                            pmm / g[0];
        Complex sum = 0;
        for (int l = m + 1; l <= L; ++l)
          sum += (z * double(2 * l + 1) - z * p.h(l)) * factorial_ratio(l, m) *
                 (g[l - m] / g[0]) * q[l - m] * pmm;
        double fr1 = factorial_ratio(m + 1, m) * (m + 1 + m); // (|m|+1-m)!/(|m|+m)!
        const Complex boundary =
            fr1 * ((g[0] / g[0]) * q[1] * pmm - (g[1] / g[0]) * q[0] * pmm);
        CHECK(std::abs(lhs - (sum + boundary)) <=
              1e-11 * std::max({std::abs(lhs), std::abs(sum), 1e-30}));
      }
    }
  }
}
