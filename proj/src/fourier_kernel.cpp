#include "bgreen/fourier_kernel.hpp"

#include <cmath>

#include "bgreen/errors.hpp"
#include "bgreen/quadrature.hpp"

namespace bgreen {

namespace {

// L^{-m} = C L^{+m} C' entrywise: (j-m)!/(j+m)! (l-m)!/(l+m)! and the two
// Condon-Shortley signs cancel.
double neg_m_entry_factor(int j, int l, int am) {
  return factorial_ratio(j, am) * factorial_ratio(l, am);
}

} // namespace

Eigen::MatrixXcd build_L_matrix(int m, Complex z, const PhaseFunction& phase) {
  const int L = phase.L(), am = std::abs(m);
  if (am > L) throw DomainError("build_L_matrix: |m| > L");
  const int n = L - am + 1;
  const auto P = assoc_legendre_p(L, am, z);
  const auto Q = assoc_legendre_q(L, am, z);
  Eigen::MatrixXcd out(n, n);
  for (int j = am; j <= L; ++j)
    for (int l = am; l <= L; ++l) {
      const int lo = std::min(j, l), hi = std::max(j, l);
      Complex v = z * P[lo - am] * Q[hi - am];
      if (m < 0) v *= neg_m_entry_factor(j, l, am);
      out(j - am, l - am) = v;
    }
#ifndef NDEBUG
  {
    const Eigen::MatrixXcd ref = build_L_matrix_quadrature(m, z, phase, 1e-11);
    const double scale = ref.cwiseAbs().maxCoeff();
    if ((out - ref).cwiseAbs().maxCoeff() > 1e-8 * scale)
      throw NumericalConsistencyError("L-matrix: closed product disagrees with quadrature");
  }
#endif
  return out;
}

Eigen::MatrixXcd build_L_matrix_quadrature(int m, Complex z, const PhaseFunction& phase,
                                           double tol) {
  const int L = phase.L(), am = std::abs(m);
  if (am > L) throw DomainError("build_L_matrix_quadrature: |m| > L");
  const int n = L - am + 1;
  const bool near_singular = std::abs(z.imag()) < 0.05 && std::abs(z.real()) < 1.5;
  Eigen::MatrixXcd out(n, n);
  for (int j = am; j <= L; ++j)
    for (int l = j; l <= L; ++l) {
      auto pp = [&](double mu) {
        const auto pj = assoc_legendre_p(L, m, mu);
        return pj[j - am] * pj[l - am];
      };
      Complex I;
      if (near_singular) {
        // subtract the pole's residue profile at mu = Re z ~ 0
        const Complex f0 = pp(0.0);
        auto f = [&](double mu) { return (pp(mu) - f0) / (z - mu); };
        I = adaptive_integrate(f, -1.0, 1.0, tol) + f0 * std::log((z + 1.0) / (z - 1.0));
      } else {
        auto f = [&](double mu) { return pp(mu) / (z - mu); };
        I = adaptive_integrate(f, -1.0, 1.0, tol);
      }
      out(j - am, l - am) = 0.5 * z * I;
      out(l - am, j - am) = out(j - am, l - am);
    }
  return out;
}

Eigen::VectorXcd build_P_vector(int m, const FourierPoint& kpoint, const Direction& omega,
                                double omega0_phi, const PhaseFunction& phase) {
  const int L = phase.L(), am = std::abs(m);
  if (am > L) throw DomainError("build_P_vector: |m| > L");
  const RotatedFrame frame(kpoint.khat);
  const Vec3 w = omega.unit();
  const double mu = frame.mu_of(w), phi_rot = frame.phi_of(w);
  const auto P = assoc_legendre_p(L, m, mu);
  const Complex phase_factor = std::exp(Complex(0.0, m * (omega0_phi - phi_rot)));
  Eigen::VectorXcd out(L - am + 1);
  for (int j = am; j <= L; ++j) out(j - am) = P[j - am] * phase_factor;
  return out;
}

FourierWorkspace::FourierWorkspace(double k, const PhaseFunction& phase)
    : k_(k), phase_(phase) {
  if (!(k > 0.0)) throw DomainError("FourierWorkspace: k must be > 0");
  const Complex zv = z();
  const int L = phase_.L();
  lmat_.reserve(2 * L + 1);
  lu_.reserve(2 * L + 1);
  wdiag_.reserve(2 * L + 1);
  for (int m = -L; m <= L; ++m) {
    const int am = std::abs(m), n = L - am + 1;
    Eigen::MatrixXcd Lm = build_L_matrix(m, zv, phase_);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(n, n);
    for (int l = am; l <= L; ++l) W(l - am, l - am) = phase_.omega(l, m);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) - phase_.c() * Lm * W;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
      throw DispersionSingularityError("I - c L^m W^m is near-singular at k = " +
                                       std::to_string(k));
    lmat_.push_back(std::move(Lm));
    lu_.push_back(std::move(lu));
    wdiag_.push_back(std::move(W));
  }
}

Complex FourierWorkspace::M(const Direction& khat, const Direction& omega,
                            const Direction& omega0) const {
  const int L = phase_.L();
  const FourierPoint kp(k_, khat);
  Complex acc = 0.0;
  for (int m = -L; m <= L; ++m) {
    const auto Pw = build_P_vector(m, kp, omega, omega0.phi, phase_);
    const auto P0 = build_P_vector(m, kp, omega0, omega0.phi, phase_);
    const Eigen::VectorXcd sol = lu_[m + L].solve(P0);
    acc += Pw.dot(wdiag_[m + L] * sol); // .dot conjugates the left factor
  }
  return acc;
}

Eigen::VectorXcd FourierWorkspace::psi_bar(int m, const Direction& khat,
                                           const Direction& omega0) const {
  const int L = phase_.L(), am = std::abs(m);
  if (am > L) throw DomainError("psi_bar: |m| > L");
  const FourierPoint kp(k_, khat);
  const RotatedFrame frame(khat);
  const Complex s0 = z() / (z() - frame.mu_of(omega0.unit()));
  const auto P0 = build_P_vector(m, kp, omega0, omega0.phi, phase_);
  const Eigen::VectorXcd rhs =
      phase_.c() * (lmat_[m + L] * (wdiag_[m + L] * (s0 * P0)));
  return lu_[m + L].solve(rhs);
}

Complex FourierWorkspace::psi_bar_field(const Direction& khat, const Direction& omega,
                                        const Direction& omega0) const {
  const Complex ikw(1.0, k_ * khat.unit().dot(omega.unit()));
  const Complex ikw0(1.0, k_ * khat.unit().dot(omega0.unit()));
  return phase_.c() / (4 * M_PI) * M(khat, omega, omega0) / (ikw * ikw0);
}

Complex compute_M(const FourierPoint& kpoint, const Direction& omega,
                  const Direction& omega0, const PhaseFunction& phase) {
  return FourierWorkspace(kpoint.k, phase).M(kpoint.khat, omega, omega0);
}

Eigen::VectorXcd psi_bar_matrix_route(int m, const FourierPoint& kpoint,
                                      const Direction& omega0, const PhaseFunction& phase) {
  return FourierWorkspace(kpoint.k, phase).psi_bar(m, kpoint.khat, omega0);
}

} // namespace bgreen
