#include "bgreen/spectral.hpp"

#include <cmath>
#include <optional>

#include "bgreen/errors.hpp"

namespace bgreen {

SpectralZTables::SpectralZTables(double k, const PhaseFunction& phase, int lmax)
    : k_(k), phase_(phase), lmax_(lmax) {
  if (!(k > 0)) throw DomainError("SpectralZTables: k <= 0");
  const int L = phase_.L();
  if (lmax_ < L + 1) lmax_ = L + 1;
  const Complex zv = z();
  q_.resize(L + 1);
  pmm_.resize(L + 1);
  lambda_.resize(L + 1);
  for (int m = 0; m <= L; ++m) {
    q_[m] = assoc_legendre_q(lmax_ + 1, m, zv);
    pmm_[m] = assoc_legendre_p(m, m, zv)[0];
  }
  g_.resize(2 * L + 1);
  rho_.resize(2 * L + 1);
  for (int m = -L; m <= L; ++m) {
    g_[m + L] = chandrasekhar_g(std::max(lmax_, L + 1), m, zv, phase_);
    rho_[m + L] = chandrasekhar_rho(std::max(lmax_, L + 1), m, zv, phase_);
  }
  for (int m = 0; m <= L; ++m) {
    double fr = 1.0; // (L+1-m)!/(L+m)!
    for (int i = L + m + 1; i <= L + 1 - m; ++i) fr *= i;
    for (int i = L - m + 2; i <= L + m; ++i) fr /= i;
    const Complex w = g(L + 1, m) * q(L, m) - g(L, m) * q(L + 1, m);
    lambda_[m] = fr * (pmm_[m] / g(m, m)) * w;
  }
}

Complex SpectralZTables::q(int l, int m) const {
  const int am = std::abs(m);
  Complex v = q_[am][l - am];
  if (m < 0) v *= factorial_ratio(l, am);
  return v;
}

Complex SpectralZTables::p_mm(int m) const {
  const int am = std::abs(m);
  Complex v = pmm_[am];
  if (m < 0) v *= factorial_ratio(am, am);
  return v;
}

Complex SpectralZTables::g(int l, int m) const {
  return g_[m + L()][l - std::abs(m)];
}

Complex SpectralZTables::rho(int l, int m) const {
  const int am = std::abs(m);
  return rho_[m + L()][l - am];
}

Complex SpectralZTables::lambda(int m) const {
  const int am = std::abs(m);
  return am > L() ? Complex(1.0) : lambda_[am];
}

Complex dispersion_lambda(int m, Complex z, const PhaseFunction& phase) {
  if (m < 0) throw DomainError("dispersion_lambda: m must be >= 0");
  const int L = phase.L();
  if (m > L) return 1.0;
  const auto Q = assoc_legendre_q(L + 1, m, z);
  const auto G = chandrasekhar_g(L + 1, m, z, phase);
  const Complex pmm = assoc_legendre_p(m, m, z)[0];
  double fr = 1.0; // (L+1-m)!/(L+m)!
  for (int i = L + m + 1; i <= L + 1 - m; ++i) fr *= i;
  for (int i = L - m + 2; i <= L + m; ++i) fr /= i;
  const Complex wronskian =
      fr * (pmm / G[0]) * (G[L + 1 - m] * Q[L - m] - G[L - m] * Q[L + 1 - m]);
  Complex sum = 0.0;
  for (int l = m; l <= L; ++l)
    sum += phase.omega(l, m) * Q[l - m] * pmm * G[l - m] / G[0];
  const Complex sum_form = 1.0 - phase.c() * z * sum;
  if (std::abs(sum_form - wronskian) > 1e-10 * std::max(1.0, std::abs(wronskian)))
    throw NumericalConsistencyError("dispersion_lambda: Wronskian and sum forms disagree");
  return wronskian;
}

namespace {

struct SourceGeometry {
  double mu0_rot, phi0_rot;
  Complex s0; // z/(z - khat.W0)

  SourceGeometry(Complex z, const Direction& khat, const Direction& omega0) {
    const RotatedFrame frame(khat);
    const Vec3 w0 = omega0.unit();
    mu0_rot = frame.mu_of(w0);
    phi0_rot = frame.phi_of(w0);
    s0 = z / (z - mu0_rot);
  }

  Complex phase0(int m, double omega0_phi) const {
    return std::exp(Complex(0.0, m * (omega0_phi - phi0_rot)));
  }
};

Complex source_moment_impl(int l, int m, const SourceGeometry& geo, const Direction& omega0,
                           const PhaseFunction& phase) {
  if (l > phase.L() || l < std::abs(m)) return 0.0;
  const double P = assoc_legendre_p(l, m, geo.mu0_rot).back();
  return phase.c() * phase.beta(l) * geo.s0 * P * geo.phase0(m, omega0.phi);
}

// chi_l^m from tables and precomputed sources S_j (j = |m|..L)
Complex chi_impl(int l, int m, const SpectralZTables& tab,
                 const std::vector<Complex>& S) {
  const int am = std::abs(m);
  if (l == am) return 0.0;
  const int L = tab.L();
  double fact2am = 1.0; // (2|m|)!
  for (int i = 2; i <= 2 * am; ++i) fact2am *= i;
  Complex acc = 0.0;
  const Complex gl = tab.g(l, m), rl = tab.rho(l, m);
  for (int j = am + 1; j <= std::min(l, L); ++j)
    acc += fact2am * factorial_ratio(j, m) * (tab.rho(j, m) * gl - tab.g(j, m) * rl) *
           S[j - am];
  acc -= tab.z() / double(am + 1 - m) * (rl / tab.rho(am + 1, m)) * S[0];
  return tab.g(am, m) * acc;
}

} // namespace

Complex source_moment(int l, int m, const FourierPoint& kpoint, const Direction& omega0,
                      const PhaseFunction& phase) {
  if (std::abs(m) > l) throw DomainError("source_moment: |m| > l");
  const SourceGeometry geo(kpoint.z(), kpoint.khat, omega0);
  return source_moment_impl(l, m, geo, omega0, phase);
}

Complex chi(int l, int m, const FourierPoint& kpoint, const Direction& omega0,
            const PhaseFunction& phase) {
  const int am = std::abs(m);
  if (l < am) throw DomainError("chi: l < |m|");
  if (am > phase.L()) return 0.0;
  const SpectralZTables tab(kpoint.k, phase, std::max(l, phase.L() + 1));
  const SourceGeometry geo(kpoint.z(), kpoint.khat, omega0);
  std::vector<Complex> S(phase.L() - am + 1);
  for (int j = am; j <= phase.L(); ++j)
    S[j - am] = source_moment_impl(j, m, geo, omega0, phase);
  const Complex v = chi_impl(l, m, tab, S);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw std::range_error("chi: Chandrasekhar growth exceeded double range at l = " +
                           std::to_string(l));
  return v;
}

namespace {

Complex seed_impl(int m, const SpectralZTables& tab, const SourceGeometry& geo,
                  const Direction& omega0, const PhaseFunction& phase,
                  const std::vector<Complex>& S) {
  const int am = std::abs(m), L = phase.L();
  if (am > L) return 0.0;
  const Complex zv = tab.z();
  Complex acc = 0.0;
  for (int l = am; l <= L; ++l) {
    const Complex src = geo.s0 * assoc_legendre_p(l, m, geo.mu0_rot).back() *
                        geo.phase0(m, omega0.phi);
    acc += phase.omega(l, m) * tab.q(l, m) * tab.p_mm(m) *
           (src + chi_impl(l, m, tab, S) / tab.g(am, m));
  }
  return phase.c() * zv * acc / tab.lambda(m);
}

} // namespace

Complex psi_bar_seed(int m, const FourierPoint& kpoint, const Direction& omega0,
                     const PhaseFunction& phase) {
  const int am = std::abs(m);
  if (am > phase.L()) return 0.0;
  const SpectralZTables tab(kpoint.k, phase, phase.L() + 1);
  const SourceGeometry geo(kpoint.z(), kpoint.khat, omega0);
  std::vector<Complex> S(phase.L() - am + 1);
  for (int j = am; j <= phase.L(); ++j)
    S[j - am] = source_moment_impl(j, m, geo, omega0, phase);
  return seed_impl(m, tab, geo, omega0, phase, S);
}

namespace {

// hybrid ladder: literal Eq22a through l = L+1, Q-proportional continuation above
std::vector<Complex> ladder_impl(int lmax, int m, const SpectralZTables& tab,
                                 const SourceGeometry& geo, const Direction& omega0,
                                 const PhaseFunction& phase) {
  const int am = std::abs(m), L = phase.L();
  std::vector<Complex> out(std::max(0, lmax - am + 1), Complex(0.0));
  if (am > L || am > lmax) return out;
  std::vector<Complex> S(L - am + 1);
  for (int j = am; j <= L; ++j) S[j - am] = source_moment_impl(j, m, geo, omega0, phase);
  const Complex sd = seed_impl(m, tab, geo, omega0, phase, S);
  const Complex gm = tab.g(am, m);
  out[0] = sd; // g_{|m|}/g_{|m|} = 1 and chi_{|m|} = 0 identically
  const int l_direct = std::min(lmax, L + 1);
  for (int l = am + 1; l <= l_direct; ++l) {
    out[l - am] = (tab.g(l, m) * sd + chi_impl(l, m, tab, S)) / gm;
    if (!std::isfinite(out[l - am].real()) || !std::isfinite(out[l - am].imag()))
      throw std::range_error("psi_bar_ladder: growth exceeded double range at l = " +
                             std::to_string(l));
  }
  if (lmax > L + 1) {
    // normalize the decaying continuation at whichever junction Q is larger
    const int lref = std::abs(tab.q(L, m)) >= std::abs(tab.q(L + 1, m)) ? L : L + 1;
    const Complex B = out[lref - am] / tab.q(lref, m);
    for (int l = L + 2; l <= lmax; ++l) out[l - am] = B * tab.q(l, m);
    // keep the reported L+1 entry consistent with the continuation route
    out[L + 1 - am] = B * tab.q(L + 1, m);
  }
  return out;
}

} // namespace

std::vector<Complex> psi_bar_ladder(int lmax, int m, const FourierPoint& kpoint,
                                    const Direction& omega0, const PhaseFunction& phase) {
  if (lmax < std::abs(m)) throw DomainError("psi_bar_ladder: lmax < |m|");
  const SpectralZTables tab(kpoint.k, phase, std::max(lmax, phase.L() + 1));
  const SourceGeometry geo(kpoint.z(), kpoint.khat, omega0);
  return ladder_impl(lmax, m, tab, geo, omega0, phase);
}

Complex kappa_lm(int l, int m, const FourierPoint& kpoint, const Direction& omega0,
                 const PhaseFunction& phase) {
  if (std::abs(m) > l) throw DomainError("kappa_lm: |m| > l");
  const SpectralZTables tab(kpoint.k, phase, std::max(l, phase.L() + 1));
  const SourceGeometry geo(kpoint.z(), kpoint.khat, omega0);
  const WignerD d(l, kpoint.khat.theta);
  const int ml = std::min(l, phase.L());
  Complex acc = 0.0;
  for (int mp = -ml; mp <= ml; ++mp) {
    const auto lad = ladder_impl(l, mp, tab, geo, omega0, phase);
    const double N = std::sqrt((2 * l + 1) / (4 * M_PI) * factorial_ratio(l, mp));
    acc += N * std::exp(Complex(0.0, -mp * omega0.phi)) * d(m, mp) * lad[l - std::abs(mp)];
  }
  return acc;
}

ModeTable ModeTable::build(const SpectralZTables& tables, const Direction& khat,
                           const Direction& omega0, int lmax,
                           const std::vector<WignerD>* wigner) {
  const int L = tables.L();
  if (lmax < L + 1) lmax = L + 1;
  if (tables.lmax() < lmax) throw DomainError("ModeTable: z-tables shallower than lmax");
  ModeTable mt;
  mt.L_ = L;
  mt.lmax_ = lmax;
  mt.k_ = tables.k();
  mt.khat_ = khat;
  mt.omega0_ = omega0;
  const FourierPoint kp(tables.k(), khat);
  const SourceGeometry geo(tables.z(), khat, omega0);
  const PhaseFunction& phase = tables.phase();

  mt.source_.resize(2 * L + 1);
  mt.chi_.resize(2 * L + 1);
  mt.psibar_.resize(2 * L + 1);
  mt.seed_.resize(2 * L + 1);
  mt.lambda_.resize(L + 2);
  for (int m = 0; m <= L; ++m) mt.lambda_[m] = tables.lambda(m);
  mt.lambda_[L + 1] = 1.0;

  for (int m = -L; m <= L; ++m) {
    const int am = std::abs(m);
    auto& S = mt.source_[m + L];
    S.assign(L - am + 1, Complex(0.0));
    for (int j = am; j <= L; ++j) S[j - am] = source_moment_impl(j, m, geo, omega0, phase);
    auto& C = mt.chi_[m + L];
    C.assign(L + 1 - am + 1, Complex(0.0));
    for (int l = am; l <= L + 1; ++l) C[l - am] = chi_impl(l, m, tables, S);
    mt.psibar_[m + L] = ladder_impl(lmax, m, tables, geo, omega0, phase);
    mt.seed_[m + L] = mt.psibar_[m + L].empty() ? Complex(0.0) : mt.psibar_[m + L][0];
  }

  mt.kappa_.assign(static_cast<std::size_t>(lmax + 1) * (lmax + 1), Complex(0.0));
  for (int l = 0; l <= lmax; ++l) {
    std::optional<WignerD> local;
    const WignerD* d;
    if (wigner) {
      d = &(*wigner)[l];
    } else {
      local.emplace(l, khat.theta);
      d = &*local;
    }
    const int ml = std::min(l, L);
    // N_lm' e^{-i m' phi0} psibar_l^{m'} is m-independent; hoist it
    std::vector<Complex> col(2 * ml + 1);
    for (int mp = -ml; mp <= ml; ++mp) {
      const int amp = std::abs(mp);
      if (l < amp) {
        col[mp + ml] = 0.0;
        continue;
      }
      const double N = std::sqrt((2 * l + 1) / (4 * M_PI) * factorial_ratio(l, mp));
      col[mp + ml] = N * std::exp(Complex(0.0, -mp * omega0.phi)) * mt.psibar_[mp + L][l - amp];
    }
    for (int m = -l; m <= l; ++m) {
      Complex acc = 0.0;
      for (int mp = -ml; mp <= ml; ++mp) acc += (*d)(m, mp) * col[mp + ml];
      mt.kappa_[mt.idx(l, m)] = acc;
    }
  }
  return mt;
}

ModeTable ModeTable::build(const FourierPoint& kpoint, const Direction& omega0,
                           const PhaseFunction& phase, int lmax) {
  const SpectralZTables tables(kpoint.k, phase, std::max(lmax, phase.L() + 1));
  return build(tables, kpoint.khat, omega0, lmax);
}

Complex ModeTable::source(int l, int m) const {
  const int am = std::abs(m);
  if (am > L_ || l > L_ || l < am) return 0.0;
  return source_[m + L_][l - am];
}

Complex ModeTable::chi_at(int l, int m) const {
  const int am = std::abs(m);
  if (am > L_ || l < am) return 0.0;
  if (l > L_ + 1) throw DomainError("ModeTable::chi_at stored only through l = L+1");
  return chi_[m + L_][l - am];
}

Complex ModeTable::psi_bar(int l, int m) const {
  const int am = std::abs(m);
  if (am > L_ || l < am || l > lmax_) return 0.0;
  return psibar_[m + L_][l - am];
}

double ModeTable::tail_ratio() const {
  double worst = 0.0;
  for (int m = -L_; m <= L_; ++m) {
    const int am = std::abs(m);
    const double head = std::abs(psibar_[m + L_][std::max(L_, am) - am]);
    const double tail = std::abs(psibar_[m + L_].back());
    if (head > 0) worst = std::max(worst, tail / head);
  }
  return worst;
}

Complex ModeTable::psi_bar_field(const Direction& omega) const {
  Complex acc = 0.0;
  for (int l = 0; l <= lmax_; ++l)
    for (int m = -l; m <= l; ++m) {
      const Complex kap = kappa_[idx(l, m)];
      if (kap == Complex(0.0)) continue;
      acc += spherical_harmonic(l, m, omega) *
             std::exp(Complex(0.0, -m * khat_.phi)) * kap;
    }
  return acc;
}

} // namespace bgreen
