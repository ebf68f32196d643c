#include "bgreen/special_functions.hpp"

#include <cmath>
#include <string>

#include "bgreen/errors.hpp"

namespace bgreen {

namespace {

void check_off_cut(Complex z) {
  if (z.imag() == 0.0 && z.real() <= 1.0)
    throw BranchCutError("argument on the branch cut (-inf, 1]");
}

// principal-branch (z-1)^{1/2} (z+1)^{1/2}
Complex half_power_product(Complex z) {
  return std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
}

// moment integral I_m = int_{-1}^1 (1-mu^2)^m / (z - mu) dmu
Complex q_moment_integral(int m, Complex z) {
  const double az = std::abs(z);
  if (az >= 1.5) {
    // I_m = sum_n z^{-2n-1} M(m,n),  M(m,n) = int (1-mu^2)^m mu^{2n} dmu
    double M = 2.0;
    for (int j = 1; j <= m; ++j) M *= j / (j + 0.5);
    const Complex zin2 = 1.0 / (z * z);
    Complex term = M / z, acc = term;
    for (int n = 0; n < 400; ++n) {
      term *= zin2 * ((n + 0.5) / (n + m + 1.5));
      acc += term;
      if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  // T_n = int mu^n/(z-mu);  T_n = z T_{n-1} - int mu^{n-1}
  std::vector<Complex> T(2 * m + 1);
  T[0] = std::log((z + 1.0) / (z - 1.0));
  for (int n = 1; n <= 2 * m; ++n)
    T[n] = z * T[n - 1] - ((n - 1) % 2 == 0 ? 2.0 / n : 0.0);
  Complex acc = 0.0;
  double binom = 1.0;
  for (int p = 0; p <= m; ++p) {
    acc += (p % 2 == 0 ? binom : -binom) * T[2 * p];
    binom *= double(m - p) / (p + 1);
  }
  return acc;
}

} // namespace

double double_factorial_odd(int m) {
  double df = 1.0;
  for (int i = 3; i <= 2 * m - 1; i += 2) df *= i;
  return df;
}

std::vector<double> assoc_legendre_p(int lmax, int m, double mu) {
  const int am = std::abs(m);
  if (am > lmax) throw DomainError("assoc_legendre_p: |m| > lmax");
  if (!(mu >= -1.0 && mu <= 1.0)) throw DomainError("assoc_legendre_p: |mu| > 1");
  std::vector<double> out(lmax - am + 1);
  double pmm = double_factorial_odd(am) * std::pow(1.0 - mu * mu, am / 2.0);
  if (am % 2 == 1) pmm = -pmm;
  out[0] = pmm;
  if (lmax > am) out[1] = (2 * am + 1) * mu * pmm;
  for (int l = am + 1; l < lmax; ++l)
    out[l - am + 1] = ((2 * l + 1) * mu * out[l - am] - (l + am) * out[l - am - 1]) / (l - am + 1);
  if (m < 0) {
    for (int l = am; l <= lmax; ++l) {
      double f = factorial_ratio(l, am);
      if (am % 2 == 1) f = -f;
      out[l - am] *= f;
    }
  }
  return out;
}

std::vector<Complex> assoc_legendre_p(int lmax, int m, Complex z) {
  const int am = std::abs(m);
  if (am > lmax) throw DomainError("assoc_legendre_p: |m| > lmax");
  check_off_cut(z);
  std::vector<Complex> out(lmax - am + 1);
  Complex pmm = double_factorial_odd(am);
  const Complex hp = half_power_product(z);
  for (int i = 0; i < am; ++i) pmm *= hp;
  out[0] = pmm;
  if (lmax > am) out[1] = double(2 * am + 1) * z * pmm;
  for (int l = am + 1; l < lmax; ++l)
    out[l - am + 1] = (double(2 * l + 1) * z * out[l - am] - double(l + am) * out[l - am - 1]) / double(l - am + 1);
  if (m < 0)
    for (int l = am; l <= lmax; ++l) out[l - am] *= factorial_ratio(l, am);
  return out;
}

std::vector<Complex> assoc_legendre_q(int lmax, int m, Complex z) {
  const int am = std::abs(m);
  if (am > lmax) throw DomainError("assoc_legendre_q: |m| > lmax");
  check_off_cut(z);

  const double df = double_factorial_odd(am);
  Complex pmm = df;
  const Complex hp = half_power_product(z);
  for (int i = 0; i < am; ++i) pmm *= hp;
  const Complex qmm = df * df / (2.0 * pmm) * q_moment_integral(am, z);

  const int n_out = lmax - am + 1;
  std::vector<Complex> out(n_out);
  out[0] = qmm;
  if (n_out == 1) {
    if (m < 0) out[0] *= factorial_ratio(am, am);
    return out;
  }

  const Complex w = z + hp;
  double rho = std::abs(w);
  if (rho < 1.0) rho = 1.0 / rho;

  if (rho >= 1.05) {
    // continued fraction r_l = Q_{l+1}/Q_l at l = lmax (modified Lentz), then
    // downward recurrence normalized at Q_m^m
    const int l0 = lmax;
    const double tiny = 1e-280;
    Complex f = tiny, C = tiny, D = 0.0;
    for (int j = 1; j < 2000000; ++j) {
      const double lj = l0 + j - 1.0;
      const Complex a = (j == 1) ? Complex(l0 + am + 1.0)
                                 : Complex(-(lj - am + 1.0) * (lj + am + 1.0));
      const Complex b = (2.0 * (l0 + j) + 1.0) * z;
      D = b + a * D;
      if (D == 0.0) D = tiny;
      C = b + a / C;
      if (C == 0.0) C = tiny;
      D = 1.0 / D;
      const Complex delta = C * D;
      f *= delta;
      if (std::abs(delta - 1.0) < 1e-16) break;
    }
    std::vector<Complex> qt(n_out + 1);
    qt[n_out - 1] = 1.0;
    qt[n_out] = f;
    for (int l = lmax; l > am; --l) {
      const int i = l - am;
      qt[i - 1] = (double(2 * l + 1) * z * qt[i] - (l - am + 1.0) * qt[i + 1]) / double(l + am);
      if (std::abs(qt[i - 1]) > 1e270)
        for (int j = i - 1; j <= n_out; ++j) qt[j] *= 1e-270;
    }
    const Complex scale = qmm / qt[0];
    for (int i = 0; i < n_out; ++i) out[i] = qt[i] * scale;
  } else {
    double fact2m = 1.0;
    for (int i = 2; i <= 2 * am; ++i) fact2m *= i;
    out[1] = double(2 * am + 1) * z * qmm - fact2m / pmm;
    for (int l = am + 1; l < lmax; ++l)
      out[l - am + 1] = (double(2 * l + 1) * z * out[l - am] - double(l + am) * out[l - am - 1]) / double(l - am + 1);
  }
  if (m < 0)
    for (int l = am; l <= lmax; ++l) out[l - am] *= factorial_ratio(l, am);
  return out;
}

namespace {

std::vector<Complex> chandrasekhar_impl(int lmax, int m, Complex z,
                                        const PhaseFunction& phase, bool first_kind) {
  const int am = std::abs(m);
  if (am > lmax) throw DomainError("chandrasekhar: |m| > lmax");
  const double df = double_factorial_odd(am);
  std::vector<Complex> out(lmax - am + 1);
  if (first_kind) {
    out[0] = df;
    if (m < 0) out[0] *= (am % 2 == 0 ? 1.0 : -1.0) * factorial_ratio(am, am);
    if (lmax > am) out[1] = z * phase.h(am) * out[0] / double(am + 1 - m);
  } else {
    out[0] = 0.0;
    Complex r1 = z / df;
    if (m < 0) r1 *= (am % 2 == 0 ? 1.0 : -1.0) * factorial_ratio(am + 1, am);
    if (lmax > am) out[1] = r1;
  }
  for (int l = am + 1; l < lmax; ++l)
    out[l - am + 1] =
        (z * phase.h(l) * out[l - am] - double(l + m) * out[l - am - 1]) / double(l + 1 - m);
  return out;
}

} // namespace

std::vector<Complex> chandrasekhar_g(int lmax, int m, Complex z, const PhaseFunction& phase) {
  return chandrasekhar_impl(lmax, m, z, phase, true);
}

std::vector<Complex> chandrasekhar_rho(int lmax, int m, Complex z, const PhaseFunction& phase) {
  return chandrasekhar_impl(lmax, m, z, phase, false);
}

Complex negative_m_convert(NegMKind, int l, int m, Complex value) {
  if (m <= 0) throw DomainError("negative_m_convert: m must be positive");
  if (l < m) throw DomainError("negative_m_convert: l < m");
  double f = factorial_ratio(l, m);
  if (m % 2 == 1) f = -f;
  return value * f;
}

WignerD::WignerD(int l, double theta) : l_(l), d_((2 * l + 1) * (2 * l + 1)) {
  if (l < 0) throw DomainError("WignerD: l < 0");
  const double ch = std::cos(theta / 2), sh = std::sin(theta / 2);
  const double x = std::cos(theta);
  for (int mp = -l; mp <= l; ++mp) {
    for (int m = -l; m <= l; ++m) {
      const int mu = std::abs(mp - m), nu = std::abs(mp + m);
      const int s = l - (mu + nu) / 2;
      // sqrt( s! (s+mu+nu)! / ((s+mu)! (s+nu)!) ) as an exact product
      double norm2 = 1.0;
      for (int i = 1; i <= mu; ++i) norm2 *= double(s + nu + i) / (s + i);
      double xi = (mp > m && (mp - m) % 2 == 1) ? -1.0 : 1.0;
      // Jacobi P_s^{(mu,nu)}(x) by the standard three-term recurrence
      double pj = 1.0;
      if (s > 0) {
        double p0 = 1.0, p1 = 0.5 * (mu - nu + (mu + nu + 2) * x);
        for (int n = 1; n < s; ++n) {
          const double c1 = 2.0 * (n + 1) * (n + mu + nu + 1) * (2 * n + mu + nu);
          const double c2 = (2 * n + mu + nu + 1) * (double(mu) * mu - double(nu) * nu);
          const double c3 = (2.0 * n + mu + nu) * (2 * n + mu + nu + 1) * (2 * n + mu + nu + 2);
          const double c4 = 2.0 * (n + mu) * (n + nu) * (2 * n + mu + nu + 2);
          const double p2 = ((c2 + c3 * x) * p1 - c4 * p0) / c1;
          p0 = p1;
          p1 = p2;
        }
        pj = p1;
      }
      d_[static_cast<std::size_t>(mp + l) * (2 * l + 1) + (m + l)] =
          xi * std::sqrt(norm2) * std::pow(sh, mu) * std::pow(ch, nu) * pj;
    }
  }
}

double bessel_j(int m, double x) {
  if (m < 0) throw DomainError("bessel_j: m < 0");
  if (x < 0) throw DomainError("bessel_j: x < 0");
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  if (x < 12.0) {
    // ascending series
    const double lx = std::log(x / 2);
    double t = std::exp(m * lx - std::lgamma(m + 1.0));
    double acc = t;
    for (int s = 1; s < 200; ++s) {
      t *= -(x * x / 4) / (double(s) * (m + s));
      acc += t;
      if (std::abs(t) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  // Miller backward recurrence, normalized by J_0 + 2 sum_k J_{2k} = 1
  const double big = std::max<double>(m, x);
  int N = static_cast<int>(big + 15 * std::sqrt(big) + 20);
  if (N % 2 == 1) ++N;
  double jp = 0.0, j = 1e-300, target = 0.0, norm = 0.0;
  for (int n = N; n > 0; --n) {
    const double jm = (2.0 * n / x) * j - jp;
    jp = j;
    j = jm;
    if (n - 1 == m) target = j;
    if ((n - 1) % 2 == 0) norm += (n - 1 == 0) ? j : 2.0 * j;
    if (std::abs(j) > 1e280) {
      j *= 1e-280;
      jp *= 1e-280;
      target *= 1e-280;
      norm *= 1e-280;
    }
  }
  return target / norm;
}

Complex spherical_harmonic(int l, int m, const Direction& omega) {
  if (std::abs(m) > l) throw DomainError("spherical_harmonic: |m| > l");
  const double N = std::sqrt((2 * l + 1) / (4 * M_PI) * factorial_ratio(l, m));
  const double P = assoc_legendre_p(l, m, omega.mu()).back();
  return N * P * std::exp(Complex(0.0, m * omega.phi));
}

} // namespace bgreen
