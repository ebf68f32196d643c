#include "bgreen/phase_function.hpp"

#include <cmath>
#include <string>

#include "bgreen/errors.hpp"

namespace bgreen {

PhaseFunction::PhaseFunction(double c, std::vector<double> beta)
    : c_(c), beta_(std::move(beta)) {
  if (!(c_ > 0.0 && c_ < 1.0))
    throw DomainError("PhaseFunction: albedo must satisfy 0 < c < 1");
  if (beta_.empty() || beta_[0] != 1.0)
    throw DomainError("PhaseFunction: beta_0 must be 1");
  for (int l = 1; l <= L(); ++l)
    if (!(std::abs(beta_[l]) < 2 * l + 1))
      throw DomainError("PhaseFunction: |beta_" + std::to_string(l) +
                        "| must be < " + std::to_string(2 * l + 1));
}

double factorial_ratio(int l, int m) {
  if (m == 0) return 1.0;
  if (m < 0) return 1.0 / factorial_ratio(l, -m);
  double r = 1.0;
  for (int i = l - m + 1; i <= l + m; ++i) r /= i;
  return r;
}

double PhaseFunction::omega(int l, int m) const {
  return beta(l) * factorial_ratio(l, m);
}

double PhaseFunction::eval(const Direction& omega_dir, const Direction& omega_prime) const {
  const double cmu = omega_dir.unit().dot(omega_prime.unit());
  double plm1 = 0.0, pl = 1.0, acc = beta_[0];
  for (int l = 0; l < L(); ++l) {
    const double plp1 = ((2 * l + 1) * cmu * pl - l * plm1) / (l + 1);
    plm1 = pl;
    pl = plp1;
    acc += beta_[l + 1] * pl;
  }
  return acc / (4 * M_PI);
}

double PhaseFunction::min_density() const {
  double lo = 1e300;
  const int n = 4096;
  for (int i = 0; i <= n; ++i) {
    const double mu = -1.0 + 2.0 * i / n;
    double plm1 = 0.0, pl = 1.0, acc = beta_[0];
    for (int l = 0; l < L(); ++l) {
      const double plp1 = ((2 * l + 1) * mu * pl - l * plm1) / (l + 1);
      plm1 = pl;
      pl = plp1;
      acc += beta_[l + 1] * pl;
    }
    lo = std::min(lo, 0.5 * acc);
  }
  return lo;
}

} // namespace bgreen
