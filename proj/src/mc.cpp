#include "bgreen/mc.hpp"

#include <algorithm>
#include <cmath>

#include "bgreen/errors.hpp"
#include "bgreen/parallel.hpp"
#include "bgreen/quadrature.hpp"

namespace bgreen {

namespace {

constexpr double kWeightCutoff = 1e-6;
constexpr double kRouletteSurvival = 0.1;

double legendre_sum(const std::vector<double>& beta, double x) {
  double plm1 = 0.0, pl = 1.0, acc = beta[0];
  for (std::size_t l = 0; l + 1 < beta.size(); ++l) {
    const double plp1 = ((2 * l + 1) * x * pl - l * plm1) / (l + 1);
    plm1 = pl;
    pl = plp1;
    acc += beta[l + 1] * pl;
  }
  return acc;
}

} // namespace

PhaseSampler::PhaseSampler(const PhaseFunction& phase) : beta_(phase.beta()) {
  if (phase.L() == 0) {
    isotropic_ = true;
    return;
  }
  if (phase.min_density() < -1e-12)
    throw DomainError("PhaseSampler: (1/2) sum beta_l P_l has negative regions (invalid phase)");
  const int n = 2048;
  grid_.resize(n + 1);
  cdf_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    grid_[i] = -1.0 + 2.0 * i / n;
    cdf_[i] = cdf(grid_[i]);
  }
  cdf_.front() = 0.0;
  cdf_.back() = 1.0;
  for (int i = 0; i <= n; ++i) fmax_ = std::max(fmax_, pdf(grid_[i]));
}

double PhaseSampler::pdf(double mu) const { return 0.5 * legendre_sum(beta_, mu); }

double PhaseSampler::cdf(double mu) const {
  // int_{-1}^x P_l = (P_{l+1} - P_{l-1})/(2l+1), l >= 1
  double acc = 0.5 * (mu + 1.0);
  double plm1 = 1.0, pl = mu;
  for (std::size_t l = 1; l < beta_.size(); ++l) {
    const double plp1 = ((2 * l + 1) * mu * pl - l * plm1) / (l + 1);
    acc += 0.5 * beta_[l] * (plp1 - plm1) / (2 * l + 1);
    plm1 = pl;
    pl = plp1;
  }
  return acc;
}

double PhaseSampler::sample_mu(SplitMix64& rng) const {
  const double u = rng.uniform();
  if (isotropic_) return 2.0 * u - 1.0;
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t hi = std::min<std::size_t>(cdf_.size() - 1, it - cdf_.begin());
  std::size_t lo = hi - 1;
  double a = grid_[lo], b = grid_[hi];
  double x = a + (b - a) * (u - cdf_[lo]) / std::max(cdf_[hi] - cdf_[lo], 1e-300);
  for (int iter = 0; iter < 32; ++iter) {
    const double F = cdf(x) - u, f = pdf(x);
    if (f <= 0) break;
    const double step = F / f;
    x -= step;
    if (x < a || x > b) x = 0.5 * (a + b); // keep inside the bracket
    if (std::abs(step) < 1e-14) return std::clamp(x, -1.0, 1.0);
  }
  // rejection fallback
  for (int iter = 0; iter < 100000; ++iter) {
    const double cand = 2.0 * rng.uniform() - 1.0;
    if (rng.uniform() * fmax_ <= pdf(cand)) return cand;
  }
  throw NumericalConsistencyError("PhaseSampler: rejection fallback failed");
}

namespace {

struct ShellTally {
  // per shell: order buckets 0, 1, >=2
  std::vector<double> o0, o1, o2;

  explicit ShellTally(int n) : o0(n, 0.0), o1(n, 0.0), o2(n, 0.0) {}

  void reset() {
    std::fill(o0.begin(), o0.end(), 0.0);
    std::fill(o1.begin(), o1.end(), 0.0);
    std::fill(o2.begin(), o2.end(), 0.0);
  }
};

// chord lengths of the segment p0 + t u, t in (0, s), inside each shell
void tally_segment(const std::vector<double>& bounds, const Vec3& p0, const Vec3& u,
                   double s, double w, int order, ShellTally& t) {
  const double b = p0.dot(u);
  const double r02 = p0.dot(p0);
  const double rmax = bounds.back();
  // closest approach on [0, s]
  const double tstar = std::clamp(-b, 0.0, s);
  const double rmin2 = r02 + tstar * (2 * b + tstar);
  if (rmin2 >= rmax * rmax) return;

  double cross[34];
  int nc = 0;
  cross[nc++] = 0.0;
  for (double R : bounds) {
    const double disc = b * b - r02 + R * R;
    if (disc <= 0) continue;
    const double sq = std::sqrt(disc);
    const double t1 = -b - sq, t2 = -b + sq;
    if (t1 > 0 && t1 < s) cross[nc++] = t1;
    if (t2 > 0 && t2 < s) cross[nc++] = t2;
  }
  cross[nc++] = s;
  std::sort(cross, cross + nc);

  std::vector<double>* bucket = order == 0 ? &t.o0 : (order == 1 ? &t.o1 : &t.o2);
  const int nsh = static_cast<int>(bounds.size()) - 1;
  for (int i = 0; i + 1 < nc; ++i) {
    const double ta = cross[i], tb = cross[i + 1];
    if (tb - ta <= 0) continue;
    const double tm = 0.5 * (ta + tb);
    const double rm = std::sqrt(r02 + tm * (2 * b + tm));
    const int idx = static_cast<int>(std::upper_bound(bounds.begin(), bounds.end(), rm) -
                                     bounds.begin()) - 1;
    if (idx >= 0 && idx < nsh) (*bucket)[idx] += w * (tb - ta);
  }
}

Vec3 rotate_direction(const Vec3& u, double mu_s, double phi, int* renorm_guard) {
  const double s = std::sqrt(std::max(0.0, 1.0 - mu_s * mu_s));
  const double cp = std::cos(phi), sp = std::sin(phi);
  Vec3 d;
  if (std::abs(u.z) > 1.0 - 1e-12) {
    d = {s * cp, s * sp, u.z > 0 ? mu_s : -mu_s};
  } else {
    const double den = std::sqrt(1.0 - u.z * u.z);
    d = {s * (u.x * u.z * cp - u.y * sp) / den + u.x * mu_s,
         s * (u.y * u.z * cp + u.x * sp) / den + u.y * mu_s,
         -s * den * cp + u.z * mu_s};
  }
  // drift control
  if (++(*renorm_guard) >= 64) {
    *renorm_guard = 0;
    return d.normalized();
  }
  return d;
}

} // namespace

McEstimate simulate(const PhaseFunction& phase, const McConfig& config) {
  if (config.histories < 1) throw DomainError("simulate: histories >= 1 required");
  const auto& bounds = config.shell_boundaries;
  if (bounds.size() < 2) throw DomainError("simulate: need at least two shell boundaries");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i] > 0)) throw DomainError("simulate: shell radii must be positive");
    if (i > 0 && !(bounds[i] > bounds[i - 1]))
      throw DomainError("simulate: shell radii must be strictly increasing");
  }
  const PhaseSampler sampler(phase);
  const int nsh = static_cast<int>(bounds.size()) - 1;
  const double c = phase.c();
  const Vec3 beam_dir = config.omega0.unit();

  constexpr long long kBlock = 16384;
  const long long n_blocks = (config.histories + kBlock - 1) / kBlock;

  // per block, per series (total, o0, o1, o2): sums and sums of squares
  struct BlockSums {
    std::vector<double> s_tot, s2_tot, s_o0, s2_o0, s_o1, s2_o1, s_o2, s2_o2;
  };
  std::vector<BlockSums> blocks(n_blocks);

  parallel_blocks(n_blocks, config.threads, [&](long long blk) {
    BlockSums bs;
    bs.s_tot.assign(nsh, 0);
    bs.s2_tot.assign(nsh, 0);
    bs.s_o0.assign(nsh, 0);
    bs.s2_o0.assign(nsh, 0);
    bs.s_o1.assign(nsh, 0);
    bs.s2_o1.assign(nsh, 0);
    bs.s_o2.assign(nsh, 0);
    bs.s2_o2.assign(nsh, 0);
    ShellTally tally(nsh);
    const long long h_begin = blk * kBlock;
    const long long h_end = std::min(config.histories, h_begin + kBlock);
    for (long long h = h_begin; h < h_end; ++h) {
      SplitMix64 rng(config.seed, static_cast<std::uint64_t>(h));
      tally.reset();
      Vec3 pos{0, 0, 0};
      Vec3 dir = beam_dir;
      if (config.source == McSource::isotropic_point) {
        const double mu = 2 * rng.uniform() - 1;
        const double ph = 2 * M_PI * rng.uniform();
        const double sn = std::sqrt(std::max(0.0, 1 - mu * mu));
        dir = {sn * std::cos(ph), sn * std::sin(ph), mu};
      }
      double w = 1.0;
      int renorm_guard = 0;
      for (int order = 0;; ++order) {
        const double s = -std::log1p(-rng.uniform());
        tally_segment(bounds, pos, dir, s, w, order, tally);
        if (config.max_scatter_order >= 0 && order >= config.max_scatter_order) break;
        pos = pos + dir * s;
        w *= c; // implicit capture
        if (w < kWeightCutoff) {
          if (rng.uniform() < kRouletteSurvival)
            w /= kRouletteSurvival;
          else
            break;
        }
        const double mu_s = sampler.sample_mu(rng);
        const double phi_s = 2 * M_PI * rng.uniform();
        dir = rotate_direction(dir, mu_s, phi_s, &renorm_guard);
        if (order > 1000000)
          throw NumericalConsistencyError("simulate: runaway history (check albedo)");
      }
      for (int i = 0; i < nsh; ++i) {
        const double x0 = tally.o0[i], x1 = tally.o1[i], x2 = tally.o2[i];
        const double xt = x0 + x1 + x2;
        bs.s_tot[i] += xt;
        bs.s2_tot[i] += xt * xt;
        bs.s_o0[i] += x0;
        bs.s2_o0[i] += x0 * x0;
        bs.s_o1[i] += x1;
        bs.s2_o1[i] += x1 * x1;
        bs.s_o2[i] += x2;
        bs.s2_o2[i] += x2 * x2;
      }
    }
    blocks[blk] = std::move(bs);
  });

  McEstimate est;
  est.boundaries = bounds;
  est.histories = config.histories;
  est.scale = config.source == McSource::isotropic_point ? 4 * M_PI : 1.0;
  est.mean.assign(nsh, 0);
  est.std_error.assign(nsh, 0);
  est.order0.assign(nsh, 0);
  est.order1.assign(nsh, 0);
  est.order2plus.assign(nsh, 0);
  est.order0_err.assign(nsh, 0);
  est.order1_err.assign(nsh, 0);
  est.order2plus_err.assign(nsh, 0);

  const double N = static_cast<double>(config.histories);
  for (int i = 0; i < nsh; ++i) {
    const double vol =
        4.0 / 3.0 * M_PI * (std::pow(bounds[i + 1], 3) - std::pow(bounds[i], 3));
    const double norm = est.scale / (vol * N);
    auto stats = [&](std::vector<double> BlockSums::* s, std::vector<double> BlockSums::* s2,
                     double& mean, double& err) {
      std::vector<double> v(n_blocks), v2(n_blocks);
      for (long long b = 0; b < n_blocks; ++b) {
        v[b] = (blocks[b].*s)[i];
        v2[b] = (blocks[b].*s2)[i];
      }
      const double S = pairwise_sum(v), S2 = pairwise_sum(v2);
      mean = S * norm;
      const double var = std::max(0.0, (S2 - S * S / N) / std::max(1.0, N - 1));
      err = std::sqrt(var / N) * est.scale / vol;
    };
    stats(&BlockSums::s_tot, &BlockSums::s2_tot, est.mean[i], est.std_error[i]);
    stats(&BlockSums::s_o0, &BlockSums::s2_o0, est.order0[i], est.order0_err[i]);
    stats(&BlockSums::s_o1, &BlockSums::s2_o1, est.order1[i], est.order1_err[i]);
    stats(&BlockSums::s_o2, &BlockSums::s2_o2, est.order2plus[i], est.order2plus_err[i]);
  }
  return est;
}

McOrders decompose_collision_orders(const McEstimate& est) {
  McOrders out;
  out.order0 = est.order0;
  out.order1 = est.order1;
  out.order2plus = est.order2plus;
  out.order0_err = est.order0_err;
  out.order1_err = est.order1_err;
  out.order2plus_err = est.order2plus_err;
  for (int i = 0; i < est.n_shells(); ++i) {
    const double sum = est.order0[i] + est.order1[i] + est.order2plus[i];
    if (std::abs(sum - est.mean[i]) > 1e-12 * std::max(1.0, std::abs(est.mean[i])))
      throw NumericalConsistencyError("decompose_collision_orders: buckets do not sum to total");
  }
  return out;
}

} // namespace bgreen
