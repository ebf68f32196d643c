#pragma once
#include <cstdint>
#include <vector>

#include "bgreen/geometry.hpp"
#include "bgreen/phase_function.hpp"

namespace bgreen {

/// Counter-based RNG: every history owns an independent substream keyed by
/// (seed, history index), so results do not depend on the thread layout.
struct SplitMix64 {
  std::uint64_t x;

  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
      : x(seed + 0x9E3779B97F4A7C15ULL * (stream + 1)) {}

  std::uint64_t next() {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return (next() >> 11) * 0x1.0p-53; } // [0, 1)
};

/// Inverse-CDF sampler for the scattering cosine density (1/2) sum_l beta_l P_l(mu):
/// 2048-node CDF table for bracketing, Newton refinement on the exact CDF,
/// rejection fallback if the refinement stalls.
class PhaseSampler {
public:
  explicit PhaseSampler(const PhaseFunction& phase);
  double sample_mu(SplitMix64& rng) const;

  double pdf(double mu) const;
  double cdf(double mu) const;

private:
  std::vector<double> beta_;
  std::vector<double> grid_, cdf_;
  double fmax_ = 0;
  bool isotropic_ = false;
};

enum class McSource { isotropic_point, beam };

struct McConfig {
  long long histories = 1000000;
  std::uint64_t seed = 1;
  std::vector<double> shell_boundaries; // strictly increasing, > 0; shells are the gaps
  McSource source = McSource::isotropic_point;
  Direction omega0 = Direction::zhat(); // beam direction
  int max_scatter_order = -1;           // < 0: unlimited
  int threads = 1;
};

/// Track-length density estimates per shell, normalized per source particle
/// and shell volume.  Isotropic-point runs are scaled by 4pi so the totals are
/// directly comparable with the energy density u(r) = int int G dW dW0.
struct McEstimate {
  std::vector<double> boundaries;
  long long histories = 0;
  double scale = 1.0;

  std::vector<double> mean, std_error;
  std::vector<double> order0, order1, order2plus;
  std::vector<double> order0_err, order1_err, order2plus_err;

  int n_shells() const { return static_cast<int>(mean.size()); }
};

McEstimate simulate(const PhaseFunction& phase, const McConfig& config);

struct McOrders {
  std::vector<double> order0, order1, order2plus;
  std::vector<double> order0_err, order1_err, order2plus_err;
};

/// Orders 0, 1, >=2 separated; verifies the decomposition sums back to the
/// total within 1e-12 relative.
McOrders decompose_collision_orders(const McEstimate& estimate);

} // namespace bgreen
