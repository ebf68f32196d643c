#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace bgreen {

/// Gauss-Legendre nodes/weights on [-1, 1] (Newton on P_n, cached per n).
struct GaussLegendre {
  std::vector<double> x, w;
  static const GaussLegendre& get(int n);
};

/// Adaptive bisection integration of a complex-valued function, GL15 panels
/// compared against their halves.  tol is relative to the whole-interval
/// magnitude estimate.
std::complex<double> adaptive_integrate(const std::function<std::complex<double>(double)>& f,
                                        double a, double b, double tol, int max_depth = 24);

/// Deterministic pairwise summation in index order; bit-stable regardless of
/// how the entries were produced.
double pairwise_sum(const std::vector<double>& v);
std::complex<double> pairwise_sum(const std::vector<std::complex<double>>& v);

/// Panel layout for semi-infinite oscillatory k-integrals: geometric panels
/// through [k_min, ~1], then period-matched panels (width <= one oscillation
/// period of sin(kr)) up to k_max.
std::vector<double> oscillatory_panel_edges(double k_min, double k_max, double r_scale);

enum class TailModel { none, inverse_square };

struct TailedIntegral {
  double value = 0;
  double error = 0;
};

/// Integrate f over the panel layout with n_nodes GL points total (>= 8 per
/// panel), then extrapolate the k > k_max tail from the partial-sum sequence
/// with the inverse-square model  U(K) ~= U_inf - a/K.
/// Panel contributions are accumulated in panel order (bit-stable); panels may
/// be evaluated by several threads.
TailedIntegral integrate_oscillatory(const std::function<double(double)>& f,
                                     const std::vector<double>& edges, int n_nodes,
                                     TailModel tail, int threads = 1);

} // namespace bgreen
