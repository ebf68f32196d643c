#include "bgreen/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "bgreen/errors.hpp"
#include "bgreen/parallel.hpp"

namespace bgreen {

namespace {

GaussLegendre compute_gl(int n) {
  GaussLegendre gl;
  gl.x.resize(n);
  gl.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int l = 1; l < n; ++l) {
        const double p2 = ((2 * l + 1) * x * p1 - l * p0) / (l + 1);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.x[i] = -x;
    gl.x[n - 1 - i] = x;
    gl.w[i] = gl.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

} // namespace

const GaussLegendre& GaussLegendre::get(int n) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

namespace {

struct PanelEst {
  std::complex<double> integral;
  double magnitude; // int |f|, the cancellation scale
};

PanelEst gl_panel15(const std::function<std::complex<double>(double)>& f, double a, double b) {
  const auto& gl = GaussLegendre::get(15);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  PanelEst out{0.0, 0.0};
  for (int i = 0; i < 15; ++i) {
    const std::complex<double> v = f(mid + half * gl.x[i]);
    out.integral += gl.w[i] * v;
    out.magnitude += gl.w[i] * std::abs(v);
  }
  out.integral *= half;
  out.magnitude *= half;
  return out;
}

std::complex<double> adaptive_rec(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, const PanelEst& whole,
                                  double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const PanelEst left = gl_panel15(f, a, mid);
  const PanelEst right = gl_panel15(f, mid, b);
  const std::complex<double> sum = left.integral + right.integral;
  const double err = std::abs(sum - whole.integral);
  // second clause: the estimate is already at the cancellation floor of the
  // panel magnitudes; no refinement can improve it in doubles
  if (depth <= 0 || err <= tol || err <= 4e-15 * (left.magnitude + right.magnitude))
    return sum;
  return adaptive_rec(f, a, mid, left, tol / 2, depth - 1) +
         adaptive_rec(f, mid, b, right, tol / 2, depth - 1);
}

} // namespace

std::complex<double> adaptive_integrate(const std::function<std::complex<double>(double)>& f,
                                        double a, double b, double tol, int max_depth) {
  const PanelEst rough = gl_panel15(f, a, b);
  const double atol = tol * std::abs(rough.integral) + 1e-300;
  return adaptive_rec(f, a, b, rough, atol, max_depth);
}

double pairwise_sum(const std::vector<double>& v) {
  std::function<double(std::size_t, std::size_t)> rec = [&](std::size_t lo, std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0;
      for (std::size_t i = lo; i < hi; ++i) s += v[i];
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return v.empty() ? 0.0 : rec(0, v.size());
}

std::complex<double> pairwise_sum(const std::vector<std::complex<double>>& v) {
  std::function<std::complex<double>(std::size_t, std::size_t)> rec =
      [&](std::size_t lo, std::size_t hi) -> std::complex<double> {
    if (hi - lo <= 8) {
      std::complex<double> s = 0;
      for (std::size_t i = lo; i < hi; ++i) s += v[i];
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return v.empty() ? std::complex<double>(0.0) : rec(0, v.size());
}

std::vector<double> oscillatory_panel_edges(double k_min, double k_max, double r_scale) {
  if (!(k_max > k_min && k_min > 0)) throw DomainError("oscillatory panels: bad k range");
  std::vector<double> edges{k_min};
  // geometric ramp through the smooth small-k region
  double k = k_min;
  while (k < std::min(0.5, k_max)) {
    k = std::min(std::max(k * 8.0, 0.05), std::min(0.5, k_max));
    edges.push_back(k);
  }
  // exactly one oscillation period of sin(k r) per panel, so the partial-sum
  // sequence at panel ends decays monotonically and the 1/K tail model applies
  const double period = 2 * M_PI / std::max(r_scale, 1e-3);
  while (k < k_max) {
    k = std::min(k + period, k_max);
    edges.push_back(k);
  }
  return edges;
}

TailedIntegral integrate_oscillatory(const std::function<double(double)>& f,
                                     const std::vector<double>& edges, int n_nodes,
                                     TailModel tail, int threads) {
  const int n_panels = static_cast<int>(edges.size()) - 1;
  // wide panels get more nodes; never fewer than 12 per oscillation period
  double max_width = 0;
  for (int p = 0; p < n_panels; ++p) max_width = std::max(max_width, edges[p + 1] - edges[p]);
  const int budget = n_nodes / std::max(1, n_panels);
  const int per_panel =
      std::min(64, std::max({12, budget, static_cast<int>(std::ceil(3 * max_width)) + 8}));
  std::vector<double> panel(n_panels);
  parallel_blocks(n_panels, threads, [&](long long p) {
    const auto& gl = GaussLegendre::get(per_panel);
    const double a = edges[p], b = edges[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0;
    for (int i = 0; i < per_panel; ++i) acc += gl.w[i] * f(mid + half * gl.x[i]);
    panel[p] = acc * half;
  });

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
  // convergence check on the period-panel magnitudes
  const double head = std::abs(panel[std::max(0, n_panels / 2)]);
  const double last = std::abs(panel[n_panels - 1]);
  if (last > 10 * head + 1e-12 * std::abs(run))
    throw TailDivergenceError("oscillatory k-integral: panel sums grow toward k_max");

  // least-squares fit U(K) = U_inf - a/K over the last trailing partial sums
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
    return (sxx * sy - sx * sxy) / det; // U_inf
  };
  const double u6 = fit(std::min(6, n_panels));
  const double u3 = fit(3);
  out.value = u6;
  out.error = std::abs(u6 - u3) + 1e-15 * std::abs(u6);
  return out;
}

} // namespace bgreen
