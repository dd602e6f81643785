#ifndef QCONTROL_OPTIMIZE_HPP
#define QCONTROL_OPTIMIZE_HPP

// Seeded multistart Nelder-Mead and the Hermitian-generator chart of U(n).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qcontrol/random.hpp"
#include "qcontrol/tensor.hpp"

namespace qcontrol {

/// Real coordinates of a Hermitian generator: n diagonal entries, then the
/// real parts and then the imaginary parts of the strict upper triangle
/// (row-major). U = exp(iG).
struct UnitaryParams {
  std::size_t n = 0;
  std::vector<double> theta;

  UnitaryParams(std::size_t side, std::vector<double> values) : n(side), theta(std::move(values)) {
    if (theta.size() != n * n) throw std::invalid_argument("UnitaryParams: theta must have n^2 entries");
  }

  static std::size_t count(std::size_t side) { return side * side; }
};

inline Matrix params_to_hermitian(std::size_t n, std::span<const double> theta) {
  if (theta.size() != n * n) throw std::invalid_argument("params_to_hermitian: theta must have n^2 entries");
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) g(i, i) = theta[i];
  const std::size_t off = n * (n - 1) / 2;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      const complex z{theta[n + k], theta[n + off + k]};
      g(i, j) = z;
      g(j, i) = std::conj(z);
    }
  return g;
}

inline std::vector<double> hermitian_to_params(const Matrix &g) {
  if (!g.is_square()) throw std::invalid_argument("hermitian_to_params: matrix must be square");
  const std::size_t n = g.rows();
  const std::size_t off = n * (n - 1) / 2;
  std::vector<double> theta(n * n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = g(i, i).real();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      theta[n + k] = g(i, j).real();
      theta[n + off + k] = g(i, j).imag();
    }
  return theta;
}

inline Matrix params_to_unitary(std::size_t n, std::span<const double> theta) {
  return expi_hermitian(params_to_hermitian(n, theta));
}

inline Matrix params_to_unitary(const UnitaryParams &p) { return params_to_unitary(p.n, p.theta); }

/// Inverse chart (principal branch).
inline UnitaryParams unitary_to_params(const Matrix &u) { return {u.rows(), hermitian_to_params(unitary_log(u))}; }

struct MinimizerConfig {
  std::size_t restarts = 64;
  std::size_t max_iters = 2000;
  double simplex_scale = 0.5;
  double eps = 1e-9;
  std::uint64_t seed = 42;
  double start_sigma = 1.0;  // std-dev of Gaussian starting points
  std::size_t workers = 1;   // concurrent restarts; results do not depend on it

  void validate() const {
    if (restarts == 0) throw std::invalid_argument("MinimizerConfig: restarts must be positive");
    if (max_iters == 0) throw std::invalid_argument("MinimizerConfig: max_iters must be positive");
    if (!(simplex_scale > 0.0)) throw std::invalid_argument("MinimizerConfig: simplex scale must be positive");
    if (!(eps > 0.0)) throw std::invalid_argument("MinimizerConfig: eps must be positive");
    if (!(start_sigma > 0.0)) throw std::invalid_argument("MinimizerConfig: start sigma must be positive");
    if (workers == 0) throw std::invalid_argument("MinimizerConfig: workers must be positive");
  }
};

enum class RestartStatus { Converged, MaxIterations, NonFinite };

inline const char *to_string(RestartStatus s) {
  switch (s) {
    case RestartStatus::Converged: return "converged";
    case RestartStatus::MaxIterations: return "max_iterations";
    case RestartStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  RestartStatus status = RestartStatus::MaxIterations;
  bool warm_start = false;
};

struct GateFidelity {
  std::string label;
  double fidelity;
};

struct SearchReport {
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best_params;
  std::vector<GateFidelity> per_gate;
  std::vector<RestartOutcome> restarts;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds

  std::vector<double> restarts_summary() const {
    std::vector<double> v;
    v.reserve(restarts.size());
    for (const auto &r : restarts) v.push_back(r.value);
    return v;
  }

  std::size_t total_evaluations() const {
    return std::accumulate(restarts.begin(), restarts.end(), std::size_t{0},
                           [](std::size_t s, const RestartOutcome &r) { return s + r.evaluations; });
  }
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead with coefficients reflect 1, expand 2, contract 0.5, shrink 0.5.
/// Stops when the spread of simplex values is <= eps.
inline RestartOutcome nelder_mead(const Objective &f, std::vector<double> x0, double scale, std::size_t max_iters,
                                  double eps) {
  const std::size_t n = x0.size();
  RestartOutcome out;
  if (n == 0) throw std::invalid_argument("nelder_mead: dimension must be positive");

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += scale;

  bool bad = false;
  auto eval = [&](const std::vector<double> &x) {
    ++out.evaluations;
    const double v = f(x);
    if (!std::isfinite(v)) bad = true;
    return v;
  };

  for (std::size_t i = 0; i <= n && !bad; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto finish = [&](RestartStatus status) {
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    out.value = vals[best];
    out.argmin = pts[best];
    out.status = status;
    return out;
  };

  while (!bad) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];
    if (vals[hi] - vals[lo] <= eps) return finish(RestartStatus::Converged);
    if (out.iterations >= max_iters) return finish(RestartStatus::MaxIterations);
    ++out.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k];
    }
    for (auto &c : centroid) c /= static_cast<double>(n);

    for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + (centroid[k] - pts[hi][k]);
    const double fr = eval(xr);
    if (bad) break;

    if (fr < vals[lo]) {
      for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - pts[hi][k]);
      const double fe = eval(xe);
      if (bad) break;
      if (fe < fr) {
        pts[hi] = xe;
        vals[hi] = fe;
      } else {
        pts[hi] = xr;
        vals[hi] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[hi] = xr;
      vals[hi] = fr;
      continue;
    }

    bool accepted = false;
    if (fr < vals[hi]) {
      for (std::size_t k = 0; k < n; ++k) xc[k] = centroid[k] + 0.5 * (xr[k] - centroid[k]);
      const double fc = eval(xc);
      if (bad) break;
      if (fc <= fr) {
        pts[hi] = xc;
        vals[hi] = fc;
        accepted = true;
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) xc[k] = centroid[k] + 0.5 * (pts[hi][k] - centroid[k]);
      const double fc = eval(xc);
      if (bad) break;
      if (fc < vals[hi]) {
        pts[hi] = xc;
        vals[hi] = fc;
        accepted = true;
      }
    }
    if (accepted) continue;

    for (std::size_t i = 0; i <= n; ++i) {
      if (i == lo) continue;
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[lo][k] + 0.5 * (pts[i][k] - pts[lo][k]);
      vals[i] = eval(pts[i]);
      if (bad) break;
    }
  }

  out.value = std::numeric_limits<double>::infinity();
  out.argmin = x0;
  out.status = RestartStatus::NonFinite;
  return out;
}

inline constexpr std::uint64_t kStartStream = 0x5354415254ULL;  // "START"

/// Runs cfg.restarts Nelder-Mead descents from seeded Gaussian points, then
/// one more descent per warm start. Restart i draws its start from
/// derive_seed(cfg.seed, kStartStream, i), so the report is independent of
/// cfg.workers and of scheduling.
inline SearchReport multistart_minimize(const Objective &f, std::size_t dim, const MinimizerConfig &cfg,
                                        const std::vector<std::vector<double>> &warm_starts = {}) {
  cfg.validate();
  if (dim == 0) throw std::invalid_argument("multistart_minimize: dimension must be positive");
  for (const auto &w : warm_starts)
    if (w.size() != dim) throw std::invalid_argument("multistart_minimize: warm start has the wrong dimension");

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t total = cfg.restarts + warm_starts.size();
  std::vector<RestartOutcome> outcomes(total);

  auto run_one = [&](std::size_t i) {
    std::vector<double> x0(dim);
    if (i < cfg.restarts) {
      Rng rng(derive_seed(cfg.seed, kStartStream, i));
      for (auto &x : x0) x = cfg.start_sigma * gaussian(rng);
    } else {
      x0 = warm_starts[i - cfg.restarts];
    }
    outcomes[i] = nelder_mead(f, std::move(x0), cfg.simplex_scale, cfg.max_iters, cfg.eps);
    outcomes[i].warm_start = i >= cfg.restarts;
  };

  const std::size_t workers = std::min(cfg.workers, total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) run_one(i);
      });
    for (auto &t : pool) t.join();
  }

  SearchReport report;
  report.seed = cfg.seed;
  // Ties go to the lowest restart index.
  std::size_t best = total;
  for (std::size_t i = 0; i < total; ++i)
    if (outcomes[i].status != RestartStatus::NonFinite && (best == total || outcomes[i].value < outcomes[best].value))
      best = i;
  if (best < total) {
    report.best_value = outcomes[best].value;
    report.best_params = outcomes[best].argmin;
  }
  report.restarts = std::move(outcomes);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace qcontrol

#endif  // QCONTROL_OPTIMIZE_HPP
