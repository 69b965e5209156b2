#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "iftem/errors.hpp"
#include "iftem/model.hpp"

namespace iftem {

/// Sum-of-sincs sampling kernel. Its Fourier transform is the indicator of
/// the index set {-K..K} (or the same set minus 0 when include_dc is false);
/// in the time domain it is a trigonometric polynomial supported on
/// (-T/2, T/2].
struct KernelSpec {
  int K = 1;
  bool include_dc = true;
  double period = 1.0;

  double omega0() const { return 2.0 * M_PI / period; }

  std::vector<int> indices() const {
    std::vector<int> ks;
    ks.reserve(static_cast<size_t>(2 * K + 1));
    for (int k = -K; k <= K; ++k) {
      if (k == 0 && !include_dc) continue;
      ks.push_back(k);
    }
    return ks;
  }

  /// g(t) = sum_{k in K} e^{jk w0 t} on (-T/2, T/2], zero elsewhere.
  double evaluate(double t) const {
    if (t <= -period / 2.0 || t > period / 2.0) return 0.0;
    double acc = include_dc ? 1.0 : 0.0;
    for (int k = 1; k <= K; ++k) acc += 2.0 * std::cos(k * omega0() * t);
    return acc;
  }

  /// sup_t |g(t)|, attained at t = 0 where all exponentials align.
  double sup_norm() const { return include_dc ? 2.0 * K + 1.0 : 2.0 * K; }
};

inline KernelSpec design_kernel(int K, bool include_dc, double T) {
  if (K < 1) throw config_error("kernel order K must be >= 1");
  if (T <= 0) throw config_error("period must be > 0");
  return KernelSpec{K, include_dc, T};
}

/// Output of the sampling kernel: a finite trigonometric polynomial holding
/// exactly the retained coefficients of the input signal.
struct FilteredSignal {
  FscVector fscs;
  double period = 1.0;

  double omega0() const { return fscs.omega0; }

  /// y(t) = sum_k x̂[k] e^{jk w0 t}; real by conjugate symmetry.
  double evaluate(double t) const {
    cplx acc(0.0, 0.0);
    for (size_t i = 0; i < fscs.size(); ++i) {
      acc += fscs.coeffs[i] * std::exp(cplx(0.0, fscs.indices[i] * omega0() * t));
    }
    return acc.real();
  }

  /// Antiderivative F(t) = sum_{k!=0} x̂[k] e^{jk w0 t}/(jk w0) + x̂[0] t.
  double antiderivative(double t) const {
    cplx acc(0.0, 0.0);
    for (size_t i = 0; i < fscs.size(); ++i) {
      const int k = fscs.indices[i];
      if (k == 0) {
        acc += fscs.coeffs[i] * t;
      } else {
        acc += fscs.coeffs[i] * std::exp(cplx(0.0, k * omega0() * t)) /
               cplx(0.0, k * omega0());
      }
    }
    return acc.real();
  }
};

inline FilteredSignal filter(const FriSignal& x, const KernelSpec& spec) {
  if (std::abs(spec.omega0() - x.omega0()) > 1e-12 * x.omega0())
    throw config_error("kernel and signal periods disagree");
  return FilteredSignal{fsc_range(x, spec.indices()), x.period};
}

enum class BoundMode { analytic, grid };

namespace detail {

/// Golden-section maximization of |y| on [lo, hi].
inline double golden_max_abs(const FilteredSignal& y, double lo, double hi) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = std::abs(y.evaluate(c1)), f2 = std::abs(y.evaluate(c2));
  while (b - a > 1e-12 * y.period) {
    if (f1 < f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = std::abs(y.evaluate(c2));
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = std::abs(y.evaluate(c1));
    }
  }
  return std::max(f1, f2);
}

}  // namespace detail

/// Amplitude bound c on the filtered signal. Analytic mode is the Young
/// inequality bound L a_max ||g||_inf ||h||_1; grid mode is a dense-grid
/// maximum of |y(t)| refined by golden-section search.
inline double bound_c(const FriSignal& x, const KernelSpec& spec,
                      BoundMode mode, int grid_points = 1 << 16) {
  if (mode == BoundMode::analytic) {
    return x.num_pulses() * x.a_max * spec.sup_norm() * pulse_l1_norm(x.pulse);
  }
  const FilteredSignal y = filter(x, spec);
  const double dt = x.period / grid_points;
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double v = std::abs(y.evaluate(i * dt));
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  return std::max(best, detail::golden_max_abs(y, (best_i - 1) * dt,
                                               (best_i + 1) * dt));
}

}  // namespace iftem
