#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "iftem/errors.hpp"
#include "iftem/kernel.hpp"

namespace iftem {

/// Integrate-and-fire TEM parameters: bias b, integrator scale kappa,
/// threshold delta, and the amplitude bound c of the input.
struct TemParams {
  double b = 1.0;
  double kappa = 1.0;
  double delta = 1.0;
  double c = 0.0;

  void validate() const {
    if (!(kappa > 0)) throw config_error("kappa must be > 0");
    if (!(delta > 0)) throw config_error("delta must be > 0");
    if (!(c >= 0)) throw config_error("c must be >= 0");
    if (!(b > c))
      throw precondition_error("bias below signal bound (need b > c)");
  }
};

/// Ordered firing instants of one encoder run.
struct FiringRecord {
  std::vector<double> instants;
  double t_start = 0.0;
  double t_obs = 0.0;
};

/// y_n = -b (t_{n+1} - t_n) + kappa delta, one value per consecutive pair.
inline std::vector<double> measurements(const std::vector<double>& instants,
                                        const TemParams& p) {
  if (instants.size() < 2)
    throw precondition_error("need at least 2 firing instants");
  std::vector<double> y(instants.size() - 1);
  for (size_t n = 0; n + 1 < instants.size(); ++n) {
    if (!(instants[n + 1] > instants[n]))
      throw precondition_error("unordered firings");
    y[n] = -p.b * (instants[n + 1] - instants[n]) + p.kappa * p.delta;
  }
  return y;
}

/// Simulates the IF-TEM on the filtered signal. The integrator starts at 0
/// at t_start; each firing solves F(t) - F(t_n) + b (t - t_n) = kappa delta
/// where F is the closed-form antiderivative of y. The left side is strictly
/// increasing (y + b > 0), so bracketed bisection from the spacing bounds
/// kappa delta / (b +- c) is unconditionally convergent.
inline FiringRecord encode(const FilteredSignal& y, const TemParams& p,
                           double t_start, double t_obs) {
  p.validate();
  if (!(t_obs > 0)) throw config_error("observation window must be > 0");

  const double target = p.kappa * p.delta;
  const double lo_gap = target / (p.b + p.c);
  const double hi_gap = target / (p.b - p.c);
  const double tol = 1e-13 * y.period;

  FiringRecord rec;
  rec.t_start = t_start;
  rec.t_obs = t_obs;
  const double t_end = t_start + t_obs;

  double tn = t_start;
  double Fn = y.antiderivative(tn) + p.b * tn;
  while (true) {
    // The true crossing lies in [tn + lo_gap, tn + hi_gap]; pad the bracket
    // slightly against rounding in the bound c.
    double lo = tn + lo_gap * (1.0 - 1e-9);
    double hi = tn + hi_gap * (1.0 + 1e-9);
    auto G = [&](double t) { return y.antiderivative(t) + p.b * t - Fn; };
    while (G(lo) > target) lo = tn + 0.5 * (lo - tn);
    while (G(hi) < target) hi = tn + 2.0 * (hi - tn);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (G(mid) < target ? lo : hi) = mid;
    }
    tn = 0.5 * (lo + hi);
    if (tn >= t_end) break;
    rec.instants.push_back(tn);
    Fn = y.antiderivative(tn) + p.b * tn;
  }
  return rec;
}

/// Encoder over an arbitrary bounded input given as a callable, with the
/// integral computed by composite Gauss-Legendre quadrature. Used for
/// signals that have no closed-form antiderivative (nonperiodic inputs).
inline FiringRecord encode_numeric(const std::function<double(double)>& y,
                                   const TemParams& p, double t_start,
                                   double t_obs, double period_hint) {
  p.validate();
  if (!(t_obs > 0)) throw config_error("observation window must be > 0");

  // 10-point Gauss-Legendre nodes/weights on [-1, 1].
  static const double gx[5] = {0.1488743389816312, 0.4333953941292472,
                               0.6794095682990244, 0.8650633666889845,
                               0.9739065285171717};
  static const double gw[5] = {0.2955242247147529, 0.2692667193099963,
                               0.2190863625159820, 0.1494513491505806,
                               0.0666713443086881};
  auto integrate = [&](double a, double b2) {
    const int pieces = std::max(4, static_cast<int>(std::ceil(
                                       (b2 - a) / (0.02 * period_hint))));
    double total = 0.0;
    const double w = (b2 - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
      const double mid = a + (i + 0.5) * w;
      double s = 0.0;
      for (int q = 0; q < 5; ++q) {
        s += gw[q] * (y(mid + 0.5 * w * gx[q]) + y(mid - 0.5 * w * gx[q]));
      }
      total += 0.5 * w * s;
    }
    return total;
  };

  const double target = p.kappa * p.delta;
  const double lo_gap = target / (p.b + p.c);
  const double hi_gap = target / (p.b - p.c);
  const double tol = 1e-13 * period_hint;

  FiringRecord rec;
  rec.t_start = t_start;
  rec.t_obs = t_obs;
  const double t_end = t_start + t_obs;

  double tn = t_start;
  while (true) {
    double lo = tn + lo_gap * (1.0 - 1e-9);
    double hi = tn + hi_gap * (1.0 + 1e-9);
    auto G = [&](double t) { return integrate(tn, t) + p.b * (t - tn); };
    while (G(lo) > target) lo = tn + 0.5 * (lo - tn);
    while (G(hi) < target) hi = tn + 2.0 * (hi - tn);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (G(mid) < target ? lo : hi) = mid;
    }
    tn = 0.5 * (lo + hi);
    if (tn >= t_end) break;
    rec.instants.push_back(tn);
  }
  return rec;
}

/// Firing-rate design check: perfect recovery needs the minimum firing rate
/// (b - c)/(kappa delta) to reach (2K + 2)/T.
struct RateCheck {
  bool ok = false;
  double min_rate = 0.0;
  double max_rate = 0.0;
  double required = 0.0;
};

inline RateCheck validate_rate(const TemParams& p, int K, double T) {
  p.validate();
  RateCheck r;
  r.min_rate = (p.b - p.c) / (p.kappa * p.delta);
  r.max_rate = (p.b + p.c) / (p.kappa * p.delta);
  r.required = (2.0 * K + 2.0) / T;
  r.ok = r.min_rate >= r.required;
  return r;
}

/// Largest threshold delta meeting the minimum-rate condition, shrunk by a
/// safety factor.
inline double suggest_delta(double b, double kappa, double c, int K, double T,
                            double safety = 0.9) {
  if (!(b > c)) throw precondition_error("bias below signal bound (need b > c)");
  return safety * (b - c) * T / (kappa * (2.0 * K + 2.0));
}

}  // namespace iftem
