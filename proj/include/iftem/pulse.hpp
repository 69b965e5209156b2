#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <variant>

#include "iftem/errors.hpp"

namespace iftem {

using cplx = std::complex<double>;

/// Dirac impulse; its spectrum is identically 1 and it carries unit mass.
struct DiracPulse {};

/// Centered B-spline of the given order, time-scaled: h(t) = beta^(n)(s t).
/// Support is [-(n+1)/(2s), (n+1)/(2s)] and the spectrum is
/// hhat(w) = (1/s) sinc^{n+1}(w / (2 pi s)) with sinc(x) = sin(pi x)/(pi x).
struct BSplinePulse {
  int order = 3;
  double scale = 1.0;  // s, in 1/seconds
};

/// Pulse known only through its sampled spectrum hhat(k w0).
struct TabulatedPulse {
  std::map<int, cplx> spectrum;  // k -> hhat(k w0)
};

using PulseShape = std::variant<DiracPulse, BSplinePulse, TabulatedPulse>;

inline double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    const double px = M_PI * x;
    return 1.0 - px * px / 6.0;
  }
  return std::sin(M_PI * x) / (M_PI * x);
}

/// Centered B-spline beta^(n)(t): (n+1)-fold convolution of the unit box,
/// evaluated by the Cox-de Boor recursion.
inline double bspline_value(int order, double t) {
  if (order == 0) {
    return (t > -0.5 && t <= 0.5) ? 1.0 : 0.0;
  }
  const double half = 0.5 * (order + 1);
  if (std::abs(t) >= half) return 0.0;
  return ((t + half) * bspline_value(order - 1, t + 0.5) +
          (half - t) * bspline_value(order - 1, t - 0.5)) /
         order;
}

/// hhat(k w0) for the pulse. Throws for tabulated pulses missing index k.
inline cplx pulse_spectrum(const PulseShape& pulse, int k, double omega0) {
  return std::visit(
      [&](const auto& p) -> cplx {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DiracPulse>) {
          return cplx(1.0, 0.0);
        } else if constexpr (std::is_same_v<P, BSplinePulse>) {
          if (p.order < 0) throw config_error("B-spline order must be >= 0");
          if (p.scale <= 0) throw config_error("B-spline scale must be > 0");
          const double x = k * omega0 / (2.0 * M_PI * p.scale);
          return cplx(std::pow(sinc(x), p.order + 1) / p.scale, 0.0);
        } else {
          auto it = p.spectrum.find(k);
          if (it == p.spectrum.end()) {
            throw precondition_error("spectrum not covered at index k=" +
                                     std::to_string(k));
          }
          return it->second;
        }
      },
      pulse);
}

/// Time-domain value h(t). Tabulated pulses are spectrum-only.
inline double pulse_value(const PulseShape& pulse, double t) {
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DiracPulse>) {
          throw precondition_error("Dirac pulse is not pointwise evaluable");
        } else if constexpr (std::is_same_v<P, BSplinePulse>) {
          return bspline_value(p.order, p.scale * t);
        } else {
          throw precondition_error(
              "tabulated pulse has no time-domain representation");
        }
      },
      pulse);
}

/// L1 norm ||h||_1; the Dirac is treated as a unit measure.
inline double pulse_l1_norm(const PulseShape& pulse) {
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DiracPulse>) {
          return 1.0;
        } else if constexpr (std::is_same_v<P, BSplinePulse>) {
          // beta^(n) >= 0 with unit integral, so ||h||_1 = 1/s.
          return 1.0 / p.scale;
        } else {
          throw precondition_error(
              "L1 norm unavailable for a tabulated spectrum");
        }
      },
      pulse);
}

/// Support length R such that h(t) = 0 for |t| >= R/2 (0 for the Dirac).
inline double pulse_support(const PulseShape& pulse) {
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DiracPulse>) {
          return 0.0;
        } else if constexpr (std::is_same_v<P, BSplinePulse>) {
          return (p.order + 1) / p.scale;
        } else {
          throw precondition_error("tabulated pulse has unknown support");
        }
      },
      pulse);
}

inline bool is_dirac(const PulseShape& pulse) {
  return std::holds_alternative<DiracPulse>(pulse);
}

}  // namespace iftem
