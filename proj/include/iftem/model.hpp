#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "iftem/errors.hpp"
#include "iftem/pulse.hpp"

namespace iftem {

/// T-periodic FRI signal: x(t) = sum_p sum_l a_l h(t - tau_l - pT).
/// Immutable after construction; amplitudes may be signed.
struct FriSignal {
  PulseShape pulse;
  std::vector<double> amplitudes;
  std::vector<double> delays;  // each in [0, T)
  double period = 1.0;
  double a_max = 0.0;  // defaults to max |a_l|

  FriSignal(PulseShape p, std::vector<double> a, std::vector<double> tau,
            double T, double amax = 0.0)
      : pulse(std::move(p)),
        amplitudes(std::move(a)),
        delays(std::move(tau)),
        period(T),
        a_max(amax) {
    if (period <= 0) throw config_error("period must be > 0");
    if (amplitudes.size() != delays.size())
      throw config_error("amplitudes and delays must have equal length");
    if (amplitudes.empty()) throw config_error("signal needs at least 1 pulse");
    for (double tau_l : delays) {
      if (tau_l < 0 || tau_l >= period)
        throw config_error("delays must lie in [0, T)");
    }
    if (a_max == 0.0) {
      for (double a_l : amplitudes) a_max = std::max(a_max, std::abs(a_l));
    }
  }

  int num_pulses() const { return static_cast<int>(amplitudes.size()); }
  double omega0() const { return 2.0 * M_PI / period; }
};

/// Indexed Fourier-series coefficients x̂[k] over a sorted index set.
struct FscVector {
  std::vector<int> indices;  // sorted ascending
  std::vector<cplx> coeffs;
  double omega0 = 2.0 * M_PI;

  const cplx& at(int k) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), k);
    if (it == indices.end() || *it != k)
      throw precondition_error("coefficient index " + std::to_string(k) +
                               " not present");
    return coeffs[static_cast<size_t>(it - indices.begin())];
  }

  bool has(int k) const {
    return std::binary_search(indices.begin(), indices.end(), k);
  }

  size_t size() const { return indices.size(); }
};

/// x̂[k] = (1/T) hhat(k w0) sum_l a_l e^{-j k w0 tau_l}.
inline cplx fsc(const FriSignal& x, int k) {
  const double w0 = x.omega0();
  cplx s(0.0, 0.0);
  for (size_t l = 0; l < x.amplitudes.size(); ++l) {
    s += x.amplitudes[l] * std::exp(cplx(0.0, -k * w0 * x.delays[l]));
  }
  return pulse_spectrum(x.pulse, k, w0) * s / x.period;
}

inline FscVector fsc_range(const FriSignal& x, const std::vector<int>& ks) {
  FscVector out;
  out.indices = ks;
  out.omega0 = x.omega0();
  out.coeffs.reserve(ks.size());
  for (int k : ks) out.coeffs.push_back(fsc(x, k));
  return out;
}

/// x̂[k] / hhat(k w0): the pure sum-of-exponentials sequence used by the
/// spectral-estimation step. Throws when the pulse spectrum is (near) zero
/// at some index; the cutoff is relative to the largest |hhat| on the set.
inline FscVector ratio_sequence(const FscVector& fscs, const PulseShape& pulse,
                                double rel_tol = 1e-10) {
  double hmax = 0.0;
  std::vector<cplx> h(fscs.indices.size());
  for (size_t i = 0; i < fscs.indices.size(); ++i) {
    h[i] = pulse_spectrum(pulse, fscs.indices[i], fscs.omega0);
    hmax = std::max(hmax, std::abs(h[i]));
  }
  FscVector out;
  out.indices = fscs.indices;
  out.omega0 = fscs.omega0;
  out.coeffs.resize(fscs.size());
  for (size_t i = 0; i < fscs.size(); ++i) {
    if (std::abs(h[i]) <= rel_tol * hmax) {
      throw precondition_error("vanishing pulse spectrum at index k=" +
                               std::to_string(fscs.indices[i]));
    }
    out.coeffs[i] = fscs.coeffs[i] / h[i];
  }
  return out;
}

/// Partial Fourier synthesis sum_{|k|<=truncation} x̂[k] e^{jk w0 t}.
/// Dirac signals are compared in parameter space, never pointwise.
inline double evaluate(const FriSignal& x, double t, int truncation) {
  if (truncation < 1) throw config_error("truncation must be >= 1");
  if (is_dirac(x.pulse))
    throw precondition_error("Dirac signal is not pointwise evaluable");
  const double w0 = x.omega0();
  // e^{jkw0 t} by recurrence over k; the k and -k terms pair up into reals.
  const cplx step = std::exp(cplx(0.0, w0 * t));
  cplx ek(1.0, 0.0);
  double acc = fsc(x, 0).real();
  for (int k = 1; k <= truncation; ++k) {
    ek *= step;
    acc += 2.0 * (fsc(x, k) * ek).real();
  }
  return acc;
}

}  // namespace iftem
