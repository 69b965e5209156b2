#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iftem/encoder.hpp"
#include "iftem/errors.hpp"
#include "iftem/kernel.hpp"
#include "iftem/model.hpp"

namespace iftem {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

enum class MatrixKind { A, B };

/// Linear map from the scaled Fourier coefficients to the interval
/// measurements y_n. Row n holds e^{jk w0 t_{n+1}} - e^{jk w0 t_n} per
/// frequency column; kind A keeps the DC column t_{n+1} - t_n, kind B
/// drops it.
struct MeasurementMatrix {
  MatrixKind kind = MatrixKind::A;
  MatrixXc entries;
  std::vector<double> instants;
  int K = 1;
  double omega0 = 2.0 * M_PI;

  std::vector<int> column_indices() const {
    std::vector<int> ks;
    for (int k = -K; k <= K; ++k) {
      if (k == 0 && kind == MatrixKind::B) continue;
      ks.push_back(k);
    }
    return ks;
  }

  /// The (N-1) x N forward-difference operator of the A = D V factorization.
  Eigen::MatrixXd difference_factor() const {
    const auto N = static_cast<Eigen::Index>(instants.size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N - 1, N);
    for (Eigen::Index n = 0; n < N - 1; ++n) {
      D(n, n) = -1.0;
      D(n, n + 1) = 1.0;
    }
    return D;
  }

  /// The N x |K| node matrix V: row n is [e^{jk w0 t_n}]_k with the DC
  /// column replaced by t_n (kind A only).
  MatrixXc node_factor() const {
    const auto ks = column_indices();
    const auto N = static_cast<Eigen::Index>(instants.size());
    MatrixXc V(N, static_cast<Eigen::Index>(ks.size()));
    for (Eigen::Index n = 0; n < N; ++n) {
      for (size_t c = 0; c < ks.size(); ++c) {
        const int k = ks[c];
        V(n, static_cast<Eigen::Index>(c)) =
            k == 0 ? cplx(instants[static_cast<size_t>(n)], 0.0)
                   : std::exp(cplx(0.0, k * omega0 *
                                            instants[static_cast<size_t>(n)]));
      }
    }
    return V;
  }
};

inline MeasurementMatrix build_matrix(const std::vector<double>& instants,
                                      int K, double omega0, MatrixKind kind) {
  if (instants.size() < 2)
    throw precondition_error("need at least 2 firing instants");
  for (size_t n = 0; n + 1 < instants.size(); ++n) {
    if (!(instants[n + 1] > instants[n]))
      throw precondition_error("unordered firings");
  }
  const double T = 2.0 * M_PI / omega0;
  if (instants.back() - instants.front() > T)
    throw precondition_error("window exceeds one period");

  MeasurementMatrix m;
  m.kind = kind;
  m.instants = instants;
  m.K = K;
  m.omega0 = omega0;
  m.entries = m.difference_factor() * m.node_factor();
  return m;
}

/// Result of the pseudoinverse solve: coefficients plus diagnostics.
struct FscSolution {
  FscVector fscs;
  double condition_number = 1.0;
  double residual = 0.0;
  double asymmetry = 0.0;  // max |x̂[k] - x̂[-k]*| before symmetrization
};

/// Least-squares solve y = M x̄ via SVD (singular values below
/// 1e-12 sigma_max truncated), un-scaling x̄[k] = x̂[k]/(jk w0) back to
/// plain coefficients and enforcing exact conjugate symmetry by averaging.
inline FscSolution solve_fsc(const MeasurementMatrix& m,
                             const std::vector<double>& y) {
  if (static_cast<Eigen::Index>(y.size()) != m.entries.rows())
    throw config_error("measurement vector length does not match matrix");

  VectorXc rhs(m.entries.rows());
  for (size_t i = 0; i < y.size(); ++i)
    rhs(static_cast<Eigen::Index>(i)) = cplx(y[i], 0.0);

  Eigen::JacobiSVD<MatrixXc> svd(m.entries,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  svd.setThreshold(1e-12);
  const VectorXc xbar = svd.solve(rhs);

  FscSolution sol;
  sol.condition_number =
      sv(sv.size() - 1) > 0 ? smax / sv(sv.size() - 1)
                            : std::numeric_limits<double>::infinity();
  sol.residual = (m.entries * xbar - rhs).norm();

  const auto ks = m.column_indices();
  FscVector raw;
  raw.indices = ks;
  raw.omega0 = m.omega0;
  raw.coeffs.resize(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) {
    const int k = ks[i];
    const cplx v = xbar(static_cast<Eigen::Index>(i));
    raw.coeffs[i] = k == 0 ? v : v * cplx(0.0, k * m.omega0);
  }
  // Symmetrize: x̂[k] <- (x̂[k] + x̂[-k]*)/2.
  FscVector sym = raw;
  for (size_t i = 0; i < ks.size(); ++i) {
    const cplx mirror = std::conj(raw.at(-ks[i]));
    sol.asymmetry = std::max(sol.asymmetry, std::abs(raw.coeffs[i] - mirror));
    sym.coeffs[i] = 0.5 * (raw.coeffs[i] + mirror);
  }
  sol.fscs = std::move(sym);
  return sol;
}

enum class RecoveryMethod { annihilating, omp };

/// Estimated FRI parameters, sorted by delay.
struct RecoveredParams {
  std::vector<double> amplitudes;
  std::vector<double> delays;
  double residual = 0.0;
  double condition_number = 1.0;
  RecoveryMethod method = RecoveryMethod::annihilating;
};

namespace detail {

/// Longest run of consecutive indices within a sorted index list; returns
/// {start offset, length}.
inline std::pair<size_t, size_t> longest_consecutive_run(
    const std::vector<int>& ks) {
  size_t best_start = 0, best_len = ks.empty() ? 0 : 1;
  size_t start = 0;
  for (size_t i = 1; i < ks.size(); ++i) {
    if (ks[i] != ks[i - 1] + 1) start = i;
    if (i - start + 1 > best_len) {
      best_len = i - start + 1;
      best_start = start;
    }
  }
  return {best_start, best_len};
}

/// Roots of a polynomial c0 z^L + c1 z^{L-1} + ... + cL via the companion
/// matrix.
inline std::vector<cplx> polynomial_roots(const std::vector<cplx>& c) {
  const auto L = static_cast<Eigen::Index>(c.size()) - 1;
  MatrixXc comp = MatrixXc::Zero(L, L);
  for (Eigen::Index i = 0; i < L; ++i) {
    comp(0, i) = -c[static_cast<size_t>(i) + 1] / c[0];
    if (i + 1 < L) comp(i + 1, i) = cplx(1.0, 0.0);
  }
  Eigen::ComplexEigenSolver<MatrixXc> es(comp);
  std::vector<cplx> roots(static_cast<size_t>(L));
  for (Eigen::Index i = 0; i < L; ++i)
    roots[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

/// Least-squares amplitudes for fixed delays, fitting the available ratio
/// samples r[k] = (1/T) sum_l a_l e^{-jk w0 tau_l}.
inline std::vector<double> amplitude_ls(const std::vector<int>& ks,
                                        const std::vector<cplx>& r,
                                        const std::vector<double>& taus,
                                        double omega0, double T,
                                        double* residual = nullptr) {
  const auto M = static_cast<Eigen::Index>(ks.size());
  const auto L = static_cast<Eigen::Index>(taus.size());
  MatrixXc V(M, L);
  VectorXc rhs(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    rhs(i) = r[static_cast<size_t>(i)];
    for (Eigen::Index l = 0; l < L; ++l) {
      V(i, l) = std::exp(cplx(0.0, -ks[static_cast<size_t>(i)] * omega0 *
                                       taus[static_cast<size_t>(l)])) /
                T;
    }
  }
  Eigen::JacobiSVD<MatrixXc> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  const VectorXc a = svd.solve(rhs);
  if (residual) *residual = (V * a - rhs).norm();
  std::vector<double> out(static_cast<size_t>(L));
  for (Eigen::Index l = 0; l < L; ++l)
    out[static_cast<size_t>(l)] = a(l).real();
  return out;
}

inline void sort_by_delay(RecoveredParams& p) {
  std::vector<size_t> order(p.delays.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t i, size_t j) { return p.delays[i] < p.delays[j]; });
  RecoveredParams sorted = p;
  for (size_t i = 0; i < order.size(); ++i) {
    sorted.amplitudes[i] = p.amplitudes[order[i]];
    sorted.delays[i] = p.delays[order[i]];
  }
  p = std::move(sorted);
}

}  // namespace detail

/// Annihilating-filter (Prony) recovery from a sum-of-exponentials ratio
/// sequence. Uses the longest consecutive index run, solves the Toeplitz
/// annihilation system by total least squares (smallest right singular
/// vector), roots the filter, projects roots onto the unit circle, and
/// fits amplitudes over all available indices.
inline RecoveredParams annihilating_filter(const FscVector& ratios, int L,
                                           double T) {
  if (L < 1) throw config_error("model order L must be >= 1");
  auto [start, len] = detail::longest_consecutive_run(ratios.indices);
  if (len < static_cast<size_t>(2 * L))
    throw precondition_error(
        "insufficient consecutive coefficients: need at least " +
        std::to_string(2 * L) + ", have " + std::to_string(len));
  // 2L+1 consecutive samples suffice; use up to that many from the run.
  const size_t use = std::min(len, static_cast<size_t>(2 * L + 1));

  const auto rows = static_cast<Eigen::Index>(use - L);
  MatrixXc toep(rows, L + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j <= L; ++j) {
      toep(i, j) = ratios.coeffs[start + static_cast<size_t>(i) +
                                 static_cast<size_t>(L - j)];
    }
  }
  Eigen::JacobiSVD<MatrixXc> svd(toep, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (L >= 2 && sv(sv.size() - 2) < 1e-10 * sv(0))
    throw numeric_error("model order mismatch: annihilation system is rank "
                        "deficient beyond one null vector");
  std::vector<cplx> filt(static_cast<size_t>(L) + 1);
  for (Eigen::Index j = 0; j <= L; ++j)
    filt[static_cast<size_t>(j)] = svd.matrixV()(j, L);

  auto roots = detail::polynomial_roots(filt);
  std::sort(roots.begin(), roots.end(), [](const cplx& a, const cplx& b) {
    return std::arg(a) < std::arg(b);
  });

  const double w0 = ratios.omega0;
  RecoveredParams out;
  out.method = RecoveryMethod::annihilating;
  out.delays.reserve(roots.size());
  for (cplx u : roots) {
    u /= std::abs(u);
    double tau = std::fmod(-T * std::arg(u) / (2.0 * M_PI), T);
    if (tau < 0) tau += T;
    if (tau > T - 1e-12) tau = 0.0;
    out.delays.push_back(tau);
  }
  out.amplitudes = detail::amplitude_ls(ratios.indices, ratios.coeffs,
                                        out.delays, w0, T, &out.residual);
  detail::sort_by_delay(out);
  return out;
}

/// On-grid sparse recovery by orthogonal matching pursuit over the delay
/// grid {0, Delta, ..., T - Delta}. The dictionary may use non-consecutive
/// frequency indices, which is what makes the DC-free path work with K >= L.
inline RecoveredParams omp_recover(const FscVector& fscs,
                                   const PulseShape& pulse, int L,
                                   double grid_resolution, double T,
                                   bool* coherence_warning = nullptr) {
  if (L < 1) throw config_error("model order L must be >= 1");
  const int G = static_cast<int>(std::round(T / grid_resolution));
  if (L > G) throw config_error("model order exceeds number of grid points");

  const double w0 = fscs.omega0;
  const auto M = static_cast<Eigen::Index>(fscs.size());
  MatrixXc D(M, G);
  for (int m = 0; m < G; ++m) {
    const double tau = m * grid_resolution;
    for (Eigen::Index i = 0; i < M; ++i) {
      const int k = fscs.indices[static_cast<size_t>(i)];
      D(i, m) = pulse_spectrum(pulse, k, w0) *
                std::exp(cplx(0.0, -k * w0 * tau)) / T;
    }
  }
  VectorXc x(M);
  for (Eigen::Index i = 0; i < M; ++i)
    x(i) = fscs.coeffs[static_cast<size_t>(i)];

  Eigen::VectorXd norms = D.colwise().norm();
  std::vector<int> support;
  VectorXc resid = x;
  VectorXc coeffs;
  for (int it = 0; it < L; ++it) {
    int best = -1;
    double best_corr = -1.0;
    for (int m = 0; m < G; ++m) {
      if (std::find(support.begin(), support.end(), m) != support.end())
        continue;
      const double corr = std::abs(D.col(m).dot(resid)) / norms(m);
      if (corr > best_corr) {
        best_corr = corr;
        best = m;
      }
    }
    support.push_back(best);
    MatrixXc Ds(M, static_cast<Eigen::Index>(support.size()));
    for (size_t s = 0; s < support.size(); ++s)
      Ds.col(static_cast<Eigen::Index>(s)) = D.col(support[s]);
    coeffs = Ds.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(x);
    resid = x - Ds * coeffs;
  }

  if (coherence_warning) {
    *coherence_warning = false;
    for (size_t i = 0; i < support.size(); ++i) {
      for (size_t j = i + 1; j < support.size(); ++j) {
        const double mu = std::abs(D.col(support[i]).dot(D.col(support[j]))) /
                          (norms(support[i]) * norms(support[j]));
        if (mu > 0.999) *coherence_warning = true;
      }
    }
  }

  RecoveredParams out;
  out.method = RecoveryMethod::omp;
  out.residual = resid.norm();
  for (size_t s = 0; s < support.size(); ++s) {
    out.delays.push_back(support[s] * grid_resolution);
    out.amplitudes.push_back(coeffs(static_cast<Eigen::Index>(s)).real());
  }
  detail::sort_by_delay(out);
  return out;
}

namespace detail {

inline void require_enough_firings(size_t n_instants, int K) {
  if (n_instants < static_cast<size_t>(2 * K + 2))
    throw precondition_error(
        "recovery requires N >= 2K+2 spike times: have N = " +
        std::to_string(n_instants) + ", need " + std::to_string(2 * K + 2));
}

}  // namespace detail

/// Full recovery chain for the DC-inclusive kernel: measurements ->
/// matrix A pseudoinverse -> ratio sequence -> annihilating filter.
/// Requires N >= 2K+2 firings and K >= L.
inline RecoveredParams reconstruct_with_dc(const std::vector<double>& firings,
                                           const TemParams& params, int K,
                                           const PulseShape& pulse, int L,
                                           double T) {
  detail::require_enough_firings(firings.size(), K);
  if (K < L)
    throw precondition_error("with-DC recovery requires K >= L");
  const double w0 = 2.0 * M_PI / T;
  const auto y = measurements(firings, params);
  const auto m = build_matrix(firings, K, w0, MatrixKind::A);
  auto sol = solve_fsc(m, y);
  auto params_hat = annihilating_filter(ratio_sequence(sol.fscs, pulse), L, T);
  params_hat.condition_number = sol.condition_number;
  return params_hat;
}

/// Full recovery chain for the DC-free kernel: measurements -> matrix B
/// pseudoinverse -> annihilating filter on the positive-index ratio block
/// (off-grid, needs K >= 2L) or OMP on the full index set (on-grid,
/// needs K >= L).
inline RecoveredParams reconstruct_no_dc(const std::vector<double>& firings,
                                         const TemParams& params, int K,
                                         const PulseShape& pulse, int L,
                                         double T, bool delays_on_grid = false,
                                         double grid_resolution = 0.01) {
  detail::require_enough_firings(firings.size(), K);
  if (!delays_on_grid && K < 2 * L)
    throw precondition_error(
        "off-grid DC-free recovery requires K >= 2L (have K = " +
        std::to_string(K) + ", L = " + std::to_string(L) + ")");
  if (delays_on_grid && K < L)
    throw precondition_error("on-grid DC-free recovery requires K >= L");

  const double w0 = 2.0 * M_PI / T;
  const auto y = measurements(firings, params);
  const auto m = build_matrix(firings, K, w0, MatrixKind::B);
  auto sol = solve_fsc(m, y);

  RecoveredParams params_hat;
  if (delays_on_grid) {
    params_hat =
        omp_recover(sol.fscs, pulse, L, grid_resolution, T);
  } else {
    // Positive index block {1..K} is consecutive; the negative block is
    // its conjugate mirror and adds no information.
    FscVector pos;
    pos.omega0 = sol.fscs.omega0;
    for (size_t i = 0; i < sol.fscs.size(); ++i) {
      if (sol.fscs.indices[i] >= 1) {
        pos.indices.push_back(sol.fscs.indices[i]);
        pos.coeffs.push_back(sol.fscs.coeffs[i]);
      }
    }
    params_hat = annihilating_filter(ratio_sequence(pos, pulse), L, T);
  }
  params_hat.condition_number = sol.condition_number;
  return params_hat;
}

/// Compactly supported periodization g~(t) = sum_{s=-S}^{S} g(t + sT) of the
/// SoS kernel, sized so that filtering a nonperiodic pulse stream with g~
/// reproduces the periodic-case filtered signal on [0, T).
struct PeriodizedKernel {
  KernelSpec base;
  int shifts = 1;  // S

  double evaluate(double t) const {
    double acc = 0.0;
    for (int s = -shifts; s <= shifts; ++s)
      acc += base.evaluate(t + s * base.period);
    return acc;
  }
};

inline PeriodizedKernel periodize_kernel(const KernelSpec& spec,
                                         double pulse_support_R, double T) {
  if (!(pulse_support_R >= 0) || !std::isfinite(pulse_support_R))
    throw precondition_error("periodization requires a finite-support pulse");
  const int S = static_cast<int>(std::ceil((pulse_support_R / T + 1.0) / 2.0)) + 1;
  return PeriodizedKernel{spec, std::max(1, S)};
}

}  // namespace iftem
