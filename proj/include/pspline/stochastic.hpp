#pragma once

// Periodic Gaussian white noise, Gaussian bridges and the noisy measurement
// model, plus the closed-form MSE available for Fourier sampling.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pspline/error.hpp"
#include "pspline/random.hpp"
#include "pspline/rkhs.hpp"
#include "pspline/spectral.hpp"

namespace pspline {

/// Fourier coefficients w^[k], |k| <= n_coef, of a unit periodic Gaussian
/// white noise. Hermitian; Re/Im ~ N(0, 1/2) for k > 0 and w^[0] ~ N(0, 1).
struct NoiseDraw {
  int n_coef = 0;
  std::vector<Complex> coeffs;
  std::uint64_t seed = 0;

  Complex operator[](int k) const { return coeffs[static_cast<std::size_t>(k + n_coef)]; }
};

inline NoiseDraw draw_white_noise(int n_coef, RandomStream& rng) {
  if (n_coef < 0) throw InvalidParameter("band limit must be nonnegative");
  NoiseDraw w{n_coef, std::vector<Complex>(static_cast<std::size_t>(2 * n_coef + 1)), rng.seed()};
  const double half = std::sqrt(0.5);
  w.coeffs[n_coef] = rng.normal();
  for (int k = 1; k <= n_coef; ++k) {
    const double re = half * rng.normal();
    const double im = half * rng.normal();
    w.coeffs[n_coef + k] = {re, im};
    w.coeffs[n_coef - k] = {re, -im};
  }
  return w;
}

/// A realization s of the Gaussian bridge for (L, gamma0):
/// s^[k] = w^[k] / L^[k] off the null space, w^[k_n] / gamma0 on it.
struct BridgeDraw {
  PeriodicSignal signal;
  OperatorSpec op;
  double gamma0 = 1.0;
  NoiseDraw noise;
};

/// Bridge from an existing noise draw, so several models can share one
/// innovation.
inline BridgeDraw synthesize_bridge(const OperatorSpec& op, double gamma0, NoiseDraw noise) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw InvalidParameter("gamma0 must be positive");
  }
  const int n = noise.n_coef;
  std::vector<Complex> c(static_cast<std::size_t>(2 * n + 1));
  for (int k = -n; k <= n; ++k) {
    c[k + n] = op.in_null_space(k) ? noise[k] / gamma0 : noise[k] / op.response(k);
  }
  return BridgeDraw{PeriodicSignal(n, std::move(c), true), op, gamma0, std::move(noise)};
}

inline BridgeDraw draw_bridge(const OperatorSpec& op, double gamma0, int n_coef,
                              RandomStream& rng) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw InvalidParameter("gamma0 must be positive");
  }
  return synthesize_bridge(op, gamma0, draw_white_noise(n_coef, rng));
}

/// E||s||^2 = sum_k h_{gamma0}^[k] over the band.
inline double bridge_energy(const KernelSpec& h) {
  const auto& c = h.coeffs();
  return std::accumulate(c.begin(), c.end(), 0.0);
}

/// Energy the band limit leaves out: sum_{|k| > n_coef} 1/|L^[k]|^2.
/// Summed explicitly up to 64 n_coef, then closed with the integral of the
/// asymptotic power law. Infinite for degree-0 operators.
inline double tail_energy(const OperatorSpec& op, int n_coef) {
  if (op.degree() < 1) return std::numeric_limits<double>::infinity();
  const int stop = 64 * std::max(n_coef, 1);
  double acc = 0.0;
  for (int k = n_coef + 1; k <= stop; ++k) {
    acc += 1.0 / std::norm(op.response(k)) + 1.0 / std::norm(op.response(-k));
  }
  const double last = 1.0 / std::norm(op.response(stop)) + 1.0 / std::norm(op.response(-stop));
  acc += last * stop / (2.0 * op.degree() - 1.0);
  return acc;
}

struct MeasurementDraw {
  /// Real for time samples; Hermitian-paired for Fourier samples.
  Eigen::VectorXcd y;
  double sigma0_sq = 0.0;
  Eigen::VectorXcd epsilon;
};

/// y = <s, nu> + eps. Time samples get i.i.d. N(0, sigma0^2) noise. Fourier
/// samples get complex noise with E|eps_m|^2 = sigma0^2, real at k = 0 and
/// conjugate-paired between k and -k.
inline MeasurementDraw measure(const BridgeDraw& bridge, const MeasurementSet& meas,
                               double sigma0_sq, RandomStream& rng) {
  if (!(sigma0_sq >= 0.0) || !std::isfinite(sigma0_sq)) {
    throw InvalidParameter("sigma0^2 must be nonnegative");
  }
  if (meas.kind() == MeasurementKind::TimeSamples && bridge.op.degree() < 1) {
    throw NotAdmissible("time samples of a " + bridge.op.name() + " bridge are not defined");
  }
  const auto M = static_cast<Eigen::Index>(meas.size());
  const double sigma = std::sqrt(sigma0_sq);
  MeasurementDraw out{Eigen::VectorXcd(M), sigma0_sq, Eigen::VectorXcd::Zero(M)};

  switch (meas.kind()) {
    case MeasurementKind::TimeSamples: {
      for (Eigen::Index m = 0; m < M; ++m) {
        out.epsilon[m] = sigma * rng.normal();
        const double clean = evaluate(bridge.signal, meas.locations()[m]).real();
        out.y[m] = clean + out.epsilon[m];
      }
      break;
    }
    case MeasurementKind::FourierSamples: {
      const double half = sigma * std::sqrt(0.5);
      std::map<int, Complex> drawn;
      for (Eigen::Index m = 0; m < M; ++m) {
        const int k = meas.indices()[m];
        const int key = std::abs(k);
        auto it = drawn.find(key);
        if (it == drawn.end()) {
          Complex e = key == 0 ? Complex{sigma * rng.normal(), 0.0}
                               : Complex{half * rng.normal(), half * rng.normal()};
          it = drawn.emplace(key, k >= 0 ? e : std::conj(e)).first;
        }
        out.epsilon[m] = k >= 0 ? it->second : std::conj(it->second);
        out.y[m] = bridge.signal[k] + out.epsilon[m];
      }
      break;
    }
    case MeasurementKind::Generic: {
      const bool real = meas.real_valued();
      const double half = sigma * std::sqrt(0.5);
      for (Eigen::Index m = 0; m < M; ++m) {
        if (real) {
          out.epsilon[m] = sigma * rng.normal();
          out.y[m] = meas.apply(static_cast<std::size_t>(m), bridge.signal).real() + out.epsilon[m];
        } else {
          out.epsilon[m] = Complex{half * rng.normal(), half * rng.normal()};
          out.y[m] = meas.apply(static_cast<std::size_t>(m), bridge.signal) + out.epsilon[m];
        }
      }
      break;
    }
  }
  return out;
}

/// Expected ||s - s_lambda||^2 for Fourier sampling of a bridge whose
/// operator is invertible:
///   sum_m h[k_m] (lambda^2 + h[k_m] sigma0^2) / (h[k_m] + lambda)^2
///   + sum over unsampled |k| <= n_coef of h[k].
inline double closed_form_fourier_mse(const OperatorSpec& op, const MeasurementSet& sampled,
                                      double lambda, double sigma0_sq, int n_coef) {
  if (op.null_dim() != 0) {
    throw UnsupportedOperator("closed-form Fourier MSE needs an invertible operator, " +
                              op.name() + " has a null space");
  }
  if (sampled.kind() != MeasurementKind::FourierSamples) {
    throw InvalidInput("closed-form MSE is defined for Fourier samples");
  }
  if (!(lambda > 0.0)) throw InvalidParameter("lambda must be positive");
  if (!(sigma0_sq >= 0.0)) throw InvalidParameter("sigma0^2 must be nonnegative");

  const KernelSpec h(op, 1.0, n_coef);
  double mse = 0.0;
  std::vector<bool> used(static_cast<std::size_t>(2 * n_coef + 1), false);
  for (int k : sampled.indices()) {
    if (k < -n_coef || k > n_coef) throw InvalidInput("sampled index outside band");
    used[k + n_coef] = true;
    const double hk = h[k];
    const double shrink = lambda / (hk + lambda);
    const double keep = hk / (hk + lambda);
    mse += hk * shrink * shrink + sigma0_sq * keep * keep;
  }
  for (int k = -n_coef; k <= n_coef; ++k) {
    if (!used[k + n_coef]) mse += h[k];
  }
  return mse;
}

/// (sum errors) / (sum energies).
inline double nmse(std::span<const double> errors, std::span<const double> energies) {
  if (errors.empty()) throw InvalidInput("nmse: no trials");
  if (errors.size() != energies.size()) throw InvalidInput("nmse: length mismatch");
  const double e = std::accumulate(errors.begin(), errors.end(), 0.0);
  const double s = std::accumulate(energies.begin(), energies.end(), 0.0);
  if (!(s > 0.0)) throw InvalidInput("nmse: zero total energy");
  return e / s;
}

/// Delta-method standard error of the ratio estimator above.
inline double nmse_standard_error(std::span<const double> errors,
                                  std::span<const double> energies) {
  const double ratio = nmse(errors, energies);
  const auto n = static_cast<double>(errors.size());
  if (errors.size() < 2) return 0.0;
  const double mean_energy = std::accumulate(energies.begin(), energies.end(), 0.0) / n;
  double acc = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double r = errors[i] - ratio * energies[i];
    acc += r * r;
  }
  return std::sqrt(acc / (n - 1.0) / n) / mean_energy;
}

}  // namespace pspline
