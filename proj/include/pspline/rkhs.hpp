#pragma once

// Reproducing kernel of the native space H_L, measurement functionals, and
// the Gram / null-space matrices that the solvers consume.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pspline/error.hpp"
#include "pspline/spectral.hpp"

namespace pspline {

struct Admissibility {
  bool admissible = false;
  /// sum over k outside the null space, |k| <= n_coef, of 1/|L^[k]|^2.
  double partial_sum = 0.0;
};

/// H_L is a RKHS iff sum 1/|L^[k]|^2 converges. For polynomial responses
/// this is exactly degree >= 1; the partial sum is reported as a diagnostic.
inline Admissibility rkhs_admissible(const OperatorSpec& op, int n_coef) {
  Admissibility out;
  for (int k = -n_coef; k <= n_coef; ++k) {
    if (!op.in_null_space(k)) out.partial_sum += 1.0 / std::norm(op.response(k));
  }
  out.admissible = op.degree() >= 1;
  return out;
}

/// Fourier coefficients of the reproducing kernel h_gamma:
/// 1/gamma^2 on the null space, 1/|L^[k]|^2 elsewhere.
class KernelSpec {
 public:
  KernelSpec(OperatorSpec op, double gamma, int n_coef)
      : op_(std::move(op)), gamma_(gamma), n_coef_(n_coef) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw InvalidParameter("gamma must be positive");
    }
    if (n_coef < 0) throw InvalidParameter("band limit must be nonnegative");
    coeffs_.resize(static_cast<std::size_t>(2 * n_coef + 1));
    for (int k = -n_coef; k <= n_coef; ++k) {
      coeffs_[k + n_coef] = op_.in_null_space(k) ? 1.0 / (gamma * gamma)
                                                 : 1.0 / std::norm(op_.response(k));
    }
  }

  const OperatorSpec& op() const noexcept { return op_; }
  double gamma() const noexcept { return gamma_; }
  int n_coef() const noexcept { return n_coef_; }

  double operator[](int k) const noexcept {
    return (k < -n_coef_ || k > n_coef_) ? 0.0 : coeffs_[k + n_coef_];
  }
  /// h^[k] with the null-space terms removed.
  double off_null(int k) const noexcept { return op_.in_null_space(k) ? 0.0 : (*this)[k]; }

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  /// Same operator and band, different gamma.
  KernelSpec with_gamma(double gamma) const { return KernelSpec(op_, gamma, n_coef_); }

 private:
  OperatorSpec op_;
  double gamma_;
  int n_coef_;
  std::vector<double> coeffs_;
};

inline KernelSpec build_kernel(const OperatorSpec& op, double gamma, int n_coef) {
  return KernelSpec(op, gamma, n_coef);
}

/// h_gamma(t) = sum_k h^[k] e^{j 2 pi k t}; real and even.
inline double kernel_value(const KernelSpec& h, double t) {
  double acc = h[0];
  for (int k = 1; k <= h.n_coef(); ++k) {
    double phase = static_cast<double>(k) * t;
    phase -= std::floor(phase);
    acc += (h[k] + h[-k]) * std::cos(kTwoPi * phase);
  }
  return acc;
}

/// h_gamma(. - t0) as a signal.
inline PeriodicSignal shifted_kernel(const KernelSpec& h, double t0) {
  const int n = h.n_coef();
  std::vector<Complex> c(static_cast<std::size_t>(2 * n + 1));
  for (int k = -n; k <= n; ++k) c[k + n] = h[k] * unit_phasor(-k, t0);
  return PeriodicSignal(n, std::move(c), true);
}

enum class MeasurementKind { TimeSamples, FourierSamples, Generic };

inline const char* to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::TimeSamples:
      return "time";
    case MeasurementKind::FourierSamples:
      return "fourier";
    case MeasurementKind::Generic:
      return "generic";
  }
  return "?";
}

/// M linear functionals nu_m. A measurement of f is
/// <f, nu_m> = sum_k f^[k] conj(nu^_m[k]).
class MeasurementSet {
 public:
  /// nu_m = Sha(. - t_m). Locations are wrapped into [0, 1) and must be distinct.
  static MeasurementSet time_samples(std::vector<double> locations) {
    if (locations.empty()) throw InvalidInput("at least one measurement is required");
    for (auto& t : locations) {
      if (!std::isfinite(t)) throw InvalidInput("non-finite sample location");
      t -= std::floor(t);
      if (t >= 1.0) t = 0.0;
    }
    auto sorted = locations;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvalidInput("duplicate sample locations");
    }
    MeasurementSet m(MeasurementKind::TimeSamples);
    m.locations_ = std::move(locations);
    return m;
  }

  /// nu_m = e_{k_m}; the index set must be closed under negation.
  static MeasurementSet fourier_samples(std::vector<int> indices) {
    if (indices.empty()) throw InvalidInput("at least one measurement is required");
    std::set<int> seen(indices.begin(), indices.end());
    if (seen.size() != indices.size()) throw InvalidInput("duplicate Fourier indices");
    for (int k : indices) {
      if (!seen.count(-k)) {
        throw InvalidInput("Fourier index set must be closed under negation (missing " +
                           std::to_string(-k) + ")");
      }
    }
    MeasurementSet m(MeasurementKind::FourierSamples);
    m.indices_ = std::move(indices);
    return m;
  }

  /// Band-limited functionals given by their Fourier coefficients.
  static MeasurementSet generic(std::vector<PeriodicSignal> signals) {
    if (signals.empty()) throw InvalidInput("at least one measurement is required");
    for (const auto& s : signals) {
      if (s.n_coef() != signals.front().n_coef()) {
        throw InvalidInput("generic functionals must share one band limit");
      }
    }
    MeasurementSet m(MeasurementKind::Generic);
    m.signals_ = std::move(signals);
    return m;
  }

  MeasurementKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept {
    switch (kind_) {
      case MeasurementKind::TimeSamples:
        return locations_.size();
      case MeasurementKind::FourierSamples:
        return indices_.size();
      case MeasurementKind::Generic:
        return signals_.size();
    }
    return 0;
  }
  const std::vector<double>& locations() const noexcept { return locations_; }
  const std::vector<int>& indices() const noexcept { return indices_; }
  const std::vector<PeriodicSignal>& signals() const noexcept { return signals_; }

  /// Whether <f, nu_m> is real for every real f.
  bool real_valued() const noexcept {
    if (kind_ == MeasurementKind::TimeSamples) return true;
    if (kind_ == MeasurementKind::FourierSamples) return false;
    return std::all_of(signals_.begin(), signals_.end(),
                       [](const PeriodicSignal& s) { return s.real_valued(); });
  }

  /// nu^_m[k] = <nu_m, e_k>.
  Complex dual_coeff(std::size_t m, int k) const {
    switch (kind_) {
      case MeasurementKind::TimeSamples:
        return unit_phasor(-k, locations_[m]);
      case MeasurementKind::FourierSamples:
        return indices_[m] == k ? Complex{1.0, 0.0} : Complex{};
      case MeasurementKind::Generic:
        return signals_[m][k];
    }
    return {};
  }

  /// <f, nu_m>.
  Complex apply(std::size_t m, const PeriodicSignal& f) const {
    switch (kind_) {
      case MeasurementKind::TimeSamples:
        return evaluate(f, locations_[m]);
      case MeasurementKind::FourierSamples:
        return f[indices_[m]];
      case MeasurementKind::Generic: {
        Complex acc{};
        const int n = std::min(f.n_coef(), signals_[m].n_coef());
        for (int k = -n; k <= n; ++k) acc += f[k] * std::conj(signals_[m][k]);
        return acc;
      }
    }
    return {};
  }

  /// nu_m truncated to the band (time samples become shifted comb surrogates).
  PeriodicSignal functional(std::size_t m, int n_coef) const {
    std::vector<Complex> c(static_cast<std::size_t>(2 * n_coef + 1));
    for (int k = -n_coef; k <= n_coef; ++k) c[k + n_coef] = dual_coeff(m, k);
    const bool real = kind_ == MeasurementKind::TimeSamples ||
                      (kind_ == MeasurementKind::Generic && signals_[m].real_valued());
    return PeriodicSignal(n_coef, std::move(c), real);
  }

 private:
  explicit MeasurementSet(MeasurementKind kind) : kind_(kind) {}

  MeasurementKind kind_;
  std::vector<double> locations_;
  std::vector<int> indices_;
  std::vector<PeriodicSignal> signals_;
};

/// G = G_off + P P^H / gamma^2; exactly real for time samples.
inline Eigen::MatrixXcd compose_gram(const Eigen::MatrixXcd& off_null, const Eigen::MatrixXcd& p,
                                     double gamma, MeasurementKind kind) {
  Eigen::MatrixXcd g = off_null + p * p.adjoint() / (gamma * gamma);
  if (kind == MeasurementKind::TimeSamples) g = g.real().cast<Complex>();
  return g;
}

/// G, P and the basis phi_m = h_gamma * nu_m for one kernel and one
/// measurement set.
///
/// G[m1][m2] = <phi_{m2}, nu_{m1}> so that the measurement vector of
/// sum_m a_m phi_m is G a. `gram_off_null` is the same matrix built from the
/// kernel without its null-space terms, so that G = G_off + P P^H / gamma^2.
struct SystemMatrices {
  Eigen::MatrixXcd gram;
  Eigen::MatrixXcd gram_off_null;
  Eigen::MatrixXcd p_matrix;
  std::vector<PeriodicSignal> basis;
  KernelSpec kernel;
  MeasurementSet measurements;

  /// Same system for another gamma. Only the null-space parts change.
  SystemMatrices with_gamma(double gamma) const {
    SystemMatrices out{gram, gram_off_null, p_matrix, {}, kernel.with_gamma(gamma), measurements};
    out.gram = compose_gram(gram_off_null, p_matrix, gamma, measurements.kind());
    const double ratio = (kernel.gamma() * kernel.gamma()) / (gamma * gamma);
    out.basis.reserve(basis.size());
    for (const auto& phi : basis) {
      std::vector<Complex> c(phi.coeffs().begin(), phi.coeffs().end());
      for (int k : kernel.op().null_space()) {
        if (k >= -phi.n_coef() && k <= phi.n_coef()) c[k + phi.n_coef()] *= ratio;
      }
      out.basis.emplace_back(phi.n_coef(), std::move(c), phi.real_valued());
    }
    return out;
  }
};

inline SystemMatrices assemble_system(const KernelSpec& h, const MeasurementSet& meas) {
  const OperatorSpec& op = h.op();
  const int n = h.n_coef();
  const auto M = static_cast<Eigen::Index>(meas.size());
  const auto& nulls = op.null_space();
  const auto N0 = static_cast<Eigen::Index>(nulls.size());

  if (meas.kind() == MeasurementKind::TimeSamples && !rkhs_admissible(op, n).admissible) {
    throw NotAdmissible("time sampling requires a RKHS; operator " + op.name() +
                        " has sum 1/|L^[k]|^2 = infinity");
  }
  if (meas.kind() == MeasurementKind::FourierSamples) {
    for (int k : meas.indices()) {
      if (k < -n || k > n) throw InvalidInput("Fourier index " + std::to_string(k) + " outside band");
    }
  }
  if (meas.kind() == MeasurementKind::Generic && meas.signals().front().n_coef() != n) {
    throw InvalidInput("generic functionals must use the kernel band limit");
  }

  SystemMatrices sys{Eigen::MatrixXcd::Zero(M, M), Eigen::MatrixXcd::Zero(M, M),
                     Eigen::MatrixXcd::Zero(M, N0), {}, h, meas};

  for (Eigen::Index m = 0; m < M; ++m) {
    for (Eigen::Index j = 0; j < N0; ++j) {
      sys.p_matrix(m, j) = std::conj(meas.dual_coeff(static_cast<std::size_t>(m), nulls[j]));
    }
  }
  if (N0 > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(sys.p_matrix);
    qr.setThreshold(1e-10);
    if (qr.rank() < N0) {
      throw DegenerateMeasurements("measurements do not determine the null space of " +
                                   op.name() + " (rank(P) = " + std::to_string(qr.rank()) +
                                   " < " + std::to_string(N0) + ")");
    }
  }

  switch (meas.kind()) {
    case MeasurementKind::TimeSamples: {
      // Closed form G_off[m1][m2] = h_off(t_m1 - t_m2); real symmetric.
      std::vector<double> w(static_cast<std::size_t>(n + 1));
      for (int k = 0; k <= n; ++k) w[k] = k == 0 ? h.off_null(0) : h.off_null(k) + h.off_null(-k);
      const auto& t = meas.locations();
      for (Eigen::Index a = 0; a < M; ++a) {
        for (Eigen::Index b = a; b < M; ++b) {
          double delta = t[a] - t[b];
          delta -= std::floor(delta);
          double acc = w[0];
          for (int k = 1; k <= n; ++k) {
            double phase = static_cast<double>(k) * delta;
            phase -= std::floor(phase);
            acc += w[k] * std::cos(kTwoPi * phase);
          }
          sys.gram_off_null(a, b) = acc;
          sys.gram_off_null(b, a) = acc;
        }
      }
      break;
    }
    case MeasurementKind::FourierSamples: {
      const auto& idx = meas.indices();
      for (Eigen::Index m = 0; m < M; ++m) sys.gram_off_null(m, m) = h.off_null(idx[m]);
      break;
    }
    case MeasurementKind::Generic: {
      for (Eigen::Index a = 0; a < M; ++a) {
        for (Eigen::Index b = 0; b < M; ++b) {
          Complex acc{};
          for (int k = -n; k <= n; ++k) {
            acc += h.off_null(k) * meas.dual_coeff(static_cast<std::size_t>(b), k) *
                   std::conj(meas.dual_coeff(static_cast<std::size_t>(a), k));
          }
          sys.gram_off_null(a, b) = acc;
        }
      }
      break;
    }
  }
  sys.gram = compose_gram(sys.gram_off_null, sys.p_matrix, h.gamma(), meas.kind());

  sys.basis.reserve(static_cast<std::size_t>(M));
  for (Eigen::Index m = 0; m < M; ++m) {
    std::vector<Complex> c(static_cast<std::size_t>(2 * n + 1));
    for (int k = -n; k <= n; ++k) c[k + n] = h[k] * meas.dual_coeff(static_cast<std::size_t>(m), k);
    const bool real = meas.kind() == MeasurementKind::TimeSamples ||
                      (meas.kind() == MeasurementKind::Generic &&
                       meas.signals()[static_cast<std::size_t>(m)].real_valued());
    sys.basis.emplace_back(n, std::move(c), real);
  }
  return sys;
}

/// <f, g>_{H_L} = <Lf, Lg> + gamma^2 sum_n f^[k_n] conj(g^[k_n]).
inline Complex inner_product_hl(const OperatorSpec& op, double gamma, const PeriodicSignal& f,
                                const PeriodicSignal& g) {
  if (f.n_coef() != g.n_coef()) throw InvalidInput("inner product: band limits differ");
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be positive");
  const int n = f.n_coef();
  Complex acc{};
  for (int k = -n; k <= n; ++k) {
    if (op.in_null_space(k)) {
      acc += gamma * gamma * f[k] * std::conj(g[k]);
    } else {
      acc += std::norm(op.response(k)) * f[k] * std::conj(g[k]);
    }
  }
  return acc;
}

}  // namespace pspline
