#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pspline/pspline.hpp"

namespace testing_support {

using pspline::Complex;

inline const std::vector<std::string>& table_operators() {
  static const std::vector<std::string> ops = {"D", "D+I", "D2", "D2+4pi2I"};
  return ops;
}

/// Real band-limited signal with coefficients decaying like 1/(1+|k|).
inline pspline::PeriodicSignal random_real_signal(int n, pspline::RandomStream& rng) {
  std::vector<Complex> c(static_cast<std::size_t>(2 * n + 1));
  c[n] = rng.normal();
  for (int k = 1; k <= n; ++k) {
    const double s = 1.0 / (1.0 + k);
    const Complex v{s * rng.normal(), s * rng.normal()};
    c[n + k] = v;
    c[n - k] = std::conj(v);
  }
  return pspline::PeriodicSignal(n, std::move(c), true);
}

inline pspline::PeriodicSignal random_complex_signal(int n, pspline::RandomStream& rng) {
  std::vector<Complex> c(static_cast<std::size_t>(2 * n + 1));
  for (auto& v : c) v = {rng.normal(), rng.normal()};
  return pspline::PeriodicSignal(n, std::move(c), false);
}

inline std::vector<double> random_locations(int m, pspline::RandomStream& rng) {
  std::vector<double> t;
  for (int i = 0; i < m; ++i) t.push_back((i + rng.uniform()) / m);
  return t;
}

inline Eigen::VectorXcd random_real_vector(int m, pspline::RandomStream& rng) {
  Eigen::VectorXcd y(m);
  for (int i = 0; i < m; ++i) y[i] = rng.normal();
  return y;
}

// Minimizes sum_m |y_m - <f, nu_m>|^2 + lambda sum_k w_k |f^[k]|^2 directly
// over the 2n+1 coefficients by least squares on [A; sqrt(lambda W)].
inline pspline::PeriodicSignal brute_force(const pspline::MeasurementSet& meas,
                                           const Eigen::VectorXcd& y, double lambda,
                                           const std::vector<double>& weight, int n) {
  const auto M = static_cast<Eigen::Index>(meas.size());
  const Eigen::Index K = 2 * n + 1;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M + K, K);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(M + K);
  for (Eigen::Index m = 0; m < M; ++m) {
    for (int k = -n; k <= n; ++k) {
      A(m, k + n) = std::conj(meas.dual_coeff(static_cast<std::size_t>(m), k));
    }
  }
  for (int k = -n; k <= n; ++k) A(M + k + n, k + n) = std::sqrt(lambda * weight[k + n]);
  rhs.head(M) = y;
  const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(rhs);
  return pspline::PeriodicSignal(n, std::vector<Complex>(c.data(), c.data() + K), false);
}

inline std::vector<double> representer_weights(const pspline::OperatorSpec& op, int n) {
  std::vector<double> w(static_cast<std::size_t>(2 * n + 1));
  for (int k = -n; k <= n; ++k) w[k + n] = std::norm(op.response(k));
  return w;
}

inline std::vector<double> native_weights(const pspline::OperatorSpec& op, double gamma, int n) {
  auto w = representer_weights(op, n);
  for (int k : op.null_space()) w[k + n] = gamma * gamma;
  return w;
}

inline double relative_distance(const pspline::PeriodicSignal& a, const pspline::PeriodicSignal& b) {
  return std::sqrt(pspline::l2_distance_sq(a, b) / pspline::l2_norm_sq(b));
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

inline Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double var = 0.0;
  for (double v : x) var += (v - m) * (v - m);
  var /= n - 1.0;
  return {m, std::sqrt(var / n)};
}

}  // namespace testing_support
