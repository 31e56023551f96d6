#pragma once

// Closed-form solvers for the quadratic variational problem
//
//   min_f  sum_m |y_m - <f, nu_m>|^2 + lambda ||L f||^2          (representer)
//   min_f  sum_m |y_m - <f, nu_m>|^2 + lambda ||f||_{H_L}^2      (gamma-regularized)
//
// Only the quadratic data term has a closed form; general convex costs are
// not supported.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "pspline/error.hpp"
#include "pspline/rkhs.hpp"
#include "pspline/spectral.hpp"

namespace pspline {

/// Tolerance on ||P^H a||_inf relative to ||a||_inf.
inline constexpr double kConstraintTolerance = 1e-10;
/// Above this condition estimate a solve is flagged ill-conditioned.
inline constexpr double kConditionWarning = 1e12;

enum class ModelKind { RepresenterRT, GammaRegularized };

struct ReconstructionModel {
  ModelKind kind = ModelKind::RepresenterRT;
  /// a for the representer solution, d for the gamma-regularized one.
  Eigen::VectorXcd a_coeffs;
  /// b (null-space weights); empty for the gamma-regularized solution.
  Eigen::VectorXcd b_coeffs;
  /// Fourier coefficients of the reconstruction at the null-space
  /// frequencies, obtained without forming h^[k_n] = 1/gamma^2 explicitly.
  Eigen::VectorXcd null_part;
  std::vector<PeriodicSignal> basis;
  OperatorSpec op;
  double gamma = 1.0;
  double lambda = 0.0;
  /// Reciprocal-condition based estimate for the factorized matrix.
  double condition = 1.0;
  bool real_valued = true;
  /// The reconstruction as computed by the solver.
  PeriodicSignal fitted;

  bool ill_conditioned() const noexcept { return condition > kConditionWarning; }
};

inline PeriodicSignal reconstruct_signal(const ReconstructionModel& model);

namespace detail {

inline void check_inputs(const SystemMatrices& sys, const Eigen::VectorXcd& y, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("lambda must be positive");
  }
  if (y.size() != sys.gram.rows()) {
    throw InvalidInput("expected " + std::to_string(sys.gram.rows()) + " measurements, got " +
                       std::to_string(y.size()));
  }
  if (!y.allFinite()) throw InvalidInput("non-finite measurement");
}

inline double infinity_norm(const Eigen::VectorXcd& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

// Real-valued problems have real coefficients; the complex solve leaves
// round-off imaginary parts which are checked and then dropped.
inline void realify(Eigen::VectorXcd& v, const char* what) {
  const double scale = std::max(1.0, infinity_norm(v));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i].imag()) > 1e-10 * scale) {
      throw NumericalError(std::string("imaginary residue in ") + what);
    }
    v[i] = v[i].real();
  }
}

inline bool real_problem(const SystemMatrices& sys, const Eigen::VectorXcd& y) {
  if (!sys.measurements.real_valued()) return false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i].imag() != 0.0) return false;
  }
  return true;
}

}  // namespace detail

/// Solves [[G + lambda I, P], [P^H, 0]] (a, b) = (y, 0) with partially
/// pivoted LU; the saddle-point matrix is indefinite.
inline ReconstructionModel solve_representer(const SystemMatrices& sys, const Eigen::VectorXcd& y,
                                             double lambda) {
  detail::check_inputs(sys, y, lambda);
  const Eigen::Index M = sys.gram.rows();
  const Eigen::Index N0 = sys.p_matrix.cols();

  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(M + N0, M + N0);
  block.topLeftCorner(M, M) = sys.gram + lambda * Eigen::MatrixXcd::Identity(M, M);
  block.topRightCorner(M, N0) = sys.p_matrix;
  block.bottomLeftCorner(N0, M) = sys.p_matrix.adjoint();

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(M + N0);
  rhs.head(M) = y;

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(block);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(rcond > 1e-15)) {
    throw DegenerateSystem("representer system is singular (condition estimate " +
                               std::to_string(condition) + ")",
                           condition);
  }
  const Eigen::VectorXcd sol = lu.solve(rhs);

  ReconstructionModel model{ModelKind::RepresenterRT,
                            sol.head(M),
                            sol.tail(N0),
                            {},
                            sys.basis,
                            sys.kernel.op(),
                            sys.kernel.gamma(),
                            lambda,
                            condition,
                            detail::real_problem(sys, y)};
  if (model.real_valued) {
    detail::realify(model.a_coeffs, "representer weights");
  }
  const double g2 = model.gamma * model.gamma;
  model.null_part = model.b_coeffs + sys.p_matrix.adjoint() * model.a_coeffs / g2;
  model.fitted = reconstruct_signal(model);
  return model;
}

/// d = (G + lambda I)^{-1} y. With G = G_off + P P^H / gamma^2 the system is
/// solved through the Woodbury identity, which stays accurate for very small
/// or very large gamma.
inline ReconstructionModel solve_gamma_regularized(const SystemMatrices& sys,
                                                   const Eigen::VectorXcd& y, double lambda) {
  detail::check_inputs(sys, y, lambda);
  const Eigen::Index M = sys.gram.rows();
  const Eigen::Index N0 = sys.p_matrix.cols();
  const double g2 = sys.kernel.gamma() * sys.kernel.gamma();

  const Eigen::MatrixXcd shifted =
      sys.gram_off_null + lambda * Eigen::MatrixXcd::Identity(M, M);
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(shifted);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw DegenerateSystem("G + lambda I is not positive definite", INFINITY);
  }
  const double rcond = ldlt.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(rcond > 1e-15)) {
    throw DegenerateSystem("G + lambda I is singular", condition);
  }

  Eigen::VectorXcd d = ldlt.solve(y);
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(N0);
  if (N0 > 0) {
    const Eigen::MatrixXcd ainv_p = ldlt.solve(sys.p_matrix);
    Eigen::MatrixXcd capacitance = sys.p_matrix.adjoint() * ainv_p;
    capacitance.diagonal().array() += g2;
    z = capacitance.partialPivLu().solve(sys.p_matrix.adjoint() * d);
    d -= ainv_p * z;
  }

  ReconstructionModel model{ModelKind::GammaRegularized,
                            std::move(d),
                            Eigen::VectorXcd(0),
                            std::move(z),
                            sys.basis,
                            sys.kernel.op(),
                            sys.kernel.gamma(),
                            lambda,
                            condition,
                            detail::real_problem(sys, y)};
  if (model.real_valued) {
    detail::realify(model.a_coeffs, "regularized weights");
  }
  model.fitted = reconstruct_signal(model);
  return model;
}

inline ReconstructionModel solve_representer(const SystemMatrices& sys,
                                             const std::vector<double>& y, double lambda) {
  return solve_representer(
      sys, Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()))
               .cast<Complex>(),
      lambda);
}

inline ReconstructionModel solve_gamma_regularized(const SystemMatrices& sys,
                                                   const std::vector<double>& y, double lambda) {
  return solve_gamma_regularized(
      sys, Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()))
               .cast<Complex>(),
      lambda);
}

/// f^[k] = sum_m a_m phi^_m[k] off the null space, and the stored null-space
/// component on it.
inline PeriodicSignal reconstruct_signal(const ReconstructionModel& model) {
  if (model.basis.empty()) throw InvalidInput("model has no basis functions");
  const int n = model.basis.front().n_coef();
  std::vector<Complex> c(static_cast<std::size_t>(2 * n + 1));
  for (std::size_t m = 0; m < model.basis.size(); ++m) {
    const Complex a = model.a_coeffs[static_cast<Eigen::Index>(m)];
    if (a == Complex{}) continue;
    const auto phi = model.basis[m].coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += a * phi[i];
  }
  const auto& nulls = model.op.null_space();
  for (std::size_t j = 0; j < nulls.size(); ++j) {
    const int k = nulls[j];
    if (k >= -n && k <= n) c[k + n] = model.null_part[static_cast<Eigen::Index>(j)];
  }
  return PeriodicSignal(n, std::move(c), model.real_valued);
}

/// ||P^H a||_inf for a representer solution.
inline double constraint_residual(const ReconstructionModel& model, const SystemMatrices& sys) {
  return detail::infinity_norm(sys.p_matrix.adjoint() * model.a_coeffs);
}

/// Fourier-domain spline check on the fitted signal: for k off the null
/// space, |L^[k]|^2 f^[k] must equal sum_m a_m e^{-j 2 pi k t_m}. Returns the
/// largest deviation.
inline double verify_spline(const ReconstructionModel& model, const MeasurementSet& meas) {
  if (model.kind != ModelKind::RepresenterRT) {
    throw InvalidInput("spline check needs a representer solution");
  }
  if (meas.kind() != MeasurementKind::TimeSamples) {
    throw InvalidInput("spline check needs time-sample measurements");
  }
  if (static_cast<Eigen::Index>(meas.size()) != model.a_coeffs.size()) {
    throw InvalidInput("measurement count does not match the model");
  }
  const PeriodicSignal& f = model.fitted;
  const int n = f.n_coef();
  double worst = 0.0;
  for (int k = -n; k <= n; ++k) {
    if (model.op.in_null_space(k)) continue;
    Complex innovation{};
    for (std::size_t m = 0; m < meas.size(); ++m) {
      innovation += model.a_coeffs[static_cast<Eigen::Index>(m)] * meas.dual_coeff(m, k);
    }
    worst = std::max(worst, std::abs(std::norm(model.op.response(k)) * f[k] - innovation));
  }
  return worst;
}

/// sum_m |y_m - <f, nu_m>|^2 + lambda ||L f||^2.
inline double quadratic_objective(const OperatorSpec& op, const MeasurementSet& meas,
                                  const Eigen::VectorXcd& y, double lambda,
                                  const PeriodicSignal& f) {
  double fit = 0.0;
  for (std::size_t m = 0; m < meas.size(); ++m) {
    fit += std::norm(y[static_cast<Eigen::Index>(m)] - meas.apply(m, f));
  }
  return fit + lambda * parseval_energy(op, f);
}

}  // namespace pspline
