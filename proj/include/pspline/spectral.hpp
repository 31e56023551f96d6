#pragma once

// Truncated Fourier-series representation of 1-periodic signals and of
// linear shift-invariant (LSI) operators acting on them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pspline/error.hpp"

namespace pspline {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Relative tolerance used to decide that L^[k] vanishes.
inline constexpr double kNullTolerance = 1e-9;
/// Absolute tolerance on imaginary parts of real-valued quantities.
inline constexpr double kRealTolerance = 1e-9;

inline constexpr int kDefaultCoefficients = 1000;

/// e^{j 2 pi k t}, with the phase reduced modulo one period so that large
/// frequencies do not lose accuracy.
inline Complex unit_phasor(int k, double t) {
  double phase = static_cast<double>(k) * t;
  phase -= std::floor(phase);
  return std::polar(1.0, kTwoPi * phase);
}

/// A 1-periodic signal stored as its Fourier coefficients f^[k] for
/// k = -K..K. Signals flagged real-valued are kept exactly Hermitian.
class PeriodicSignal {
 public:
  PeriodicSignal() = default;

  /// Zero signal with band limit `n_coef`.
  explicit PeriodicSignal(int n_coef, bool real_valued = false)
      : n_coef_(check_band(n_coef)),
        real_(real_valued),
        coeffs_(static_cast<std::size_t>(2 * n_coef + 1)) {}

  /// `coeffs` is ordered k = -K..K. A real-valued signal must be Hermitian
  /// up to a relative 1e-9; it is then symmetrized exactly.
  PeriodicSignal(int n_coef, std::vector<Complex> coeffs, bool real_valued)
      : n_coef_(check_band(n_coef)), real_(real_valued), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != static_cast<std::size_t>(2 * n_coef_ + 1)) {
      throw InvalidInput("PeriodicSignal: expected " + std::to_string(2 * n_coef_ + 1) +
                         " coefficients, got " + std::to_string(coeffs_.size()));
    }
    if (real_) {
      double scale = 1.0;
      for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
      if (hermitian_defect() > kRealTolerance * scale) {
        throw InvalidInput("PeriodicSignal: coefficients are not Hermitian symmetric");
      }
      symmetrize();
    }
  }

  /// The complex exponential e_k.
  static PeriodicSignal atom(int n_coef, int k) {
    PeriodicSignal s(n_coef, false);
    s.at(k) = 1.0;
    return s;
  }

  /// Band-limited surrogate of the Dirac comb: every coefficient equals one.
  static PeriodicSignal dirac_comb(int n_coef) {
    return PeriodicSignal(n_coef, std::vector<Complex>(2 * n_coef + 1, Complex{1.0, 0.0}),
                          true);
  }

  int n_coef() const noexcept { return n_coef_; }
  bool real_valued() const noexcept { return real_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  /// f^[k]; zero outside the band.
  Complex operator[](int k) const noexcept {
    return (k < -n_coef_ || k > n_coef_) ? Complex{} : coeffs_[index(k)];
  }

  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  /// Largest |f^[-k] - conj(f^[k])|.
  double hermitian_defect() const noexcept {
    double d = 0.0;
    for (int k = 0; k <= n_coef_; ++k) {
      d = std::max(d, std::abs(coeffs_[index(-k)] - std::conj(coeffs_[index(k)])));
    }
    return d;
  }

 private:
  static int check_band(int n_coef) {
    if (n_coef < 0) throw InvalidParameter("band limit must be nonnegative");
    return n_coef;
  }
  std::size_t index(int k) const noexcept { return static_cast<std::size_t>(k + n_coef_); }
  Complex& at(int k) { return coeffs_[index(k)]; }

  void symmetrize() {
    at(0) = Complex{at(0).real(), 0.0};
    for (int k = 1; k <= n_coef_; ++k) {
      const Complex avg = 0.5 * (at(k) + std::conj(at(-k)));
      at(k) = avg;
      at(-k) = std::conj(avg);
    }
  }

  int n_coef_ = 0;
  bool real_ = false;
  std::vector<Complex> coeffs_;
};

/// An LSI operator L described by its frequency response L^[k] and the
/// finite set of frequencies it annihilates.
class OperatorSpec {
 public:
  using Response = std::function<Complex(int)>;

  /// `degree` is the polynomial degree in (j 2 pi k) when known, -1 otherwise.
  OperatorSpec(std::string name, Response response, std::vector<int> null_space,
               int degree = -1)
      : name_(std::move(name)),
        response_(std::move(response)),
        null_space_(std::move(null_space)),
        degree_(degree) {
    if (!response_) throw InvalidOperator("operator has no frequency response");
    std::sort(null_space_.begin(), null_space_.end());
    if (std::adjacent_find(null_space_.begin(), null_space_.end()) != null_space_.end()) {
      throw InvalidOperator("null-space frequencies must be distinct");
    }
    for (int k : null_space_) {
      if (!std::binary_search(null_space_.begin(), null_space_.end(), -k)) {
        throw InvalidOperator("null space of a real operator must be closed under negation");
      }
      if (std::abs(response_(k)) > kNullTolerance) {
        throw InvalidOperator("response does not vanish at null-space frequency " +
                              std::to_string(k));
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  int degree() const noexcept { return degree_; }

  /// L^[k], exactly zero on the null space.
  Complex response(int k) const { return in_null_space(k) ? Complex{} : response_(k); }

  const std::vector<int>& null_space() const noexcept { return null_space_; }
  std::size_t null_dim() const noexcept { return null_space_.size(); }
  bool in_null_space(int k) const noexcept {
    return std::binary_search(null_space_.begin(), null_space_.end(), k);
  }

 private:
  std::string name_;
  Response response_;
  std::vector<int> null_space_;
  int degree_ = -1;
};

/// L = sum_i c_i D^i, i.e. L^[k] = sum_i c_i (j 2 pi k)^i.
struct PolynomialOperator {
  std::vector<double> coefficients;
};

inline OperatorSpec make_operator(const PolynomialOperator& spec, int n_coef,
                                  std::string name = {}) {
  const auto& c = spec.coefficients;
  if (c.empty()) throw InvalidOperator("empty coefficient list");
  int degree = -1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!std::isfinite(c[i])) throw InvalidOperator("non-finite operator coefficient");
    if (c[i] != 0.0) degree = static_cast<int>(i);
  }
  if (degree < 0) throw InvalidOperator("all operator coefficients are zero");
  if (n_coef < 0) throw InvalidParameter("band limit must be nonnegative");

  std::vector<double> coeffs(c.begin(), c.begin() + degree + 1);
  auto poly = [coeffs](int k) {
    // Horner in z = j 2 pi k.
    const Complex z{0.0, kTwoPi * static_cast<double>(k)};
    Complex acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
  };

  const double scale = std::max(1.0, std::abs(poly(n_coef)));
  std::vector<int> null_space;
  for (int k = -n_coef; k <= n_coef; ++k) {
    if (std::abs(poly(k)) <= kNullTolerance * scale) null_space.push_back(k);
  }

  if (name.empty()) {
    name = "poly:";
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (i) name += ',';
      name += std::to_string(coeffs[i]);
    }
  }
  auto response = [poly, null_space](int k) {
    return std::binary_search(null_space.begin(), null_space.end(), k) ? Complex{} : poly(k);
  };
  return OperatorSpec(std::move(name), std::move(response), std::move(null_space), degree);
}

/// Operators accepted on the command line and in configs: "D", "D+I", "D2",
/// "D2+4pi2I", "I", or "poly:c0,c1,...,cN".
inline OperatorSpec parse_operator(std::string_view text, int n_coef) {
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  if (text == "D") return make_operator({{0.0, 1.0}}, n_coef, "D");
  if (text == "D+I") return make_operator({{1.0, 1.0}}, n_coef, "D+I");
  if (text == "D2") return make_operator({{0.0, 0.0, 1.0}}, n_coef, "D2");
  if (text == "D2+4pi2I") return make_operator({{four_pi2, 0.0, 1.0}}, n_coef, "D2+4pi2I");
  if (text == "I") return make_operator({{1.0}}, n_coef, "I");
  constexpr std::string_view prefix = "poly:";
  if (text.substr(0, prefix.size()) == prefix) {
    std::vector<double> coeffs;
    std::string_view rest = text.substr(prefix.size());
    while (true) {
      const auto comma = rest.find(',');
      const std::string item(rest.substr(0, comma));
      try {
        std::size_t used = 0;
        coeffs.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InvalidOperator("bad polynomial coefficient '" + item + "'");
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return make_operator({coeffs}, n_coef, std::string(text));
  }
  throw InvalidOperator("unknown operator '" + std::string(text) + "'");
}

/// (Lf)^[k] = L^[k] f^[k].
inline PeriodicSignal apply_operator(const OperatorSpec& op, const PeriodicSignal& f) {
  const int n = f.n_coef();
  std::vector<Complex> out(f.size());
  for (int k = -n; k <= n; ++k) out[k + n] = op.response(k) * f[k];
  return PeriodicSignal(n, std::move(out), f.real_valued());
}

/// f(t) = sum_k f^[k] e^{j 2 pi k t}.
inline Complex evaluate(const PeriodicSignal& f, double t) {
  const int n = f.n_coef();
  Complex acc{};
  for (int k = -n; k <= n; ++k) acc += f[k] * unit_phasor(k, t);
  return acc;
}

/// Periodic convolution, diagonal in the Fourier domain.
inline PeriodicSignal convolve(const PeriodicSignal& f, const PeriodicSignal& g) {
  if (f.n_coef() != g.n_coef()) throw InvalidInput("convolve: band limits differ");
  const int n = f.n_coef();
  std::vector<Complex> out(f.size());
  for (int k = -n; k <= n; ++k) out[k + n] = f[k] * g[k];
  return PeriodicSignal(n, std::move(out), f.real_valued() && g.real_valued());
}

/// Orthogonal projection onto span{e_k : k in null space of op}.
inline PeriodicSignal project_null_space(const OperatorSpec& op, const PeriodicSignal& f) {
  const int n = f.n_coef();
  std::vector<Complex> out(f.size());
  for (int k : op.null_space()) {
    if (k >= -n && k <= n) out[k + n] = f[k];
  }
  return PeriodicSignal(n, std::move(out), f.real_valued());
}

/// ||Lf||^2 by Parseval.
inline double parseval_energy(const OperatorSpec& op, const PeriodicSignal& f) {
  const int n = f.n_coef();
  double e = 0.0;
  for (int k = -n; k <= n; ++k) {
    if (!op.in_null_space(k)) e += std::norm(f[k]) * std::norm(op.response(k));
  }
  return e;
}

/// <f, g> = sum_k f^[k] conj(g^[k]).
inline Complex inner_product_l2(const PeriodicSignal& f, const PeriodicSignal& g) {
  if (f.n_coef() != g.n_coef()) throw InvalidInput("inner product: band limits differ");
  Complex acc{};
  const int n = f.n_coef();
  for (int k = -n; k <= n; ++k) acc += f[k] * std::conj(g[k]);
  return acc;
}

inline double l2_norm_sq(const PeriodicSignal& f) {
  double e = 0.0;
  for (const auto& c : f.coeffs()) e += std::norm(c);
  return e;
}

/// ||f - g||^2 by Parseval.
inline double l2_distance_sq(const PeriodicSignal& f, const PeriodicSignal& g) {
  if (f.n_coef() != g.n_coef()) throw InvalidInput("distance: band limits differ");
  double e = 0.0;
  const int n = f.n_coef();
  for (int k = -n; k <= n; ++k) e += std::norm(f[k] - g[k]);
  return e;
}

}  // namespace pspline
